// amdi: key-rate scans, pairing Monte Carlo, Mermin scans and self checks.
// Exit codes: 0 ok, 1 validation failure, 2 usage or config error.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "amdi/keyrate.hpp"
#include "amdi/mermin.hpp"
#include "amdi/optimize.hpp"
#include "amdi/pairing.hpp"
#include "checks.hpp"
#include "config_io.hpp"

using namespace amdi;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::string distance;
  int users = 0;
  std::string mode;
  bool optimize = false;
  bool phase_locked = false;
  bool filtering = false;
  double pulses = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string fig;
  int threads = 0;
  double cutoff = 0.0;
  std::string gnuplot;
  std::string manifest;
  CLI::Option* optimize_opt = nullptr;
  CLI::Option* locked_opt = nullptr;
  CLI::Option* filtering_opt = nullptr;
  CLI::Option* pulses_opt = nullptr;
};

double parse_number(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("not a number: " + s);
  return v;
}

std::vector<double> parse_distances(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() == 1) return {parse_number(parts[0])};
  if (parts.size() != 3) throw UsageError("--distance-km expects A:B:STEP");
  double a = parse_number(parts[0]), b = parse_number(parts[1]), step = parse_number(parts[2]);
  if (!(step > 0.0) || b < a || a < 0.0) throw UsageError("--distance-km: need 0 <= A <= B and STEP > 0");
  return distance_grid(a, b, step);
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "YAML config file");
  app->add_option("--distance-km", c.distance, "A:B:STEP or a single distance");
  app->add_option("--users", c.users, "number of users N");
  app->add_option("--mode", c.mode, "asymptotic|decoy|finite");
  c.optimize_opt = app->add_flag("--optimize,!--no-optimize", c.optimize, "optimize intensities and probabilities");
  c.locked_opt = app->add_flag("--phase-locked,!--no-phase-locked", c.phase_locked, "assume global phase locking");
  c.filtering_opt = app->add_flag("--filtering,!--no-filtering", c.filtering, "click filtering");
  c.pulses_opt = app->add_option("--pulses", c.pulses, "total pulses per user");
  app->add_option("--seed", c.seed, "optimizer seed");
  app->add_option("--out", c.out, "CSV output path (default stdout)");
  app->add_option("--fig", c.fig, "figure preset")->check(CLI::IsMember({"3a", "3b", "4", "6", "7"}));
  app->add_option("--threads", c.threads, "worker threads (0: default)");
  app->add_option("--gnuplot", c.gnuplot, "write a gnuplot script for the CSV");
  app->add_option("--manifest", c.manifest, "manifest path (default <out>.manifest.json)");
}

// preset, then config file, then flags
ProtocolConfig build_config(const Common& c) {
  ProtocolConfig cfg;
  double pulses = c.pulses_opt->count() ? c.pulses : 1e16;
  bool filtering = c.filtering_opt->count() ? c.filtering : true;
  if (c.fig == "3a" || c.fig == "3b") cfg = preset_fig3(c.users > 0 ? c.users : 3);
  else if (c.fig == "4") cfg = preset_fig4(c.locked_opt->count() ? c.phase_locked : true);
  else if (c.fig == "6") cfg = preset_fig6(pulses, filtering);
  else if (c.fig == "7") cfg = preset_fig7(pulses);
  if (!c.config_path.empty()) cfg = tools::load_config(c.config_path, cfg);
  if (c.users > 0) cfg.n_users = c.users;
  if (c.locked_opt->count()) cfg.timing.phase_locked = c.phase_locked;
  if (c.filtering_opt->count()) {
    cfg.click_filtering = c.filtering;
    if (c.filtering) cfg.extended_z_sets = false;
  }
  if (c.pulses_opt->count()) cfg.security.total_pulses = c.pulses;
  validate_or_throw(cfg);
  return cfg;
}

std::string default_grid(const std::string& fig) {
  if (fig == "3a" || fig == "3b") return "0:400:10";
  if (fig == "4") return "0:500:10";
  if (fig == "6") return "0:350:10";
  if (fig == "7") return "0:200:10";
  return "0:300:25";
}

Mode default_mode(const std::string& fig) {
  if (fig == "4") return Mode::decoy;
  if (fig == "6" || fig == "7") return Mode::finite;
  return Mode::asymptotic;
}

Mode resolve_mode(const Common& c) {
  if (c.mode.empty()) return default_mode(c.fig);
  try {
    return parse_mode(c.mode);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

void emit(const Common& c, const std::string& csv, const tools::RunManifest& m) {
  if (c.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + c.out);
    f << csv;
  }
  std::string mpath = !c.manifest.empty() ? c.manifest : (c.out.empty() ? "" : c.out + ".manifest.json");
  if (!mpath.empty()) {
    std::ofstream f(mpath, std::ios::binary);
    if (!f) throw UsageError("cannot write " + mpath);
    f << m.to_json();
  }
}

void write_gnuplot(const Common& c, const std::string& kind) {
  if (c.gnuplot.empty()) return;
  std::ofstream g(c.gnuplot);
  if (!g) throw UsageError("cannot write " + c.gnuplot);
  std::string data = c.out.empty() ? "data.csv" : c.out;
  g << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'distance (km)'\n";
  if (kind == "rate") {
    g << "set logscale y\nset format y '10^{%L}'\nset ylabel 'key rate (bits/pulse)'\n";
    if (c.cutoff > 0.0) g << "set yrange [" << format_double(c.cutoff) << ":*]\n";
    g << "plot '" << data << "' using 1:3 with lines title 'R', '' using 1:5 with lines dt 2 title 'PLOB'\n";
  } else if (kind == "qber") {
    g << "set ylabel 'error rate'\nplot '" << data << "' using 1:6 with lines title 'X QBER', '' using 1:7 with lines "
      << "title 'phase error'\n";
  } else {
    g << "set ylabel 'Mermin value'\nplot '" << data << "' using 1:2 with lines title 'M lower', '' using 1:5 "
      << "with lines dt 2 title 'local realism'\n";
  }
}

std::string command_line(const std::string& sub, const Common& c, const std::vector<double>& d, bool optimize) {
  std::ostringstream os;
  os << sub << " optimize=" << optimize << " cutoff=" << format_double(c.cutoff) << " distances=";
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << format_double(d[i]);
  return os.str();
}

int run_mermin(const Common& c) {
  ProtocolConfig cfg = build_config(c);
  if (cfg.n_users != 3) throw UsageError("mermin: three users only");
  Mode mode = c.mode.empty() ? Mode::finite : resolve_mode(c);
  if (mode == Mode::asymptotic) throw UsageError("mermin: mode must be finite or decoy");
  FiniteMode fm = mode == Mode::finite ? FiniteMode::chernoff : FiniteMode::no_fluctuation;
  auto d = parse_distances(c.distance.empty() ? default_grid("7") : c.distance);
  bool optimize = c.optimize_opt->count() ? c.optimize : true;
  std::vector<MerminRow> rows;
  if (optimize) {
    OptimizeOptions oo;
    oo.seed = c.seed;
    oo.threads = c.threads;
    rows = scan_mermin_optimized(cfg, d, oo, fm);
  } else {
    rows = scan_mermin(cfg, d, fm, c.threads);
  }
  std::ostringstream csv;
  write_mermin_csv(csv, rows);
  tools::RunManifest m{command_line("mermin", c, d, optimize), tools::dump_config(cfg), c.seed, mode_name(mode),
                       tools::utc_timestamp()};
  emit(c, csv.str(), m);
  write_gnuplot(c, "mermin");
  return 0;
}

int run_scan(const Common& c) {
  if (c.fig == "7") return run_mermin(c);
  ProtocolConfig cfg = build_config(c);
  Mode mode = resolve_mode(c);
  auto d = parse_distances(c.distance.empty() ? default_grid(c.fig) : c.distance);
  ScanOptions so;
  so.mode = mode;
  so.optimize = c.optimize_opt->count() ? c.optimize : !c.fig.empty();
  so.seed = c.seed;
  so.threads = c.threads;
  auto rows = scan_distance(cfg, d, so);
  if (c.cutoff > 0.0) std::erase_if(rows, [&](const KeyRateResult& r) { return r.rate < c.cutoff; });
  std::ostringstream csv;
  write_keyrate_csv(csv, rows);
  tools::RunManifest m{command_line("scan", c, d, so.optimize), tools::dump_config(cfg), c.seed, mode_name(mode),
                       tools::utc_timestamp()};
  emit(c, csv.str(), m);
  write_gnuplot(c, c.fig == "3b" ? "qber" : "rate");
  return 0;
}

struct McOpts {
  int users = 3;
  double bins = 1e8;
  std::uint64_t seed = 1;
  int threads = 0;
  double threshold = 0.05;
  double q = 0.0;
  double tc_bins = 0.0;
  std::string out;
  std::string manifest;
};

int run_montecarlo(const McOpts& o) {
  if (!(o.bins >= 1.0)) throw UsageError("montecarlo: --bins must be positive");
  if (o.users < 2) throw UsageError("montecarlo: --users must be at least 2");
  struct Set {
    std::string name;
    double q;
    std::int64_t tc;
  };
  std::vector<Set> sets;
  if (o.q > 0.0 || o.tc_bins > 0.0) {
    if (!(o.q > 0.0 && o.q <= 1.0 && o.tc_bins >= 1.0)) throw UsageError("montecarlo: need 0 < --q <= 1 and --tc-bins >= 1");
    sets.push_back({"custom", o.q, static_cast<std::int64_t>(o.tc_bins)});
  } else {
    sets.push_back({"sparse", 1e-4, 1000000});
    sets.push_back({"saturated", 1.0, 3});
  }
  std::ostringstream csv;
  csv << "set,n_users,q,tc_bins,bins,analytic,monte_carlo,sigma,rel_dev,z,mean_span_over_tc\n";
  bool ok = true;
  for (const auto& s : sets) {
    MonteCarloSpec sp;
    sp.q_ports.assign(o.users, s.q);
    sp.bins = static_cast<std::int64_t>(o.bins);
    sp.tc_bins = s.tc;
    sp.seed = o.seed;
    sp.threads = o.threads;
    auto r = monte_carlo_pair_count(sp);
    double a = analytic_pair_count(sp.q_ports, static_cast<double>(sp.bins), static_cast<double>(s.tc));
    double rel = a > 0.0 ? (r.pairs - a) / a : 0.0;
    double z = r.sigma > 0.0 ? (r.pairs - a) / r.sigma : 0.0;
    if (std::abs(rel) > o.threshold) ok = false;
    csv << s.name << ',' << o.users << ',' << format_double(s.q) << ',' << s.tc << ',' << sp.bins << ','
        << format_double(a) << ',' << format_double(r.pairs) << ',' << format_double(r.sigma) << ','
        << format_double(rel) << ',' << format_double(z) << ',' << format_double(r.mean_span / s.tc) << '\n';
  }
  std::ostringstream cmd;
  cmd << "montecarlo users=" << o.users << " bins=" << format_double(o.bins) << " q=" << format_double(o.q)
      << " tc_bins=" << format_double(o.tc_bins) << " threshold=" << format_double(o.threshold);
  tools::RunManifest m{cmd.str(), "", o.seed, "montecarlo", tools::utc_timestamp()};
  Common c;
  c.out = o.out;
  c.manifest = o.manifest;
  emit(c, csv.str(), m);
  if (!ok) std::cerr << "montecarlo: deviation above threshold " << format_double(o.threshold) << "\n";
  return ok ? 0 : 1;
}

int run_validate(bool quick) {
  bool ok = true;
  for (const auto& r : tools::run_checks(quick)) {
    std::cout << (r.ok ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.ok;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous MDI conference key agreement: key rates, pairing, Mermin bounds"};
  app.require_subcommand(1);

  Common scan_c, mermin_c;
  auto* scan = app.add_subcommand("scan", "key rate versus distance");
  add_common(scan, scan_c);
  scan->add_option("--cutoff", scan_c.cutoff, "drop rows with rate below this value");

  auto* mermin = app.add_subcommand("mermin", "Mermin lower bound versus distance (three users)");
  add_common(mermin, mermin_c);

  McOpts mc;
  auto* monte = app.add_subcommand("montecarlo", "analytic pairing count against a simulated click stream");
  monte->add_option("--users", mc.users, "number of ports");
  monte->add_option("--bins", mc.bins, "simulated time bins");
  monte->add_option("--seed", mc.seed, "stream seed");
  monte->add_option("--threads", mc.threads, "worker threads (0: default)");
  monte->add_option("--threshold", mc.threshold, "largest accepted relative deviation");
  monte->add_option("--q", mc.q, "per-port click probability (custom set)");
  monte->add_option("--tc-bins", mc.tc_bins, "pairing window in bins (custom set)");
  monte->add_option("--out", mc.out, "CSV output path (default stdout)");
  monte->add_option("--manifest", mc.manifest, "manifest path (default <out>.manifest.json)");

  bool quick = false;
  auto* val = app.add_subcommand("validate", "oracle and invariant checks");
  val->add_flag("--quick", quick, "reduced grids and sample sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (scan->parsed()) return run_scan(scan_c);
    if (mermin->parsed()) return run_mermin(mermin_c);
    if (monte->parsed()) return run_montecarlo(mc);
    if (val->parsed()) return run_validate(quick);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
