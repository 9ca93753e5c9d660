#include "amdi/keyrate.hpp"

#include <omp.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "amdi/optimize.hpp"

namespace amdi {

Mode parse_mode(const std::string& s) {
  if (s == "asymptotic") return Mode::asymptotic;
  if (s == "decoy") return Mode::decoy;
  if (s == "finite") return Mode::finite;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::asymptotic: return "asymptotic";
    case Mode::decoy: return "decoy";
    case Mode::finite: return "finite";
  }
  return "?";
}

double leak_ec(double n_z, double e_z, double f) { return f * n_z * binary_entropy(e_z); }

namespace {

KeyRateResult base_result(const CountModel& cm) {
  const auto& cfg = cm.config();
  KeyRateResult r;
  r.distance_km = cfg.channel.distance_km;
  r.eta = transmittance(cfg.channel);
  r.plob = plob_star_bound(r.eta);
  r.n_tot = cm.n_tot();
  r.n_z = cm.n_z();
  r.e_z = cm.e_z_max();
  r.leak = leak_ec(r.n_z, r.e_z, cfg.security.error_correction_f);
  r.source = cfg.source;
  r.t_c_s = cfg.timing.phase_locked ? 0.0 : cfg.timing.t_c_s;
  return r;
}

void finish(KeyRateResult& r, double raw, double pulses) {
  r.key_length_raw = raw;
  r.feasible = raw > 0.0;
  r.key_length = r.feasible ? raw : 0.0;
  r.rate = r.key_length / pulses;
}

}  // namespace

KeyRateResult asymptotic_key_length(const DecoyEstimates& est, const CountModel& cm) {
  KeyRateResult r = base_result(cm);
  r.est = est;
  double phi = std::min(est.phi_z, 0.5);
  finish(r, est.s1_z * (1.0 - binary_entropy(phi)) - r.leak, cm.config().security.total_pulses);
  return r;
}

KeyRateResult finite_key_length_3user(const DecoyEstimates& est, const CountModel& cm) {
  KeyRateResult r = base_result(cm);
  r.est = est;
  const auto& sec = cm.config().security;
  r.eps_terms = std::log2(4.0 / sec.eps_cor) + 2.0 * std::log2(2.0 / (sec.eps_prime * sec.eps_hat)) +
                2.0 * std::log2(1.0 / (2.0 * sec.eps_pa));
  double phi = std::min(est.phi_z, 0.5);
  finish(r, est.s0_z + est.s1_z * (1.0 - binary_entropy(phi)) - r.leak - r.eps_terms, sec.total_pulses);
  return r;
}

KeyRateResult evaluate(const ProtocolConfig& cfg, Mode mode, bool with_qber) {
  CountModel cm(cfg);
  KeyRateResult r;
  switch (mode) {
    case Mode::asymptotic:
      r = asymptotic_key_length(asymptotic_estimates(cm), cm);
      break;
    case Mode::decoy:
      r = asymptotic_key_length(finite_bounds_3user(cm, cfg.security, FiniteMode::no_fluctuation), cm);
      break;
    case Mode::finite:
      r = finite_key_length_3user(finite_bounds_3user(cm, cfg.security, FiniteMode::chernoff), cm);
      break;
  }
  if (with_qber) {
    auto x = cm.x_tally();
    r.qber_x = x.n > 0.0 ? x.m / x.n : 0.0;
  }
  return r;
}

namespace {

void check_eps(double e, const char* name) {
  if (!(e > 0.0 && e < 1.0)) throw DomainError(std::string("security parameter ") + name + " outside (0,1)");
}

SecurityBudget compose(const SecurityParams& sec, double n0, double n3, double nbeta) {
  check_eps(sec.eps_cor, "eps_cor");
  check_eps(sec.eps_prime, "eps_prime");
  check_eps(sec.eps_hat, "eps_hat");
  check_eps(sec.eps_e, "eps_e");
  check_eps(sec.eps_pa, "eps_pa");
  check_eps(sec.eps_chernoff, "eps_chernoff");
  SecurityBudget b;
  b.terms["pe"] = 2.0 * (sec.eps_prime + 2.0 * sec.eps_e + sec.eps_hat);
  b.terms["eps0"] = n0 * sec.eps_chernoff;
  b.terms["eps3"] = n3 * sec.eps_chernoff;
  b.terms["beta"] = nbeta * sec.eps_chernoff;
  b.terms["pa"] = sec.eps_pa;
  for (const auto& [k, v] : b.terms) b.eps_sec += v;
  b.eps_tot = b.eps_sec + sec.eps_cor;
  return b;
}

}  // namespace

SecurityBudget security_budget(const SecurityParams& sec) { return compose(sec, 4, 15, 1); }

SecurityBudget security_budget(const SecurityParams& sec, const EpsLedger& used) {
  if (used.count("s0") > 4) throw DomainError("vacuum estimate used more than 4 Chernoff applications");
  if (used.count("s111") > 15) throw DomainError("single-photon estimate used more than 15 Chernoff applications");
  return compose(sec, used.count("s0"), used.count("s111"), used.count("beta"));
}

double plob_star_bound(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("plob_star_bound: eta outside [0,1)");
  return -std::log1p(-eta * eta) / std::log(2.0);
}

std::vector<double> distance_grid(double a, double b, double step) {
  if (!(step > 0.0) || b < a) throw std::invalid_argument("distance grid needs step > 0 and B >= A");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

std::vector<KeyRateResult> scan_distance(const ProtocolConfig& cfg, const std::vector<double>& d,
                                         const ScanOptions& opt) {
  std::vector<KeyRateResult> out(d.size());
  if (d.empty()) return out;
  const int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
  if (!opt.optimize) {
    std::vector<std::string> errors(d.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t i = 0; i < d.size(); ++i) {
      ProtocolConfig c = cfg;
      c.channel.distance_km = d[i];
      try {
        out[i] = evaluate(c, opt.mode);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
    for (const auto& e : errors)
      if (!e.empty()) throw std::runtime_error(e);
    return out;
  }
  OptimizeOptions oo;
  oo.mode = opt.mode;
  oo.seed = opt.seed;
  oo.threads = threads;
  std::optional<ParamVector> warm = params_of(cfg);
  for (std::size_t i = 0; i < d.size(); ++i) {
    ProtocolConfig c = cfg;
    c.channel.distance_km = d[i];
    auto res = optimize_point(c, oo, warm);
    out[i] = res.result;
    if (res.result.feasible) warm = res.params;
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

void write_keyrate_csv(std::ostream& os, const std::vector<KeyRateResult>& rows) {
  os << "distance_km,eta,rate,key_length,plob,qber_x,phase_error,n_tot,mu,nu,p_mu,p_nu,t_c_s,feasible\n";
  for (const auto& r : rows) {
    os << format_double(r.distance_km) << ',' << format_double(r.eta) << ',' << format_double(r.rate) << ','
       << format_double(r.key_length) << ',' << format_double(r.plob) << ',' << format_double(r.qber_x) << ','
       << format_double(r.est.phi_z) << ',' << format_double(r.n_tot) << ',' << format_double(r.source.mu) << ','
       << format_double(r.source.nu) << ',' << format_double(r.source.p_mu) << ',' << format_double(r.source.p_nu)
       << ',' << format_double(r.t_c_s) << ',' << (r.feasible ? 1 : 0) << '\n';
  }
}

}  // namespace amdi
