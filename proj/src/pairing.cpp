#include "amdi/pairing.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace amdi {

namespace {

// One attempt from start index s; on success marks the group used and fills slot.
bool try_group(std::vector<ClickEvent>& ev, std::size_t s, int n, std::int64_t tc, std::vector<std::size_t>& slot,
               std::size_t& last) {
  const std::size_t sz = ev.size();
  std::fill(slot.begin(), slot.end(), sz);
  slot[ev[s].port] = s;
  int have = 1;
  const std::int64_t t0 = ev[s].time_bin;
  last = s;
  for (std::size_t j = s + 1; j < sz && have < n; ++j) {
    if (ev[j].used) continue;
    if (ev[j].time_bin - t0 > tc) break;
    if (slot[ev[j].port] != sz) continue;  // duplicate port
    slot[ev[j].port] = j;
    last = j;
    ++have;
  }
  if (have < n) return false;
  for (int port = 1; port <= n; ++port) ev[slot[port]].used = true;
  return true;
}

}  // namespace

std::vector<PairingEvent> pair_stream(std::vector<ClickEvent>& ev, int n, std::int64_t tc) {
  std::vector<PairingEvent> out;
  std::vector<std::size_t> slot(n + 1);
  std::size_t last = 0;
  for (std::size_t s = 0; s < ev.size(); ++s) {
    if (ev[s].used) continue;
    if (!try_group(ev, s, n, tc, slot, last)) continue;
    PairingEvent p;
    p.members.assign(slot.begin() + 1, slot.end());
    p.span = ev[last].time_bin - ev[s].time_bin;
    out.push_back(std::move(p));
  }
  return out;
}

StreamPairer::StreamPairer(int n_users, std::int64_t tc_bins) : n_(n_users), tc_(tc_bins), slot_(n_users + 1) {}

void StreamPairer::feed(const std::vector<ClickEvent>& chunk, std::int64_t horizon) {
  buf_.insert(buf_.end(), chunk.begin(), chunk.end());
  run(horizon, false);
}

void StreamPairer::finish() { run(0, true); }

void StreamPairer::run(std::int64_t horizon, bool final) {
  std::size_t s = 0, last = 0;
  for (; s < buf_.size(); ++s) {
    if (buf_[s].used) continue;
    // the window of this start may still receive clicks
    if (!final && buf_[s].time_bin + tc_ > horizon) break;
    if (!try_group(buf_, s, n_, tc_, slot_, last)) continue;
    ++pairs_;
    span_sum_ += static_cast<double>(buf_[last].time_bin - buf_[s].time_bin);
  }
  buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(s));
}

double tc_bins_real(const TimingConfig& t) {
  if (t.phase_locked) return std::numeric_limits<double>::infinity();
  return static_cast<double>(n_tc_bins(t));
}

double analytic_pair_count(const std::vector<double>& q, double pulses, double n_tc) {
  const int n = static_cast<int>(q.size());
  if (n == 0 || !(n_tc > 0.0)) return 0.0;
  std::vector<double> win(n);
  for (int j = 0; j < n; ++j) {
    if (q[j] <= 0.0)
      win[j] = 0.0;
    else if (std::isinf(n_tc) || q[j] >= 1.0)
      win[j] = 1.0;
    else
      win[j] = -std::expm1(n_tc * std::log1p(-q[j]));
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) prod *= win[j];
    if (prod == 0.0) return 0.0;
    total += pulses * q[i] / (1.0 + (n - 1) / prod);
  }
  return total;
}

std::vector<ClickEvent> generate_clicks(const std::vector<double>& q, std::int64_t bins, std::uint64_t seed,
                                        std::int64_t shard) {
  const int n = static_cast<int>(q.size());
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  std::mt19937_64 rng(sq);
  std::vector<std::vector<std::int64_t>> per(n);
  for (int i = 0; i < n; ++i) {
    if (q[i] <= 0.0) continue;
    if (q[i] >= 1.0) {
      per[i].resize(bins);
      for (std::int64_t t = 0; t < bins; ++t) per[i][t] = t;
      continue;
    }
    std::geometric_distribution<std::int64_t> gap(q[i]);
    for (std::int64_t t = gap(rng); t < bins; t += 1 + gap(rng)) per[i].push_back(t);
  }
  std::vector<ClickEvent> ev;
  std::size_t total = 0;
  for (const auto& p : per) total += p.size();
  ev.reserve(total);
  std::vector<std::size_t> pos(n, 0);
  // n-way merge, ties by port index
  while (true) {
    int best = -1;
    for (int i = 0; i < n; ++i)
      if (pos[i] < per[i].size() && (best < 0 || per[i][pos[i]] < per[best][pos[best]])) best = i;
    if (best < 0) break;
    ev.push_back(ClickEvent{per[best][pos[best]], best + 1, Side::L, false});
    ++pos[best];
  }
  std::bernoulli_distribution coin(0.5);
  for (auto& e : ev) e.side = coin(rng) ? Side::R : Side::L;
  return ev;
}

std::int64_t MonteCarloSpec::effective_shard_bins() const {
  if (shard_bins > 0) return shard_bins;
  return std::max<std::int64_t>(std::int64_t{1} << 20, 10 * tc_bins);
}

MonteCarloResult monte_carlo_pair_count(const MonteCarloSpec& spec) {
  MonteCarloResult r;
  if (spec.bins <= 0 || spec.q_ports.empty()) return r;
  const std::int64_t sb = spec.effective_shard_bins();
  const std::int64_t ns = (spec.bins + sb - 1) / sb;
  const int n = static_cast<int>(spec.q_ports.size());
  const int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
  const std::int64_t batch = 2 * static_cast<std::int64_t>(threads);
  std::vector<double> pairs(ns);
  StreamPairer pairer(n, spec.tc_bins);
  std::vector<std::vector<ClickEvent>> gen(batch);
  for (std::int64_t k0 = 0; k0 < ns; k0 += batch) {
    const std::int64_t kn = std::min(batch, ns - k0);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t j = 0; j < kn; ++j) {
      const std::int64_t k = k0 + j;
      gen[j] = generate_clicks(spec.q_ports, std::min(sb, spec.bins - k * sb), spec.seed, k);
      for (auto& e : gen[j]) e.time_bin += k * sb;
    }
    for (std::int64_t j = 0; j < kn; ++j) {
      const std::int64_t k = k0 + j;
      const double before = pairer.pairs();
      r.clicks += static_cast<double>(gen[j].size());
      pairer.feed(gen[j], std::min((k + 1) * sb, spec.bins) - 1);
      if (k + 1 == ns) pairer.finish();
      pairs[k] = pairer.pairs() - before;
      std::vector<ClickEvent>().swap(gen[j]);
    }
  }
  r.pairs = pairer.pairs();
  r.shards = ns;
  r.mean_span = r.pairs > 0.0 ? pairer.span_sum() / r.pairs : 0.0;
  if (ns > 1) {
    // batch means over shards, weighted by shard length (the last one may be short)
    const double bins = static_cast<double>(spec.bins), m = r.pairs / bins;
    double v = 0.0;
    for (std::int64_t k = 0; k < ns; ++k) {
      double b = static_cast<double>(std::min(sb, spec.bins - k * sb));
      v += b * (pairs[k] / b - m) * (pairs[k] / b - m);
    }
    r.sigma = std::sqrt(v * bins / static_cast<double>(ns - 1));
  }
  return r;
}

void write_clicks(std::ostream& os, const std::vector<ClickEvent>& ev) {
  for (const auto& e : ev) os << e.time_bin << ',' << e.port << ',' << (e.side == Side::R ? 'R' : 'L') << '\n';
}

std::vector<ClickEvent> read_clicks(std::istream& is) {
  std::vector<ClickEvent> ev;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    ClickEvent e;
    char c1 = 0, c2 = 0, side = 0;
    if (!(ss >> e.time_bin >> c1 >> e.port >> c2 >> side) || c1 != ',' || c2 != ',' || (side != 'L' && side != 'R') ||
        e.port < 1)
      throw std::runtime_error("bad click line " + std::to_string(lineno));
    e.side = side == 'R' ? Side::R : Side::L;
    ev.push_back(e);
  }
  return ev;
}

}  // namespace amdi
