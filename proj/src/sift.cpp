#include "amdi/sift.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <numbers>

#include "amdi/pairing.hpp"

namespace amdi {

namespace {

const char* tot_name(Tot t) {
  switch (t) {
    case Tot::o: return "o";
    case Tot::nu: return "nu";
    case Tot::mu: return "mu";
    case Tot::nu2: return "2nu";
    case Tot::mu2: return "2mu";
    case Tot::munu: return "mu+nu";
  }
  return "?";
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::string set_name(const IntensitySet& k) {
  std::string s = "[";
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) s += ',';
    s += tot_name(k[i]);
  }
  return s + "]";
}

IntensitySet parse_set(const std::string& s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw std::invalid_argument("bad intensity set: " + s);
  IntensitySet out;
  std::string body = s.substr(1, s.size() - 2), tok;
  auto flush = [&] {
    static const std::map<std::string, Tot> names{{"o", Tot::o},     {"nu", Tot::nu},   {"mu", Tot::mu},
                                                  {"2nu", Tot::nu2}, {"2mu", Tot::mu2}, {"mu+nu", Tot::munu}};
    auto it = names.find(tok);
    if (it == names.end()) throw std::invalid_argument("bad intensity set: " + s);
    out.push_back(it->second);
    tok.clear();
  };
  for (char c : body) {
    if (c == ',')
      flush();
    else if (c != ' ')
      tok += c;
  }
  flush();
  return out;
}

IntensitySet uniform_set(int n, Tot t) { return IntensitySet(n, t); }

std::vector<std::pair<Level, Level>> splits_of(Tot t) {
  using L = Level;
  switch (t) {
    case Tot::o: return {{L::o, L::o}};
    case Tot::nu: return {{L::nu, L::o}, {L::o, L::nu}};
    case Tot::mu: return {{L::mu, L::o}, {L::o, L::mu}};
    case Tot::nu2: return {{L::nu, L::nu}};
    case Tot::mu2: return {{L::mu, L::mu}};
    case Tot::munu: return {{L::mu, L::nu}, {L::nu, L::mu}};
  }
  return {};
}

Basis assign_basis(const IntensitySet& k, const std::vector<int>& slices, int M, bool extended_z) {
  bool all_mu = true, all_single = true, all_2nu = true;
  for (Tot t : k) {
    all_mu &= t == Tot::mu;
    all_single &= t == Tot::mu || t == Tot::nu;
    all_2nu &= t == Tot::nu2;
  }
  if (all_mu || (extended_z && all_single)) return Basis::Z;
  if (all_2nu) {
    long long s = 0;
    for (int m : slices) s += m;
    // theta_g / pi = 2 s / M must be an integer
    if ((2 * s) % M == 0) return Basis::X;
  }
  return Basis::discard;
}

std::optional<std::vector<int>> key_map(int theta_g_mod, const std::vector<int>& r) {
  if (theta_g_mod != 0 && theta_g_mod != 1) return std::nullopt;
  std::vector<int> bits(r.size(), 0);
  int p = theta_g_mod;
  for (int x : r) p ^= (x & 1);
  if (!bits.empty()) bits[0] = p;
  return bits;
}

std::optional<int> DetailedKey::u1_bit(const std::vector<int>& r) const {
  if (!theta_g_ref_mod || kappa.empty()) return std::nullopt;
  int b = kappa[0] ^ *theta_g_ref_mod;
  for (int x : r) b ^= (x & 1);
  return b;
}

DetailedKey key_map_detailed(const std::vector<int>& slices, int M) {
  DetailedKey d;
  bool all0 = true, all_half = true;
  double g = 0.0;
  for (int m : slices) {
    int mm = ((m % M) + M) % M;
    int k = 2 * mm >= M ? 1 : 0;
    double th = kTwoPi * mm / M - k * std::numbers::pi;
    if (th < 0.0) th = 0.0;
    d.vartheta.push_back(th);
    d.kappa.push_back(k);
    all0 &= std::fabs(th) < 1e-12;
    all_half &= std::fabs(th - std::numbers::pi / 2) < 1e-12;
    g += th;
  }
  d.frame = all0 ? Frame::X : (all_half ? Frame::Y : Frame::none);
  double q = g / std::numbers::pi, r = std::round(q);
  if (std::fabs(q - r) < 1e-9) d.theta_g_ref_mod = static_cast<int>(static_cast<long long>(r) % 2);
  return d;
}

int z_bit_assign(Level e, Level l) {
  if (e != Level::o && l == Level::o) return 0;
  if (e == Level::o && l != Level::o) return 1;
  throw InvalidEvent("Z event needs exactly one nonzero slot");
}

double phase_misalignment(const ProtocolConfig& c) {
  double d = std::numbers::pi / c.source.M;
  if (!c.timing.phase_locked)
    d += 0.5 * c.timing.t_c_s * (kTwoPi * c.timing.delta_f_hz + c.timing.omega_fiber_rad_s);
  return d;
}

CountModel::CountModel(const ProtocolConfig& cfg)
    : cfg_(cfg), link_(link_of(cfg.channel)), port_(cfg.n_users, link_, intensity_choice(cfg.source)) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) q_tab_[a][b] = port_.q_pair(value(Level(a)), value(Level(b)));
  q_raw_ = 0.0;
  double removed = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double w = prob(Level(a)) * prob(Level(b)) * q_tab_[a][b];
      q_raw_ += w;
      if (filtered(Level(a), Level(b))) removed += w;
    }
  q_eff_ = q_raw_ - removed;
  surv_ = q_raw_ > 0.0 ? q_eff_ / q_raw_ : 1.0;
  n_tot_ = analytic_pair_count(std::vector<double>(cfg.n_users, q_eff_), cfg.security.total_pulses,
                               tc_bins_real(cfg.timing));
  delta_ = phase_misalignment(cfg);
}

double CountModel::value(Level l) const {
  switch (l) {
    case Level::o: return cfg_.source.o;
    case Level::nu: return cfg_.source.nu;
    case Level::mu: return cfg_.source.mu;
  }
  return 0.0;
}

double CountModel::prob(Level l) const {
  switch (l) {
    case Level::o: return cfg_.source.p_o;
    case Level::nu: return cfg_.source.p_nu;
    case Level::mu: return cfg_.source.p_mu;
  }
  return 0.0;
}

double CountModel::mean_intensity() const {
  const auto& s = cfg_.source;
  return s.p_mu * s.mu + s.p_nu * s.nu + s.p_o * s.o;
}

double CountModel::p_nc() const {
  double one = std::exp(-mean_intensity() * link_.eta) * (1.0 - link_.p_d) * (1.0 - link_.p_d);
  return std::pow(one, cfg_.n_users - 1);
}

bool CountModel::filtered(Level a, Level b) const {
  if (!cfg_.click_filtering) return false;
  return (a == Level::mu && b == Level::nu) || (a == Level::nu && b == Level::mu);
}

double CountModel::q_pair(Level a, Level b) const {
  return filtered(a, b) ? 0.0 : q_tab_[static_cast<int>(a)][static_cast<int>(b)];
}

namespace {

// visits every split of K; port i joins late slot of user i with early slot of user i+1
void for_each_split(const IntensitySet& k,
                    const std::function<void(const std::vector<std::pair<Level, Level>>&)>& f) {
  const int n = static_cast<int>(k.size());
  std::vector<std::vector<std::pair<Level, Level>>> opts(n);
  for (int i = 0; i < n; ++i) opts[i] = splits_of(k[i]);
  std::vector<std::size_t> idx(n, 0);
  std::vector<std::pair<Level, Level>> cur(n);
  while (true) {
    for (int i = 0; i < n; ++i) cur[i] = opts[i][idx[i]];
    f(cur);
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < opts[i].size()) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
}

}  // namespace

double CountModel::n_set(const IntensitySet& k) const {
  const int n = n_users();
  if (static_cast<int>(k.size()) != n) throw std::invalid_argument("intensity set size mismatch");
  if (!(q_eff_ > 0.0)) return 0.0;
  double total = 0.0;
  for_each_split(k, [&](const auto& sp) {
    double w = 1.0;
    for (int i = 0; i < n && w > 0.0; ++i) {
      Level l = sp[i].second, e = sp[(i + 1) % n].first;
      w *= prob(l) * prob(e) * q_pair(l, e) / q_eff_;
    }
    total += w;
  });
  return n_tot_ * total;
}

double CountModel::p_set(const IntensitySet& k) const {
  const int n = n_users();
  bool all_2nu = true;
  for (Tot t : k) all_2nu &= t == Tot::nu2;
  double scale = std::pow(surv_, n);
  if (all_2nu) return 2.0 * std::pow(cfg_.source.p_nu, 2 * n) / cfg_.source.M / scale;
  double total = 0.0;
  for_each_split(k, [&](const auto& sp) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      w *= prob(sp[i].first) * prob(sp[i].second);
      if (filtered(sp[i].second, sp[(i + 1) % n].first)) w = 0.0;
    }
    total += w;
  });
  return total / scale;
}

std::vector<IntensitySet> CountModel::z_sets() const {
  const int n = n_users();
  if (cfg_.click_filtering || !cfg_.extended_z_sets) return {uniform_set(n, Tot::mu)};
  std::vector<IntensitySet> out;
  for (unsigned b = 0; b < (1u << n); ++b) {
    IntensitySet k(n);
    for (int i = 0; i < n; ++i) k[i] = (b >> i & 1u) ? Tot::nu : Tot::mu;
    out.push_back(k);
  }
  return out;
}

double CountModel::n_z() const {
  double s = 0.0;
  for (const auto& k : z_sets()) s += n_set(k);
  return s;
}

double CountModel::m_z(int ui) const {
  const int n = n_users();
  if (ui < 1 || ui >= n) throw std::invalid_argument("m_z: user index out of range");
  if (!(q_eff_ > 0.0)) return 0.0;
  double total = 0.0;
  for (const auto& k : z_sets())
    for_each_split(k, [&](const auto& sp) {
      if (z_bit_assign(sp[0].first, sp[0].second) == z_bit_assign(sp[ui].first, sp[ui].second)) return;
      double w = 1.0;
      for (int i = 0; i < n && w > 0.0; ++i) {
        Level l = sp[i].second, e = sp[(i + 1) % n].first;
        w *= prob(l) * prob(e) * q_pair(l, e) / q_eff_;
      }
      total += w;
    });
  return n_tot_ * total;
}

double CountModel::e_z_max() const {
  double nz = n_z();
  if (!(nz > 0.0)) return 0.0;
  double m = 0.0;
  for (int i = 1; i < n_users(); ++i) m = std::max(m, m_z(i));
  return m / nz;
}

PhaseAverage CountModel::phase_average(const std::vector<std::pair<double, double>>& ab, int P,
                                       double extra_phase) const {
  const int n = n_users();
  if (static_cast<int>(ab.size()) != n) throw std::invalid_argument("phase_average: need one pair per port");
  // plus[i][p] = L+R, minus[i][p] = L-R at grid phase p; port 0 is tabulated at
  // delta - 2 pi s / P, indexed by s = (sum of the other indices) mod P
  std::vector<std::vector<double>> plus(n, std::vector<double>(P)), minus(n, std::vector<double>(P));
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < P; ++p) {
      double th = i == 0 ? delta_ + extra_phase - kTwoPi * p / P : kTwoPi * p / P;
      double L = port_.q_pair_phase(ab[i].first, ab[i].second, th, false);
      double R = port_.q_pair_phase(ab[i].first, ab[i].second, th, true);
      plus[i][p] = L + R;
      minus[i][p] = L - R;
    }
  double st = 0.0, sd = 0.0;
  std::function<void(int, int, double, double)> rec = [&](int i, int s, double pp, double pm) {
    if (i == n) {
      st += pp * plus[0][s];
      sd += pm * minus[0][s];
      return;
    }
    for (int p = 0; p < P; ++p) rec(i + 1, (s + p) % P, pp * plus[i][p], pm * minus[i][p]);
  };
  rec(1, 0, 1.0, 1.0);
  double cnt = std::pow(static_cast<double>(P), n - 1);
  PhaseAverage r;
  r.total = st / cnt;
  double diff = sd / cnt;
  r.odd = 0.5 * (r.total - diff);
  r.even = 0.5 * (r.total + diff);
  return r;
}

XTally CountModel::x_tally() const {
  const int n = n_users();
  XTally x;
  if (!(q_eff_ > 0.0)) return x;
  const double nu = cfg_.source.nu, ed = cfg_.channel.e_d;
  std::vector<std::pair<double, double>> ab(n, {nu, nu});
  const double pre = n_tot_ * (2.0 / cfg_.source.M) * std::pow(cfg_.source.p_nu, 2 * n) / std::pow(q_eff_, n);
  auto full = phase_average(ab, cfg_.quad_points);
  x.n = pre * full.total;
  x.m = pre * ((1.0 - ed) * full.odd + ed * full.even);
  auto half = phase_average(ab, std::max(2, cfg_.quad_points / 2));
  double mh = pre * ((1.0 - ed) * half.odd + ed * half.even);
  x.quad_rel_change = x.m != 0.0 ? std::fabs(x.m - mh) / std::fabs(x.m) : 0.0;
  x.quad_warning = x.quad_rel_change > 1e-6;
  return x;
}

SiftedTallies expected_counts(const CountModel& cm) {
  SiftedTallies t;
  const int n = cm.n_users();
  t.n_users = n;
  t.n_tot = cm.n_tot();
  t.q_port = cm.q_port();
  t.survival = cm.survival();
  t.delta = cm.delta();
  const Tot all[] = {Tot::o, Tot::nu, Tot::mu, Tot::nu2, Tot::mu2, Tot::munu};
  const int base = 6;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= base;
  for (int c = 0; c < total; ++c) {
    IntensitySet k(n);
    int x = c;
    for (int i = 0; i < n; ++i, x /= base) k[i] = all[x % base];
    t.n[set_name(k)] = cm.n_set(k);
  }
  t.n_z = cm.n_z();
  double mz = 0.0;
  for (int i = 1; i < n; ++i) mz = std::max(mz, cm.m_z(i));
  t.m_z = mz;
  t.e_z = t.n_z > 0.0 ? mz / t.n_z : 0.0;
  auto x = cm.x_tally();
  t.n_x = x.n;
  t.m_x = x.m;
  t.qber_x = x.n > 0.0 ? x.m / x.n : 0.0;
  t.quad_warning = x.quad_warning;
  return t;
}

SiftedTallies expected_counts(const ProtocolConfig& cfg) { return expected_counts(CountModel(cfg)); }

double click_filter_survival(const ProtocolConfig& cfg) { return CountModel(cfg).survival(); }

}  // namespace amdi
