#include "amdi/mermin.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "amdi/keyrate.hpp"

namespace amdi {

double mermin_inequality(double xxx, double xyy, double yxy, double yyx) {
  for (double c : {xxx, xyy, yxy, yyx})
    if (!(c >= -1.0 && c <= 1.0)) throw DomainError("mermin_inequality: correlator outside [-1,1]");
  return xxx - xyy - yxy - yyx;
}

namespace {

const char* kSets[] = {"[2nu,2nu,2nu]", "[2nu,2nu,o]", "[2nu,o,2nu]", "[o,2nu,2nu]", "[2nu,o,o]",
                       "[o,2nu,o]",     "[o,o,2nu]",   "[o,o,o]",     "[2mu,2mu,2mu]", "[2mu,2mu,o]",
                       "[2mu,o,2mu]",   "[o,2mu,2mu]", "[2mu,o,o]",   "[o,2mu,o]",  "[o,o,2mu]"};

}  // namespace

SignedCounts expected_signed_counts(const CountModel& cm) {
  if (cm.n_users() != 3) throw std::invalid_argument("Mermin counts exist for three users only");
  SignedCounts out;
  for (const char* name : kSets) {
    double n = cm.n_set(parse_set(name));
    out[name] = SignedCount{n / 16.0, n / 16.0};
  }
  // the all-2nu and all-2mu sets are X-frame sets: phase sifted, split by class,
  // one sign pattern out of eight
  out["[2nu,2nu,2nu]"] = sifted_signed(cm, Level::nu);
  out["[2mu,2mu,2mu]"] = sifted_signed(cm, Level::mu);
  return out;
}

SignedCount sifted_signed(const CountModel& cm, Level k) {
  const int n = cm.n_users();
  const auto& cfg = cm.config();
  if (!(cm.q_port() > 0.0)) return {};
  const double v = cm.value(k), ed = cfg.channel.e_d;
  std::vector<std::pair<double, double>> ab(n, {v, v});
  auto a = cm.phase_average(ab, cfg.quad_points);
  const double pre = cm.n_tot() * (2.0 / cfg.source.M) * std::pow(cm.prob(k), 2 * n) / std::pow(cm.q_port(), n);
  double err = pre * ((1.0 - ed) * a.odd + ed * a.even);
  double cor = pre * a.total - err;
  return SignedCount{cor / 8.0, err / 8.0};
}

double signed_set_prob(const CountModel& cm, const std::string& set) {
  if (set == "[2mu,2mu,2mu]")
    return 2.0 * std::pow(cm.prob(Level::mu), 2 * cm.n_users()) / cm.config().source.M;
  return cm.p_set(parse_set(set));
}

Correlators frame_correlators(const CountModel& cm) {
  const int n = cm.n_users();
  const double nu = cm.config().source.nu, ed = cm.config().channel.e_d;
  std::vector<std::pair<double, double>> ab(n, {nu, nu});
  auto corr = [&](double extra) {
    auto a = cm.phase_average(ab, cm.config().quad_points, extra);
    double cor = (1.0 - ed) * a.even + ed * a.odd;
    double err = (1.0 - ed) * a.odd + ed * a.even;
    return cor + err > 0.0 ? (cor - err) / (cor + err) : 0.0;
  };
  Correlators c;
  c.xxx = corr(0.0);
  // two users measuring Y shift the summed reference phase by pi
  c.xyy = c.yxy = c.yyx = corr(std::numbers::pi);
  return c;
}

MerminEstimate mermin_lower_bound(const SignedCounts& counts, const CountModel& cm, const SecurityParams& sec,
                                  FiniteMode mode) {
  MerminEstimate m;
  const double mu = cm.config().source.mu, nu = cm.config().source.nu;
  const double eps = sec.eps_chernoff;
  auto get = [&](const char* set, bool ppp) {
    auto it = counts.find(set);
    if (it == counts.end()) throw std::invalid_argument(std::string("missing signed count ") + set);
    return ppp ? it->second.ppp : it->second.mmm;
  };
  // bound on the expectation behind an observed count, then divide by p
  auto term = [&](const char* set, bool ppp, bool upper) {
    double x = get(set, ppp);
    if (mode == FiniteMode::chernoff) {
      m.ledger.charge("mermin");
      auto b = chernoff_expected(x, eps);
      x = upper ? b.upper : b.lower;
    }
    double p = signed_set_prob(cm, set);
    return p > 0.0 ? x / p : 0.0;
  };
  // e^{6k} n/p - e^{4k} (three) + e^{2k} (three) - n_ooo/p with the given directions
  auto family = [&](const char* tag, double k, bool ppp, bool first_upper) {
    std::string a = std::string("[") + tag + "," + tag + "," + tag + "]";
    std::string b1 = std::string("[") + tag + "," + tag + ",o]", b2 = std::string("[") + tag + ",o," + tag + "]",
                b3 = std::string("[o,") + tag + "," + tag + "]";
    std::string c1 = std::string("[") + tag + ",o,o]", c2 = std::string("[o,") + tag + ",o]",
                c3 = std::string("[o,o,") + tag + "]";
    bool u = first_upper;
    return std::exp(6 * k) * term(a.c_str(), ppp, u) -
           std::exp(4 * k) * (term(b1.c_str(), ppp, !u) + term(b2.c_str(), ppp, !u) + term(b3.c_str(), ppp, !u)) +
           std::exp(2 * k) * (term(c1.c_str(), ppp, u) + term(c2.c_str(), ppp, u) + term(c3.c_str(), ppp, u)) -
           term("[o,o,o]", ppp, !u);
  };
  const double px = cm.p_set(parse_set("[2nu,2nu,2nu]"));
  const double pre = std::exp(-6 * nu) * px;

  double lo = pre / (std::pow(mu, 3) * (mu - nu)) *
              (std::pow(mu, 4) * family("2nu", nu, true, false) - std::pow(nu, 4) * family("2mu", mu, true, true));
  double hi_p = pre * family("2nu", nu, true, true);
  double hi_m = pre * family("2nu", nu, false, true);
  for (double* v : {&lo, &hi_p, &hi_m})
    if (*v < 0.0) {
      *v = 0.0;
      m.clamped = true;
    }
  if (mode == FiniteMode::chernoff) {
    lo = chernoff_observed(lo, eps).lower;
    hi_p = chernoff_observed(hi_p, eps).upper;
    hi_m = chernoff_observed(hi_m, eps).upper;
    m.ledger.charge("mermin", 3);
  }
  m.s_ppp_lower = lo;
  m.s_ppp_upper = hi_p;
  m.s_mmm_upper = hi_m;
  double den = hi_p + hi_m;
  m.defined = den > 0.0;
  m.m_lower = m.defined ? std::min(4.0 * (lo - hi_m) / den, 4.0) : 0.0;
  return m;
}

std::vector<MerminRow> scan_mermin(const ProtocolConfig& cfg, const std::vector<double>& d, FiniteMode mode,
                                   int threads) {
  std::vector<MerminRow> out(d.size());
  std::vector<std::string> errors(d.size());
  const int t = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(t)
  for (std::size_t i = 0; i < d.size(); ++i) {
    ProtocolConfig c = cfg;
    c.channel.distance_km = d[i];
    try {
      CountModel cm(c);
      out[i].distance_km = d[i];
      out[i].est = mermin_lower_bound(expected_signed_counts(cm), cm, c.security, mode);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return out;
}

void write_mermin_csv(std::ostream& os, const std::vector<MerminRow>& rows) {
  os << "distance_km,m_lower,s_ppp_lower,s_mmm_upper,classical_bound\n";
  for (const auto& r : rows)
    os << format_double(r.distance_km) << ',' << format_double(r.est.m_lower) << ','
       << format_double(r.est.s_ppp_lower) << ',' << format_double(r.est.s_mmm_upper) << ",2\n";
}

}  // namespace amdi
