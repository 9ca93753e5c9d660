#include "checks.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "amdi/decoy.hpp"
#include "amdi/fock.hpp"
#include "amdi/keyrate.hpp"
#include "amdi/stats.hpp"

namespace amdi::tools {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<Link> oracle_grid(int points) {
  std::vector<Link> g;
  for (double eta : {0.03, 0.2, 0.45, 0.7, 0.85})
    for (double pd : {0.0, 1e-8, 1e-4, 2e-2}) g.push_back({eta, pd});
  if (points < static_cast<int>(g.size())) g.resize(std::max(points, 1));
  return g;
}

}  // namespace

CheckResult check_oracle_equivalence(int points, double tol) {
  CheckResult r{"oracle_equivalence", true, ""};
  double worst = 0.0;
  auto cmp = [&](double a, double b) {
    double d = std::abs(a - b);
    worst = std::max(worst, d);
    if (!(d <= tol)) r.ok = false;
  };
  for (const Link& l : oracle_grid(points)) {
    auto y = single_photon_yields(l);
    cmp(y.y00, port_yield_oracle(0, 0, l));
    cmp(y.y01, port_yield_oracle(0, 1, l));
    cmp(y.y10, port_yield_oracle(1, 0, l));
    cmp(y.y11, port_yield_oracle(1, 1, l));
    auto d3 = propagate(ring_x_input(std::vector<double>(3, 0.0)), 3, l);
    auto p3 = pattern_yields(3, l);
    for (unsigned b = 0; b < 8; ++b) cmp(p3.at(pattern_string(b, 3)), pattern_probability(d3, b, 3));
    auto d4 = propagate(ring_x_input(std::vector<double>(4, 0.0)), 4, l);
    auto p4 = pattern_yields(4, l);
    for (const char* s : {"LLLL", "RLLL"}) {
      unsigned bits = 0;
      for (int i = 0; i < 4; ++i)
        if (s[i] == 'R') bits |= 1u << i;
      cmp(p4.at(s), pattern_probability(d4, bits, 4));
    }
  }
  r.detail = fmt("max abs diff %.3g over %g points", worst, static_cast<double>(oracle_grid(points).size()));
  return r;
}

CheckResult check_parity_rule() {
  CheckResult r{"parity_rule", true, ""};
  for (int n : {3, 4})
    for (double g : {0.0, std::numbers::pi}) {
      auto v = parity_rule_check(n, g);
      if (!v.ok) r.ok = false;
      r.detail += fmt("N=%g theta_g=%.4g expected parity %g; ", n, g, v.expected_parity);
    }
  return r;
}

CheckResult check_chernoff_coverage(int draws, double eps, std::uint64_t seed) {
  CheckResult r{"chernoff_coverage", true, ""};
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (double mean : {3.0, 30.0, 300.0, 3000.0}) {
    const std::int64_t trials = 1000000;
    std::binomial_distribution<std::int64_t> dist(trials, mean / trials);
    auto obs = chernoff_observed(mean, eps);
    int lo_obs = 0, hi_obs = 0, lo_exp = 0, hi_exp = 0;
    for (int i = 0; i < draws; ++i) {
      double x = static_cast<double>(dist(rng));
      if (x < obs.lower) ++lo_obs;
      if (x > obs.upper) ++hi_obs;
      auto ex = chernoff_expected(x, eps);
      if (mean < ex.lower) ++lo_exp;
      if (mean > ex.upper) ++hi_exp;
    }
    for (int c : {lo_obs, hi_obs, lo_exp, hi_exp}) {
      double f = static_cast<double>(c) / draws;
      worst = std::max(worst, f);
      if (f > 2.0 * eps) r.ok = false;
    }
  }
  r.detail = fmt("worst one-sided violation rate %.3g (limit %.3g)", worst, 2.0 * eps);
  return r;
}

CheckResult check_gamma_grid() {
  CheckResult r{"gamma_grid", true, ""};
  const std::vector<double> sizes{1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  int cells = 0;
  for (double lambda : {0.01, 0.05, 0.2, 0.45})
    for (double eps : {1e-7, 1e-10})
      for (std::size_t i = 0; i < sizes.size(); ++i)
        for (std::size_t j = 0; j < sizes.size(); ++j) {
          ++cells;
          double g = sampling_gamma_upper(sizes[i], sizes[j], lambda, eps);
          if (!(g > 0.0)) r.ok = false;
          if (i + 1 < sizes.size() && !(sampling_gamma_upper(sizes[i + 1], sizes[j], lambda, eps) < g)) r.ok = false;
          if (j + 1 < sizes.size() && !(sampling_gamma_upper(sizes[i], sizes[j + 1], lambda, eps) < g)) r.ok = false;
        }
  r.detail = fmt("%g grid cells", cells);
  return r;
}

CheckResult check_presets() {
  CheckResult r{"presets_valid", true, ""};
  std::vector<ProtocolConfig> all{preset_fig3(3), preset_fig3(4),       preset_fig4(true),   preset_fig4(false),
                                  preset_fig6(1e16, true), preset_fig6(1e12, false), preset_fig7(1e16)};
  for (const auto& c : all)
    for (const auto& e : validate(c)) {
      r.ok = false;
      r.detail += e + "; ";
    }
  if (r.ok) r.detail = "7 presets";
  return r;
}

CheckResult check_s1z_forms() {
  CheckResult r{"s1z_generic_vs_closed", true, ""};
  double worst = 0.0;
  for (int n : {3, 4})
    for (double d : {0.0, 100.0, 300.0}) {
      auto c = preset_fig3(n);
      c.channel.distance_km = d;
      CountModel cm(c);
      double a = asymptotic_s1_z(cm), b = asymptotic_s1_z_closed(cm);
      double rel = std::abs(a - b) / std::max(std::abs(b), 1e-300);
      worst = std::max(worst, rel);
      if (!(rel < 1e-12)) r.ok = false;
    }
  r.detail = fmt("max rel diff %.3g", worst);
  return r;
}

CheckResult check_security_budget() {
  CheckResult r{"security_budget", true, ""};
  SecurityParams s;
  auto b = security_budget(s);
  if (!(std::abs(b.eps_sec - 2.9e-6) < 1e-18)) r.ok = false;
  auto c = preset_fig6(1e16, true);
  c.channel.distance_km = 100.0;
  try {
    auto res = evaluate(c, Mode::finite);
    security_budget(c.security, res.est.ledger);
  } catch (const std::exception& e) {
    r.ok = false;
    r.detail = e.what();
  }
  if (r.ok) r.detail = fmt("eps_sec %.6g", b.eps_sec);
  return r;
}

std::vector<CheckResult> run_checks(bool quick) {
  std::vector<CheckResult> out;
  out.push_back(check_presets());
  out.push_back(check_oracle_equivalence(quick ? 4 : 20));
  out.push_back(check_parity_rule());
  out.push_back(check_chernoff_coverage(quick ? 10000 : 100000, 1e-2, 12345));
  out.push_back(check_gamma_grid());
  out.push_back(check_s1z_forms());
  out.push_back(check_security_budget());
  return out;
}

}  // namespace amdi::tools
