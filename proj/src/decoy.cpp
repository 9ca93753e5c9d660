#include "amdi/decoy.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace amdi {

namespace {

constexpr double kMinDecoy = 1e-3;

double y_of(const YieldTable& y, int a, int b) {
  if (a == 0 && b == 0) return y.y00;
  if (a == 1 && b == 1) return y.y11;
  return y.y10;
}

double s1_prefactor(const CountModel& cm) {
  const auto& s = cm.config().source;
  const int n = cm.n_users();
  double q = cm.q_port();
  if (!(q > 0.0)) return 0.0;
  return cm.n_tot() * std::pow(s.p_mu * s.p_o * s.mu * std::exp(-s.mu) * cm.p_nc(), n) / std::pow(q, n);
}

}  // namespace

double asymptotic_s1_z(const CountModel& cm) {
  const int n = cm.n_users();
  auto y = single_photon_yields(cm.link());
  double sum = 0.0;
  // bit i set: user i's photon sits in the late slot
  for (unsigned b = 0; b < (1u << n); ++b) {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      int late_i = (b >> i) & 1u;
      int early_next = 1 - static_cast<int>((b >> ((i + 1) % n)) & 1u);
      prod *= y_of(y, early_next, late_i);
    }
    sum += prod;
  }
  return s1_prefactor(cm) * sum;
}

double asymptotic_s1_z_closed(const CountModel& cm) {
  const int n = cm.n_users();
  auto y = single_photon_yields(cm.link());
  if (n == 3) return s1_prefactor(cm) * (2.0 * std::pow(y.y10, 3) + 6.0 * y.y11 * y.y10 * y.y00);
  if (n == 4)
    return s1_prefactor(cm) * (2.0 * std::pow(y.y10, 4) + 12.0 * y.y11 * y.y10 * y.y10 * y.y00 +
                               2.0 * y.y11 * y.y11 * y.y00 * y.y00);
  return asymptotic_s1_z(cm);
}

double asymptotic_s1_x(double s1_z, const CountModel& cm) {
  const auto& s = cm.config().source;
  const int n = cm.n_users();
  double pz = cm.p_set(uniform_set(n, Tot::mu)), px = cm.p_set(uniform_set(n, Tot::nu2));
  if (!(pz > 0.0)) return 0.0;
  double num = std::pow(2.0 * s.nu, n) * std::exp(-2.0 * n * s.nu) * px;
  double den = std::pow(s.mu, n) * std::exp(-n * s.mu) * pz;
  return s1_z * num / den;
}

double asymptotic_t1_x(const CountModel& cm) {
  const auto& s = cm.config().source;
  const int n = cm.n_users();
  double q = cm.q_port();
  if (!(q > 0.0)) return 0.0;
  const double ed = cm.config().channel.e_d;
  // 2^{N-1} patterns in each class, all with the same yield
  // patterns see the per-port transmittance eta/2, as the Z-basis y_ab do, and the
  // same no-click factor p_nc; otherwise t1_x / s1_x exceeds 1 at e_d = 1
  const Link half{cm.link().eta / 2.0, cm.link().p_d};
  double cls = std::pow(2.0, n - 1);
  double y_err = cls * pattern_yield_class(n, false, half);
  double y_cor = cls * pattern_yield_class(n, true, half);
  double pre = cm.n_tot() * (2.0 / s.M) *
               std::pow(s.p_nu * s.p_nu * 2.0 * s.nu * std::exp(-2.0 * s.nu) * cm.p_nc(), n) / std::pow(q, n);
  return pre * ((1.0 - ed) * y_err + ed * y_cor);
}

DecoyEstimates asymptotic_estimates(const CountModel& cm) {
  DecoyEstimates e;
  e.provenance = Provenance::asymptotic;
  e.s1_z = e.s1_z_exp = asymptotic_s1_z(cm);
  e.s1_x = e.s1_x_exp = asymptotic_s1_x(e.s1_z, cm);
  e.t1_x = e.t1_x_exp = asymptotic_t1_x(cm);
  e.e1_x = e.s1_x > 0.0 ? e.t1_x / e.s1_x : 0.5;
  e.phi_raw = e.s1_x > 0.0 ? e.e1_x : 2.0;
  e.phi_z = e.e1_x;
  if (!(e.phi_z <= 0.5)) {
    e.phi_z = 0.5;
    e.phi_capped = true;
  }
  return e;
}

namespace {

// Bounds on expected counts from simulated (observed) ones, charging the ledger.
class Bounder {
 public:
  Bounder(const CountModel& cm, double eps, FiniteMode mode, EpsLedger& ledger)
      : cm_(cm), eps_(eps), mode_(mode), ledger_(ledger) {}

  double n(const std::string& set) const { return cm_.n_set(parse_set(set)); }
  double p(const std::string& set) const { return cm_.p_set(parse_set(set)); }

  double lo(double x, const std::string& target) const { return bound(x, target).lower; }
  double hi(double x, const std::string& target) const { return bound(x, target).upper; }
  double lo_n(const std::string& set, const std::string& target) const { return lo(n(set), target); }
  double hi_n(const std::string& set, const std::string& target) const { return hi(n(set), target); }

  BoundPair bound(double x, const std::string& target) const {
    if (mode_ == FiniteMode::no_fluctuation) return {x, x};
    ledger_.charge(target);
    return chernoff_expected(x, eps_);
  }

 private:
  const CountModel& cm_;
  double eps_;
  FiniteMode mode_;
  EpsLedger& ledger_;
};

}  // namespace

DecoyEstimates finite_bounds_3user(const CountModel& cm, const SecurityParams& sec, FiniteMode mode) {
  if (cm.n_users() != 3) throw std::invalid_argument("finite decoy bounds exist for three users only");
  DecoyEstimates e;
  e.provenance = mode == FiniteMode::chernoff ? Provenance::finite : Provenance::decoy;
  const auto& s = cm.config().source;
  const double mu = s.mu, nu = s.nu;
  const double eps = sec.eps_chernoff;
  // below this the 1/nu^3 coefficients amplify rounding in the alternating sums
  if (!(nu >= kMinDecoy * mu)) throw DomainError("decoy intensity too small for the three-decoy bounds");
  Bounder B(cm, eps, mode, e.ledger);
  auto ratio = [&](double n, const std::string& set) {
    double pp = B.p(set);
    return pp > 0.0 ? n / pp : 0.0;
  };

  // single-photon yield lower bound; both [o,o,o] bounds come from one application
  double ooo_n = B.n("[o,o,o]");
  BoundPair ooo = B.bound(ooo_n, "s111");
  double ev = std::exp(nu), e2v = std::exp(2 * nu), e3v = std::exp(3 * nu);
  double em = std::exp(mu), e2m = std::exp(2 * mu), e3m = std::exp(3 * mu);
  double nu_part = e3v * ratio(B.lo_n("[nu,nu,nu]", "s111"), "[nu,nu,nu]") -
                   e2v * ratio(B.hi_n("[nu,nu,o]", "s111"), "[nu,nu,o]") -
                   e2v * ratio(B.hi_n("[nu,o,nu]", "s111"), "[nu,o,nu]") -
                   e2v * ratio(B.hi_n("[o,nu,nu]", "s111"), "[o,nu,nu]") +
                   ev * ratio(B.lo_n("[nu,o,o]", "s111"), "[nu,o,o]") +
                   ev * ratio(B.lo_n("[o,nu,o]", "s111"), "[o,nu,o]") +
                   ev * ratio(B.lo_n("[o,o,nu]", "s111"), "[o,o,nu]") - ratio(ooo.upper, "[o,o,o]");
  double mu_part = e3m * ratio(B.hi_n("[mu,mu,mu]", "s111"), "[mu,mu,mu]") -
                   e2m * ratio(B.lo_n("[mu,mu,o]", "s111"), "[mu,mu,o]") -
                   e2m * ratio(B.lo_n("[mu,o,mu]", "s111"), "[mu,o,mu]") -
                   e2m * ratio(B.lo_n("[o,mu,mu]", "s111"), "[o,mu,mu]") +
                   em * ratio(B.hi_n("[mu,o,o]", "s111"), "[mu,o,o]") +
                   em * ratio(B.hi_n("[o,mu,o]", "s111"), "[o,mu,o]") +
                   em * ratio(B.hi_n("[o,o,mu]", "s111"), "[o,o,mu]") - ratio(ooo.lower, "[o,o,o]");
  // y111 lower bound: bracket / (mu^3 nu^3 (mu - nu))
  double bracket = std::pow(mu, 4) * nu_part - std::pow(nu, 4) * mu_part;
  double y111 = bracket / (std::pow(mu, 3) * std::pow(nu, 3) * (mu - nu));
  if (y111 < 0.0) {
    y111 = 0.0;
    e.clamped = true;
  }
  double p_mmm = B.p("[mu,mu,mu]");
  double zweight = std::pow(mu, 3) * std::exp(-3 * mu) * p_mmm;
  if (cm.config().extended_z_sets && !cm.config().click_filtering) {
    zweight += 3 * mu * mu * nu * std::exp(-2 * mu - nu) * B.p("[mu,mu,nu]") +
               3 * mu * nu * nu * std::exp(-mu - 2 * nu) * B.p("[mu,nu,nu]") +
               std::pow(nu, 3) * std::exp(-3 * nu) * B.p("[nu,nu,nu]");
  }
  e.s1_z_exp = zweight * y111;
  e.s1_x_exp = std::pow(2 * nu, 3) * std::exp(-6 * nu) * B.p("[2nu,2nu,2nu]") * y111;
  if (mode == FiniteMode::no_fluctuation && e.s1_z_exp > (1.0 + 1e-6) * cm.n_z())
    throw DomainError("single-photon bound exceeds the Z-basis count; cancellation in the decoy sums");

  // vacuum contribution
  double s0 = std::exp(-mu) * p_mmm * ratio(B.lo_n("[o,mu,mu]", "s0"), "[o,mu,mu]");
  if (cm.config().extended_z_sets && !cm.config().click_filtering) {
    double onn = B.lo_n("[o,nu,nu]", "s0");
    s0 += 3 * std::exp(-mu) * B.p("[mu,mu,nu]") * ratio(B.lo_n("[o,mu,nu]", "s0"), "[o,mu,nu]") +
          3 * std::exp(-mu) * B.p("[mu,nu,nu]") * ratio(onn, "[o,nu,nu]") +
          std::exp(-nu) * B.p("[nu,nu,nu]") * ratio(onn, "[o,nu,nu]");
  }
  e.s0_z_exp = s0;

  // X-basis single-photon errors; o-containing terms use half the counts
  auto x = cm.x_tally();
  double px = B.p("[2nu,2nu,2nu]");
  double e2 = std::exp(2 * nu), e4 = std::exp(4 * nu), e6 = std::exp(6 * nu);
  auto half = [&](double n, const std::string& set) { return ratio(n, set) / 2.0; };
  double tb = e6 * (px > 0.0 ? B.hi(x.m, "beta") / px : 0.0) -
              e4 * half(B.lo_n("[2nu,2nu,o]", "beta"), "[2nu,2nu,o]") -
              e4 * half(B.lo_n("[2nu,o,2nu]", "beta"), "[2nu,o,2nu]") -
              e4 * half(B.lo_n("[o,2nu,2nu]", "beta"), "[o,2nu,2nu]") +
              e2 * half(B.hi_n("[2nu,o,o]", "beta"), "[2nu,o,o]") +
              e2 * half(B.hi_n("[o,2nu,o]", "beta"), "[o,2nu,o]") +
              e2 * half(B.hi_n("[o,o,2nu]", "beta"), "[o,o,2nu]") - half(B.lo_n("[o,o,o]", "beta"), "[o,o,o]");
  e.t1_x_exp = std::exp(-6 * nu) * px * tb;
  if (e.t1_x_exp < 0.0) {
    e.t1_x_exp = 0.0;
    e.clamped = true;
  }

  if (mode == FiniteMode::no_fluctuation) {
    e.s1_z = e.s1_z_exp;
    e.s1_x = e.s1_x_exp;
    e.t1_x = e.t1_x_exp;
    e.s0_z = e.s0_z_exp;
  } else {
    e.s1_z = chernoff_observed(e.s1_z_exp, eps).lower;
    e.s1_x = chernoff_observed(e.s1_x_exp, eps).lower;
    e.t1_x = chernoff_observed(e.t1_x_exp, eps).upper;
    e.ledger.charge("beta", 3);
    e.s0_z = chernoff_observed(e.s0_z_exp, eps).lower;
    e.ledger.charge("s0");
  }

  if (!(e.s1_x > 0.0)) {
    e.e1_x = 0.5;
    e.phi_z = 0.5;
    e.phi_raw = 2.0;
    e.phi_capped = true;
    e.clamped = true;
    return e;
  }
  e.phi_raw = e.t1_x / e.s1_x;
  e.e1_x = std::min(e.phi_raw, 0.5);
  e.phi_z = e.e1_x;
  if (mode == FiniteMode::chernoff) {
    if (e.s1_z >= 1.0 && e.s1_x >= 1.0 && e.e1_x > 0.0 && e.e1_x < 0.5) {
      e.gamma = sampling_gamma_upper(e.s1_z, e.s1_x, e.e1_x, sec.eps_e);
      e.phi_z = e.e1_x + e.gamma;
      e.phi_raw += e.gamma;
    } else {
      e.phi_z = 0.5;
    }
  }
  if (!(e.phi_z < 0.5)) {
    e.phi_z = 0.5;
    e.phi_capped = true;
  }
  return e;
}

}  // namespace amdi
