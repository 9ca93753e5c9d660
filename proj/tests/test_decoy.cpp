#include <cmath>

#include "amdi/decoy.hpp"
#include "amdi/fock.hpp"
#include "doctest.h"

using namespace amdi;

namespace {
// finite-key configuration near the 100 km optimum
ProtocolConfig fig6_tuned(double km, double pulses = 1e16) {
  auto c = preset_fig6(pulses, true);
  c.channel.distance_km = km;
  c.source.mu = 0.29;
  c.source.nu = 0.0085;
  c.source.p_mu = 0.18;
  c.source.p_nu = 0.2;
  c.source.p_o = 0.62;
  c.timing.t_c_s = 2.3e-6;
  return c;
}

ProtocolConfig at(double km, int n = 3) {
  auto c = preset_fig3(n);
  c.channel.distance_km = km;
  return c;
}
}  // namespace

TEST_CASE("generic and closed s1z agree") {
  for (int n : {3, 4})
    for (double d : {0.0, 50.0, 150.0, 350.0}) {
      auto c = at(d, n);
      c.channel.p_d = 1e-6;
      CountModel cm(c);
      CHECK(asymptotic_s1_z(cm) == doctest::Approx(asymptotic_s1_z_closed(cm)).epsilon(1e-12));
    }
}

TEST_CASE("s1z without dark counts is the all-y10 term") {
  auto c = at(40.0);
  c.channel.p_d = 0.0;
  CountModel cm(c);
  const auto& s = c.source;
  double y10 = single_photon_yields(cm.link()).y10;
  // per user: one mu photon, vacuum in the other slot, and no click from the
  // user's light elsewhere
  double per = s.p_mu * s.p_o * s.mu * std::exp(-s.mu) * cm.p_nc();
  double expect = cm.n_tot() * std::pow(per, 3) * 2.0 * std::pow(y10, 3) / std::pow(cm.q_port(), 3);
  CHECK(asymptotic_s1_z(cm) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("s1z vanishes without signal or vacuum") {
  auto c = at(40.0);
  c.source.p_mu = 0.0;
  c.source.p_o = 0.75;
  CHECK(asymptotic_s1_z(CountModel(c)) == 0.0);
  c = at(40.0);
  c.source.p_o = 0.0;
  c.source.p_nu = 0.5;
  CHECK(asymptotic_s1_z(CountModel(c)) == 0.0);
}

TEST_CASE("single-photon X errors at the extremes") {
  for (int n : {3, 4}) {
    auto c = at(30.0, n);
    c.channel.p_d = 0.0;
    c.channel.e_d = 0.0;
    auto e = asymptotic_estimates(CountModel(c));
    CHECK(e.t1_x == 0.0);
    CHECK(e.phi_z < 1e-12);
    c.channel.e_d = 1.0;
    e = asymptotic_estimates(CountModel(c));
    CHECK(e.e1_x == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("t1x follows the Fock-enumerated pattern classes") {
  auto c = preset_fig3(3);
  c.channel.eta_det = 0.5;
  c.channel.p_d = 1e-8;
  auto c0 = c;
  c0.channel.e_d = 0.0;
  c.channel.e_d = 0.012;
  double t = asymptotic_t1_x(CountModel(c)), t0 = asymptotic_t1_x(CountModel(c0));
  // the X-set photons reach each port through a 1x2 splitter: eta/2 per arm
  auto dist = propagate(ring_x_input({0.0, 0.0, 0.0}), 3, Link{0.25, 1e-8});
  double err = 0.0, cor = 0.0;
  for (unsigned b = 0; b < 8; ++b) (parity(b) ? err : cor) += pattern_probability(dist, b, 3);
  CHECK(t / t0 == doctest::Approx((0.988 * err + 0.012 * cor) / err).epsilon(1e-9));
}

TEST_CASE("asymptotic sanity") {
  for (double d : {0.0, 100.0, 250.0}) {
    CountModel cm(at(d));
    auto e = asymptotic_estimates(cm);
    CHECK(e.s1_z <= cm.n_z());
    CHECK(e.t1_x <= cm.x_tally().n);
    CHECK(e.t1_x <= e.s1_x);
    CHECK(e.provenance == Provenance::asymptotic);
  }
}

TEST_CASE("finite bounds at 100 km are usable") {
  auto c = fig6_tuned(100.0);
  CountModel cm(c);
  auto f = finite_bounds_3user(cm, c.security);
  CHECK(f.s1_z > 0.0);
  CHECK(f.s1_x > 0.0);
  CHECK(f.phi_z < 0.5);
  CHECK(f.provenance == Provenance::finite);
  CHECK(f.ledger.count("s0") == 2);
  CHECK(f.ledger.count("s111") == 15);
}

TEST_CASE("extended Z sets charge the full vacuum allocation") {
  auto c = preset_fig6(1e16, false);
  c.channel.distance_km = 100.0;
  auto f = finite_bounds_3user(CountModel(c), c.security);
  CHECK(f.ledger.count("s0") == 4);
  CHECK(f.ledger.count("s111") == 15);
}

TEST_CASE("finite bounds tighten with more pulses") {
  auto c = fig6_tuned(60.0);
  double prev_s = 0.0, prev_phi = 1.0;
  for (double n : {1e12, 1e14, 1e16, 1e18}) {
    c.security.total_pulses = n;
    auto f = finite_bounds_3user(CountModel(c), c.security);
    CHECK(f.s1_z / n > prev_s);
    CHECK(f.phi_z < prev_phi);
    prev_s = f.s1_z / n;
    prev_phi = f.phi_z;
  }
}

TEST_CASE("finite bounds converge to the fluctuation-free ones") {
  auto c = fig6_tuned(50.0, 1e20);
  CountModel cm(c);
  auto f = finite_bounds_3user(cm, c.security, FiniteMode::chernoff);
  auto g = finite_bounds_3user(cm, c.security, FiniteMode::no_fluctuation);
  CHECK(f.s1_z == doctest::Approx(g.s1_z).epsilon(0.01));
  CHECK(f.s1_x == doctest::Approx(g.s1_x).epsilon(0.01));
  CHECK(f.phi_z == doctest::Approx(g.phi_z).epsilon(0.01));
}

TEST_CASE("no counts, no key") {
  auto c = preset_fig6(1e16, true);
  c.channel.distance_km = 3000.0;
  auto f = finite_bounds_3user(CountModel(c), c.security);
  CHECK(f.s1_z == 0.0);
  CHECK(f.s0_z == 0.0);
  CHECK(f.clamped);
}

TEST_CASE("decoy intensity guard") {
  auto c = preset_fig6(1e16, true);
  c.source.nu = 1e-5;
  CHECK_THROWS_AS(finite_bounds_3user(CountModel(c), c.security), DomainError);
}
