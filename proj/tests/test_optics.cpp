#include <cmath>
#include <numbers>
#include <random>

#include "amdi/fock.hpp"
#include "amdi/optics.hpp"
#include "checks.hpp"
#include "doctest.h"

using namespace amdi;

TEST_CASE("Bessel I0 against 40-digit values") {
  CHECK(bessel_i0(0.0) == 1.0);
  CHECK(bessel_i0(0.5) == doctest::Approx(1.0634833707413235193).epsilon(1e-15));
  CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520083356).epsilon(1e-15));
  CHECK(bessel_i0(2.0) == doctest::Approx(2.2795853023360673).epsilon(1e-15));
  CHECK(bessel_i0(5.0) == doctest::Approx(27.239871823604446895).epsilon(1e-15));
  CHECK(bessel_i0(30.0) == doctest::Approx(781672297823.97748972).epsilon(1e-14));
  CHECK(bessel_i0m1(1e-6) == doctest::Approx(2.5000000000001560237e-13).epsilon(1e-14));
  CHECK(bessel_i0m1(0.5) == doctest::Approx(0.063483370741323519263).epsilon(1e-14));
  CHECK(bessel_i0m1(5.0) == doctest::Approx(26.239871823604446895).epsilon(1e-14));
  CHECK(bessel_i0(-1.0) == bessel_i0(1.0));
}

TEST_CASE("detector click probabilities") {
  Link l{0.3, 0.0};
  auto v = detector_click_probs({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, l);
  for (auto& d : v) {
    CHECK(d.left == 0.0);
    CHECK(d.right == 0.0);
  }
  const double k = 0.4, pi = std::numbers::pi;
  v = detector_click_probs({k, k, k}, {pi, pi, pi}, l);
  CHECK(std::abs(v[0].left) < 1e-16);
  CHECK(v[0].right == doctest::Approx(1.0 - std::exp(-l.eta * k)).epsilon(1e-14));

  Link l2{0.02, 1e-10};
  v = detector_click_probs({0.1, 0.1, 0.1}, {0.0, 0.0, 0.0}, l2);
  CHECK(v[0].left == doctest::Approx(1.0 - (1.0 - 1e-10) * std::exp(-0.002)).epsilon(1e-12));
  CHECK(v[0].right == doctest::Approx(1e-10).epsilon(1e-9));
  CHECK_THROWS(detector_click_probs({0.1, 0.1, 0.1}, {0.0}, l2));
}

TEST_CASE("single click at pi/2 is symmetric") {
  Link l{0.1, 1e-7};
  IntensityVector k{0.3, 0.3, 0.3};
  auto [L, R] = single_click_prob_phase(k, 0, std::numbers::pi / 2, l);
  CHECK(L == doctest::Approx(R).epsilon(1e-14));
  CHECK(port_click_prob({0.0, 0.0, 0.0}, 0, Link{0.1, 0.0}) == 0.0);
  CHECK(total_click_prob({0.0, 0.0, 0.0}, Link{0.1, 0.0}) == 0.0);
}

TEST_CASE("phase-averaged port probability equals the average of the phase form") {
  Link l{0.2, 1e-6};
  IntensityVector k{0.4, 0.1, 0.0};
  const int P = 2000;
  double avg = 0.0;
  for (int p = 0; p < P; ++p) {
    auto [L, R] = single_click_prob_phase(k, 0, 2 * std::numbers::pi * (p + 0.5) / P, l);
    avg += (L + R) / P;
  }
  CHECK(port_click_prob(k, 0, l) == doctest::Approx(avg).epsilon(1e-12));
}

TEST_CASE("q_tot against Monte Carlo over intensities and phases") {
  SourceConfig s;
  s.mu = 0.1;
  s.nu = 0.02;
  s.p_mu = s.p_nu = s.p_o = 1.0 / 3.0;
  Link l{0.01, 0.0};
  const int n = 3;
  double q = q_tot_port(n, s, l);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> ph(0.0, 2 * std::numbers::pi);
  const double vals[3] = {s.mu, s.nu, 0.0};
  const int samples = 2000000;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < samples; ++t) {
    IntensityVector k(n);
    std::vector<double> phi(n), th(n);
    for (int j = 0; j < n; ++j) {
      k[j] = vals[pick(rng)];
      phi[j] = ph(rng);
    }
    for (int j = 0; j < n; ++j) th[j] = phi[(j + 1) % n] - phi[j];
    auto d = detector_click_probs(k, th, l);
    // exactly one of the 2N detectors fires and it belongs to port 0
    double none_else = 1.0;
    for (int j = 1; j < n; ++j) none_else *= (1.0 - d[j].left) * (1.0 - d[j].right);
    double v = none_else * (d[0].left * (1.0 - d[0].right) + d[0].right * (1.0 - d[0].left));
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / samples, sd = std::sqrt((sum2 / samples - mean * mean) / samples);
  INFO("analytic " << q << " MC " << mean << " +- " << sd);
  CHECK(std::abs(q - mean) < 3.0 * sd);
  CHECK(q_tot(n, s, l) == doctest::Approx(3.0 * q));
}

TEST_CASE("single-photon yields") {
  Link l{0.4, 0.0};
  auto y = single_photon_yields(l);
  CHECK(y.y00 == 0.0);
  CHECK(y.y10 == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(y.y01 == doctest::Approx(0.2).epsilon(1e-15));
  // the exact two-photon yield; the printed variant drops part of it
  CHECK(y.y11 == doctest::Approx(2 * 0.2 * 0.8 + 0.04).epsilon(1e-15));
  CHECK(y.y11 == doctest::Approx(port_yield_oracle(1, 1, l)).epsilon(1e-14));
  auto pr = single_photon_yields(l, YieldForm::printed);
  CHECK(pr.y11 == doctest::Approx(2 * 0.2 * 0.6 + 0.02).epsilon(1e-15));
}

TEST_CASE("pattern yields without dark counts") {
  const double eta = 0.3;
  Link l{eta, 0.0};
  auto p3 = pattern_yields(3, l);
  CHECK(p3.at("RRR") == 0.0);
  CHECK(p3.at("LLL") == doctest::Approx(std::pow(eta, 3) / 16).epsilon(1e-14));
  auto p4 = pattern_yields(4, l);
  CHECK(p4.at("RLLL") == 0.0);
  CHECK(p4.at("LLLL") == doctest::Approx(std::pow(eta, 4) / 64).epsilon(1e-14));
}

TEST_CASE("general-N routing sum matches the closed forms") {
  for (double eta : {0.05, 0.5, 0.85})
    for (double pd : {0.0, 1e-6, 1e-3}) {
      Link l{eta, pd};
      for (int n : {3, 4})
        for (bool c : {true, false})
          CHECK(pattern_yield_routing_sum(n, c, l) == doctest::Approx(pattern_yield_class(n, c, l)).epsilon(1e-12));
    }
}

TEST_CASE("closed forms equal the Fock oracle on the 20-point grid") {
  auto r = tools::check_oracle_equivalence(20, 1e-10);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("Fock oracle basics") {
  FockState vac;
  vac.n_modes = 6;
  vac.amp[Occupation(6, 0)] = 1.0;
  auto d = propagate(vac, 3, Link{0.5, 0.0});
  CHECK(d.at(0u) == doctest::Approx(1.0));

  // lossless network preserves the norm
  auto in = ring_x_input({0.3, 1.1, 2.0});
  auto out = apply_network(in, ring_network(3), 6);
  CHECK(out.norm2() == doctest::Approx(1.0).epsilon(1e-13));

  // eta = 1, no darks, zero global phase: no error-class pattern
  auto dist = propagate(ring_x_input({0.0, 0.0, 0.0}), 3, Link{1.0, 0.0});
  for (unsigned b = 0; b < 8; ++b)
    if (parity(b) == 1) CHECK(pattern_probability(dist, b, 3) == doctest::Approx(0.0).epsilon(1e-15));

  // every click mask sums to one
  double tot = 0.0;
  for (auto& [m, p] : propagate(ring_x_input({0.0, 0.0, 0.0}), 3, Link{0.4, 1e-3})) tot += p;
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));

  FockState big;
  big.n_modes = 6;
  big.amp[Occupation{3, 3, 0, 0, 0, 0}] = 1.0;
  CHECK_THROWS_AS(propagate(big, 3, Link{0.5, 0.0}, 4), CapacityError);
}

TEST_CASE("parity of N-fold coincidences") {
  auto a = parity_rule_check(3, 0.0);
  CHECK(a.ok);
  CHECK(a.expected_parity == 0);
  auto b = parity_rule_check(3, std::numbers::pi);
  CHECK(b.ok);
  CHECK(b.expected_parity == 1);
  // for four users the (N-1 mod 2) rule disagrees with the enumeration
  auto c = parity_rule_check(4, 0.0);
  CHECK(c.ok);
  CHECK(c.expected_parity == 0);
  CHECK(c.printed_rule_parity == 1);
  for (int p : c.observed) CHECK(p == 0);
  CHECK(parity_rule_check(4, std::numbers::pi).ok);
}
