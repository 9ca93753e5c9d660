#include <cmath>
#include <random>

#include "amdi/stats.hpp"
#include "checks.hpp"
#include "doctest.h"

using namespace amdi;

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.11) == doctest::Approx(0.49991595816452799564).epsilon(1e-14));
  CHECK(binary_entropy(0.2) == doctest::Approx(binary_entropy(0.8)).epsilon(1e-15));
  CHECK(binary_entropy(1e-300) >= 0.0);
  CHECK_THROWS_AS(binary_entropy(-0.1), DomainError);
  CHECK_THROWS_AS(binary_entropy(1.1), DomainError);
}

TEST_CASE("Chernoff forms at x = 1000, eps = 1e-7") {
  // 40-digit reference evaluation
  auto o = chernoff_observed(1000.0, 1e-7);
  CHECK(o.upper == doctest::Approx(1187.7842256770256025).epsilon(1e-14));
  CHECK(o.lower == doctest::Approx(820.45560075035300735).epsilon(1e-14));
  auto e = chernoff_expected(1000.0, 1e-7);
  CHECK(e.upper == doctest::Approx(1196.3845215580863534).epsilon(1e-14));
  CHECK(e.lower == doctest::Approx(812.21577432297439754).epsilon(1e-14));
}

TEST_CASE("Chernoff bounds bracket and clamp") {
  for (double x : {0.0, 0.5, 3.0, 1e3, 1e9}) {
    auto o = chernoff_observed(x, 1e-7);
    auto e = chernoff_expected(x, 1e-7);
    CHECK(o.lower <= x);
    CHECK(o.upper >= x);
    CHECK(e.lower <= x);
    CHECK(e.upper >= x);
    CHECK(o.lower >= 0.0);
    CHECK(e.lower >= 0.0);
  }
  CHECK(chernoff_observed(0.0, 1e-7).lower == 0.0);
  CHECK_THROWS_AS(chernoff_observed(-1.0, 1e-7), DomainError);
  CHECK_THROWS_AS(chernoff_expected(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(chernoff_expected(1.0, 1.0), DomainError);
}

TEST_CASE("Chernoff relative width shrinks with counts") {
  double prev = 1e300;
  for (double x = 10.0; x < 1e12; x *= 10.0) {
    auto b = chernoff_expected(x, 1e-7);
    double w = (b.upper - b.lower) / x;
    CHECK(w < prev);
    prev = w;
  }
}

TEST_CASE("gamma^U reference values") {
  CHECK(sampling_gamma_upper(1e6, 1e6, 0.05, 1e-7) == doctest::Approx(0.0013986583905514875536).epsilon(1e-12));
  CHECK(sampling_gamma_upper(1e4, 1e7, 0.1, 1e-10) == doctest::Approx(0.019876147285365221359).epsilon(1e-12));
  // large-sample limit
  CHECK(sampling_gamma_upper(1e9, 1e9, 0.05, 1e-7) == doctest::Approx(3.5705421113997521985e-5).epsilon(1e-10));
  CHECK(sampling_gamma_upper(1e9, 1e9, 0.05, 1e-7) < 1e-4);
}

TEST_CASE("gamma^U is symmetric in n and k") {
  CHECK(sampling_gamma_upper(1e5, 3e6, 0.2, 1e-7) == doctest::Approx(sampling_gamma_upper(3e6, 1e5, 0.2, 1e-7)));
}

TEST_CASE("gamma^U domain") {
  CHECK_THROWS_AS(sampling_gamma_upper(0.5, 10, 0.1, 1e-7), DomainError);
  CHECK_THROWS_AS(sampling_gamma_upper(10, 10, 0.0, 1e-7), DomainError);
  CHECK_THROWS_AS(sampling_gamma_upper(10, 10, 1.0, 1e-7), DomainError);
  CHECK_THROWS_AS(sampling_gamma_upper(10, 10, 0.1, 0.0), DomainError);
}

TEST_CASE("gamma^U positive and monotone on the grid") {
  auto r = tools::check_gamma_grid();
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("Chernoff coverage at eps = 0.01") {
  auto r = tools::check_chernoff_coverage(20000, 1e-2, 99);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("eps ledger") {
  EpsLedger l;
  CHECK(l.total() == 0);
  l.charge("s0");
  l.charge("s111", 15);
  l.charge("s0");
  CHECK(l.count("s0") == 2);
  CHECK(l.count("s111") == 15);
  CHECK(l.count("none") == 0);
  CHECK(l.total() == 17);
}
