#include <cmath>
#include <numbers>

#include "amdi/sift.hpp"
#include "doctest.h"

using namespace amdi;

TEST_CASE("basis assignment") {
  const int M = 16;
  CHECK(assign_basis(parse_set("[mu,mu,mu]"), {3, 5, 1}, M) == Basis::Z);
  CHECK(assign_basis(parse_set("[2nu,2nu,2nu]"), {8, 0, 0}, M) == Basis::X);
  CHECK(assign_basis(parse_set("[2nu,2nu,2nu]"), {4, 4, 8}, M) == Basis::X);
  CHECK(assign_basis(parse_set("[2nu,2nu,2nu]"), {1, 0, 0}, M) == Basis::discard);
  CHECK(assign_basis(parse_set("[2nu,2nu,mu+nu]"), {0, 0, 0}, M) == Basis::discard);
  CHECK(assign_basis(parse_set("[mu,mu,nu]"), {0, 0, 0}, M) == Basis::discard);
  CHECK(assign_basis(parse_set("[mu,mu,nu]"), {0, 0, 0}, M, true) == Basis::Z);
}

TEST_CASE("set names round trip") {
  for (const char* s : {"[mu,mu,mu]", "[2nu,o,mu+nu]", "[2mu,nu,o,2nu]"}) CHECK(set_name(parse_set(s)) == s);
  CHECK_THROWS(parse_set("mu,mu"));
  CHECK_THROWS(parse_set("[mu,3nu]"));
}

TEST_CASE("key mapping table") {
  CHECK(*key_map(0, {0, 0, 0}) == std::vector<int>{0, 0, 0});
  CHECK(*key_map(1, {0, 0, 0}) == std::vector<int>{1, 0, 0});
  CHECK_FALSE(key_map(2, {0, 0, 0}).has_value());
  CHECK_FALSE(key_map(-1, {0, 0, 0}).has_value());
}

TEST_CASE("key mapping parity over all patterns") {
  for (int n : {3, 4, 5})
    for (int g : {0, 1})
      for (unsigned b = 0; b < (1u << n); ++b) {
        std::vector<int> r(n);
        int x = g;
        for (int i = 0; i < n; ++i) {
          r[i] = (b >> i) & 1;
          x ^= r[i];
        }
        auto bits = key_map(g, r);
        REQUIRE(bits);
        int acc = 0;
        for (int v : *bits) acc ^= v;
        CHECK(acc == x);
      }
}

TEST_CASE("phase decomposition") {
  const int M = 16;
  auto a = key_map_detailed({0, 8, 12}, M);
  CHECK(a.vartheta[0] == 0.0);
  CHECK(a.kappa[0] == 0);
  CHECK(a.vartheta[1] == 0.0);
  CHECK(a.kappa[1] == 1);
  CHECK(a.vartheta[2] == doctest::Approx(std::numbers::pi / 2));
  CHECK(a.kappa[2] == 1);
  CHECK(a.frame == Frame::none);
  CHECK(key_map_detailed({0, 8, 0}, M).frame == Frame::X);
  CHECK(key_map_detailed({4, 12, 4}, M).frame == Frame::Y);
  // frames are disjoint over the whole grid
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      auto d = key_map_detailed({i, j, 0}, M);
      if (d.frame == Frame::Y) FAIL("user 3 at 0 cannot be in the Y frame");
      auto e = key_map_detailed({i, j, 4}, M);
      CHECK(e.frame != Frame::X);
    }
  auto u = key_map_detailed({8, 0, 0}, M);
  REQUIRE(u.theta_g_ref_mod);
  CHECK(*u.u1_bit({0, 0, 0}) == 1);
  CHECK(*u.u1_bit({1, 0, 0}) == 0);
}

TEST_CASE("Z bit") {
  CHECK(z_bit_assign(Level::mu, Level::o) == 0);
  CHECK(z_bit_assign(Level::o, Level::mu) == 1);
  CHECK(z_bit_assign(Level::nu, Level::o) == 0);
  CHECK_THROWS_AS(z_bit_assign(Level::mu, Level::mu), InvalidEvent);
  CHECK_THROWS_AS(z_bit_assign(Level::o, Level::o), InvalidEvent);
}

TEST_CASE("misalignment") {
  ProtocolConfig c;
  CHECK(phase_misalignment(c) == doctest::Approx(std::numbers::pi / 16));
  c.timing.phase_locked = false;
  c.timing.t_c_s = 1e-4;
  CHECK(phase_misalignment(c) ==
        doctest::Approx(std::numbers::pi / 16 + 0.5e-4 * (2 * std::numbers::pi * 10 + 3000)));
}

TEST_CASE("set probabilities") {
  ProtocolConfig c;
  CountModel cm(c);
  CHECK(cm.p_set(parse_set("[mu,mu,mu]")) == doctest::Approx(std::pow(2 * 0.5 * 0.25, 3)));
  CHECK(cm.p_set(parse_set("[2nu,2nu,2nu]")) == doctest::Approx(2 * std::pow(0.25, 6) / 16));
  CHECK(cm.p_set(parse_set("[o,o,o]")) == doctest::Approx(std::pow(0.25, 6)));
}

TEST_CASE("intrinsic X QBER") {
  for (auto [n, target] : {std::pair{3, 0.375}, std::pair{4, 3.0 / 7.0}}) {
    ProtocolConfig c;
    c.n_users = n;
    c.channel.distance_km = 10.0;
    c.channel.e_d = 0.0;
    c.channel.p_d = 0.0;
    auto t = expected_counts(c);
    INFO("N=" << n << " qber " << t.qber_x);
    CHECK(t.qber_x == doctest::Approx(target).epsilon(0.03));
    CHECK_FALSE(t.quad_warning);
  }
}

TEST_CASE("count bookkeeping") {
  ProtocolConfig c;
  c.channel.distance_km = 50.0;
  c.channel.p_d = 0.0;
  auto t = expected_counts(c);
  double sum = 0.0;
  for (auto& [k, v] : t.n) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum <= t.n_tot * (1 + 1e-12));
  CHECK(t.n.at("[o,o,o]") == 0.0);
  CHECK(t.m_z <= t.n_z);
  CHECK(t.m_x <= t.n_x);
  CHECK(t.e_z >= 0.0);
}

TEST_CASE("quadrature resolution") {
  ProtocolConfig c;
  c.channel.distance_km = 80.0;
  auto a = expected_counts(c);
  c.quad_points = 128;
  auto b = expected_counts(c);
  CHECK(a.qber_x == doctest::Approx(b.qber_x).epsilon(1e-6));
}

TEST_CASE("click filtering survival") {
  ProtocolConfig c;
  CHECK(click_filter_survival(c) == 1.0);
  c.click_filtering = true;
  double ps = click_filter_survival(c);
  CHECK(ps > 0.0);
  CHECK(ps < 1.0);
  // direct enumeration over the port's input pairs
  CountModel cm(c);
  const auto& pm = cm.port();
  double keep = 0.0, all = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double w = pm.choice.prob[a] * pm.choice.prob[b] * pm.q_pair(pm.choice.value[a], pm.choice.value[b]);
      all += w;
      bool mixed = (a == 0 && b == 1) || (a == 1 && b == 0);
      if (!mixed) keep += w;
    }
  CHECK(ps == doctest::Approx(keep / all).epsilon(1e-12));
  c.source.p_nu = 0.0;
  c.source.p_o = 0.5;
  CHECK(click_filter_survival(c) == doctest::Approx(1.0).epsilon(1e-15));
}
