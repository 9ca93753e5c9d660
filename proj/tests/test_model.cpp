#include <cmath>
#include <limits>

#include "amdi/model.hpp"
#include "config_io.hpp"
#include "doctest.h"

using namespace amdi;

TEST_CASE("transmittance") {
  ChannelModel ch;
  CHECK(transmittance(ch) == doctest::Approx(0.85).epsilon(1e-15));
  ch.distance_km = 100.0;
  CHECK(transmittance(ch) == doctest::Approx(0.85 * std::pow(10.0, -1.6)).epsilon(1e-14));
  CHECK(transmittance(ch) == doctest::Approx(0.021353).epsilon(1e-4));
  ch.distance_km = std::numeric_limits<double>::infinity();
  CHECK(transmittance(ch) == 0.0);
  ch.distance_km = -1.0;
  CHECK_THROWS_AS(transmittance(ch), ConfigError);
}

TEST_CASE("transmittance is log-linear in distance") {
  ChannelModel ch;
  double prev = 2.0;
  for (double d = 0.0; d <= 500.0; d += 12.5) {
    ch.distance_km = d;
    double eta = transmittance(ch);
    CHECK(eta <= prev);
    CHECK(std::log10(eta / ch.eta_det) == doctest::Approx(-ch.alpha_db_per_km * d / 10.0).epsilon(1e-12));
    prev = eta;
  }
}

TEST_CASE("validation is total and catches each invariant") {
  CHECK(validate(ProtocolConfig{}).empty());
  auto bad = [](auto mutate) {
    ProtocolConfig c;
    mutate(c);
    return !validate(c).empty();
  };
  CHECK(bad([](ProtocolConfig& c) { c.source.nu = c.source.mu; }));
  CHECK(bad([](ProtocolConfig& c) { c.source.o = 0.01; }));
  CHECK(bad([](ProtocolConfig& c) { c.source.p_o = 0.3; }));
  CHECK(bad([](ProtocolConfig& c) { c.source.M = 1; }));
  CHECK(bad([](ProtocolConfig& c) { c.channel.e_d = 1.5; }));
  CHECK(bad([](ProtocolConfig& c) { c.channel.p_d = -1e-3; }));
  CHECK(bad([](ProtocolConfig& c) { c.n_users = 2; }));
  CHECK(bad([](ProtocolConfig& c) { c.security.eps_pa = 0.0; }));
  CHECK(bad([](ProtocolConfig& c) { c.security.error_correction_f = 0.9; }));
  CHECK(bad([](ProtocolConfig& c) {
    c.timing.phase_locked = false;
    c.timing.t_c_s = 1e-12;
  }));
  CHECK(bad([](ProtocolConfig& c) { c.source.mu = std::nan(""); }));
  ProtocolConfig c;
  c.n_users = 2;
  CHECK_THROWS_AS(validate_or_throw(c), ConfigError);
}

TEST_CASE("n_tc_bins") {
  TimingConfig t;
  CHECK(n_tc_bins(t) == 0);
  t.phase_locked = false;
  t.t_c_s = 1e-4;
  CHECK(n_tc_bins(t) == 400000);
}

TEST_CASE("config text round trip") {
  auto c = preset_fig6(1e14, true);
  c.channel.distance_km = 123.25;
  c.source.mu = 0.1 + 0.2;  // not exactly representable in short decimal
  auto text = tools::dump_config(c);
  auto d = tools::parse_config(text, ProtocolConfig{});
  CHECK(tools::dump_config(d) == text);
  CHECK(d.source.mu == c.source.mu);
  CHECK(d.click_filtering);
  CHECK_FALSE(d.timing.phase_locked);
}

TEST_CASE("config overrides keep unspecified fields") {
  auto base = preset_fig3(4);
  auto c = tools::parse_config("channel:\n  e_d: 0.02\nsource:\n  M: 32\n", base);
  CHECK(c.n_users == 4);
  CHECK(c.channel.e_d == 0.02);
  CHECK(c.source.M == 32);
  CHECK(c.channel.alpha_db_per_km == base.channel.alpha_db_per_km);
}

TEST_CASE("config errors") {
  ProtocolConfig b;
  CHECK_THROWS_AS(tools::parse_config("channel:\n  e_dd: 0.02\n", b), ConfigError);
  CHECK_THROWS_AS(tools::parse_config("bogus: 1\n", b), ConfigError);
  CHECK_THROWS_AS(tools::parse_config("source:\n  mu: abc\n", b), ConfigError);
  CHECK_THROWS_AS(tools::parse_config("source: [1, 2]\n", b), ConfigError);
  CHECK_THROWS_AS(tools::parse_config("a: [", b), ConfigError);
  CHECK_THROWS_AS(tools::load_config("/nonexistent/x.yaml", b), ConfigError);
}

TEST_CASE("manifest hash ignores timestamp and tracks inputs") {
  tools::RunManifest a{"scan", tools::dump_config(ProtocolConfig{}), 1, "asymptotic", "t0"};
  auto b = a;
  b.timestamp = "t1";
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 40);
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  // hashed text is "\n\nseed: 0\nmode: \n"; digest from an independent SHA-1
  tools::RunManifest e{"", "", 0, "", ""};
  CHECK(e.hash() == "1242dbf2d055d44c7770fdceafb595194bd13aad");
}
