#include "amdi/model.hpp"

#include <cmath>
#include <limits>

namespace amdi {

double transmittance(const ChannelModel& ch) {
  if (!(ch.distance_km >= 0.0)) throw ConfigError("distance_km must be >= 0");
  if (std::isinf(ch.distance_km)) return 0.0;
  return ch.eta_det * std::pow(10.0, -ch.alpha_db_per_km * ch.distance_km / 10.0);
}

std::uint64_t n_tc_bins(const TimingConfig& t) {
  if (t.phase_locked) return 0;
  double n = std::floor(t.t_c_s * t.clock_hz);
  if (!(n >= 0.0)) return 0;
  if (n > 1e18) return static_cast<std::uint64_t>(1e18);
  return static_cast<std::uint64_t>(n);
}

namespace {
bool in01(double x) { return x >= 0.0 && x <= 1.0; }
bool open01(double x) { return x > 0.0 && x < 1.0; }
}  // namespace

std::vector<std::string> validate(const ProtocolConfig& c) {
  std::vector<std::string> err;
  if (c.n_users < 3) err.push_back("n_users must be >= 3");
  if (c.n_users > 8) err.push_back("n_users must be <= 8");
  const auto& s = c.source;
  if (!(s.nu > 0.0)) err.push_back("source.nu must be > 0");
  if (!(s.mu > s.nu)) err.push_back("source.mu must exceed source.nu");
  if (s.o != 0.0) err.push_back("source.o must be 0");
  if (!in01(s.p_mu) || !in01(s.p_nu) || !in01(s.p_o)) err.push_back("source probabilities must lie in [0,1]");
  if (std::fabs(s.p_mu + s.p_nu + s.p_o - 1.0) > 1e-12) err.push_back("source probabilities must sum to 1");
  if (s.M < 2) err.push_back("source.M must be >= 2");
  const auto& ch = c.channel;
  if (!(ch.distance_km >= 0.0)) err.push_back("channel.distance_km must be >= 0");
  if (!(ch.alpha_db_per_km >= 0.0)) err.push_back("channel.alpha_db_per_km must be >= 0");
  if (!in01(ch.eta_det)) err.push_back("channel.eta_det must lie in [0,1]");
  if (!in01(ch.p_d)) err.push_back("channel.p_d must lie in [0,1]");
  if (!in01(ch.e_d)) err.push_back("channel.e_d must lie in [0,1]");
  const auto& t = c.timing;
  if (!(t.clock_hz > 0.0)) err.push_back("timing.clock_hz must be > 0");
  if (!t.phase_locked && !(std::floor(t.t_c_s * t.clock_hz) >= 1.0))
    err.push_back("timing.t_c_s * clock_hz must be >= 1 when not phase locked");
  const auto& e = c.security;
  for (double x : {e.eps_cor, e.eps_prime, e.eps_hat, e.eps_e, e.eps_pa, e.eps_chernoff})
    if (!open01(x)) {
      err.push_back("security epsilons must lie in (0,1)");
      break;
    }
  if (!(e.total_pulses >= 1.0)) err.push_back("security.total_pulses must be >= 1");
  if (!(e.error_correction_f >= 1.0)) err.push_back("security.error_correction_f must be >= 1");
  if (c.quad_points < 4) err.push_back("quad_points must be >= 4");
  return err;
}

void validate_or_throw(const ProtocolConfig& cfg) {
  auto err = validate(cfg);
  if (err.empty()) return;
  std::string msg;
  for (const auto& e : err) msg += (msg.empty() ? "" : "; ") + e;
  throw ConfigError(msg);
}

ProtocolConfig preset_fig3(int n_users) {
  ProtocolConfig c;
  c.n_users = n_users;
  c.timing.phase_locked = true;
  return c;
}

ProtocolConfig preset_fig4(bool phase_locked) {
  ProtocolConfig c;
  c.n_users = 3;
  c.timing.phase_locked = phase_locked;
  c.timing.t_c_s = 3e-4;
  return c;
}

ProtocolConfig preset_fig6(double pulses, bool filtering) {
  ProtocolConfig c;
  c.n_users = 3;
  c.timing.phase_locked = false;
  c.timing.t_c_s = 1e-4;
  c.security.total_pulses = pulses;
  c.click_filtering = filtering;
  c.extended_z_sets = !filtering;
  return c;
}

ProtocolConfig preset_fig7(double pulses) {
  ProtocolConfig c;
  c.n_users = 3;
  c.timing.phase_locked = true;
  c.security.total_pulses = pulses;
  return c;
}

}  // namespace amdi
