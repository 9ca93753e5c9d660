#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace amdi {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// intensities are per-pulse mean photon numbers before channel loss
struct SourceConfig {
  double mu = 0.4;
  double nu = 0.1;
  double o = 0.0;
  double p_mu = 0.5;
  double p_nu = 0.25;
  double p_o = 0.25;
  int M = 16;
};

struct ChannelModel {
  double distance_km = 0.0;
  double alpha_db_per_km = 0.16;
  double eta_det = 0.85;
  double p_d = 1e-10;
  double e_d = 0.012;
};

struct TimingConfig {
  double clock_hz = 4e9;
  double delta_f_hz = 10.0;
  double omega_fiber_rad_s = 3000.0;
  double t_c_s = 3e-4;
  bool phase_locked = true;
};

struct SecurityParams {
  double eps_cor = 1e-7;
  double eps_prime = 1e-7;
  double eps_hat = 1e-7;
  double eps_e = 1e-7;
  double eps_pa = 1e-7;
  double eps_chernoff = 1e-7;
  double total_pulses = 1e16;
  double error_correction_f = 1.02;
};

struct ProtocolConfig {
  int n_users = 3;
  SourceConfig source;
  ChannelModel channel;
  TimingConfig timing;
  SecurityParams security;
  bool click_filtering = false;
  bool extended_z_sets = false;
  int quad_points = 64;  // per phase axis
};

// eta_det * 10^(-alpha d / 10); throws ConfigError for negative distance
double transmittance(const ChannelModel& ch);

// number of time bins inside T_c; 0 when phase locked (treated as unbounded)
std::uint64_t n_tc_bins(const TimingConfig& t);

// total: never throws, returns one message per violated invariant
std::vector<std::string> validate(const ProtocolConfig& cfg);
void validate_or_throw(const ProtocolConfig& cfg);

// Fig-caption parameter bundles
ProtocolConfig preset_fig3(int n_users);
ProtocolConfig preset_fig4(bool phase_locked);
ProtocolConfig preset_fig6(double pulses, bool filtering);
ProtocolConfig preset_fig7(double pulses);

}  // namespace amdi
