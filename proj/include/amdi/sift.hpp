#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "amdi/model.hpp"
#include "amdi/optics.hpp"

namespace amdi {

struct InvalidEvent : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// single-slot intensity
enum class Level : int { o = 0, nu = 1, mu = 2 };

// per-user total intensity k^e + k^l
enum class Tot : int { o, nu, mu, nu2, mu2, munu };

using IntensitySet = std::vector<Tot>;

std::string set_name(const IntensitySet& k);  // e.g. "[mu,mu,o]"
IntensitySet parse_set(const std::string& s);
IntensitySet uniform_set(int n_users, Tot t);

// (early, late) decompositions of a total
std::vector<std::pair<Level, Level>> splits_of(Tot t);

enum class Basis { Z, X, discard };

// theta_slices: m_i with theta_i^d = 2 pi m_i / M
Basis assign_basis(const IntensitySet& k, const std::vector<int>& theta_slices, int M, bool extended_z = false);

// theta_g_mod = (theta_g^d / pi) mod 2 when that is an integer, otherwise any
// other value. r_i = 0 for L_i, 1 for R_i. Returns per-user bits.
std::optional<std::vector<int>> key_map(int theta_g_mod, const std::vector<int>& r);

enum class Frame { X, Y, none };

struct DetailedKey {
  std::vector<double> vartheta;  // reference phase in [0, pi)
  std::vector<int> kappa;
  Frame frame = Frame::none;
  std::optional<int> theta_g_ref_mod;  // (sum vartheta / pi) mod 2 when integral

  // U_1's bit: kappa_1 xor r_1 xor ... xor r_N xor theta_g_ref_mod
  std::optional<int> u1_bit(const std::vector<int>& r) const;
};

DetailedKey key_map_detailed(const std::vector<int>& theta_slices, int M);

// 0 when the early slot carries the pulse, 1 when the late one does
int z_bit_assign(Level k_e, Level k_l);

struct PhaseAverage {
  double total = 0.0;  // < prod_i (L_i + R_i) >
  double odd = 0.0;    // odd number of R clicks
  double even = 0.0;
};

struct XTally {
  double n = 0.0, m = 0.0;
  bool quad_warning = false;
  double quad_rel_change = 0.0;  // |I_P - I_{P/2}| / |I_P| on m
};

// All expected counts for one configuration. Ports are symmetric.
class CountModel {
 public:
  explicit CountModel(const ProtocolConfig& cfg);

  const ProtocolConfig& config() const { return cfg_; }
  const Link& link() const { return link_; }
  const PortModel& port() const { return port_; }
  int n_users() const { return cfg_.n_users; }

  double value(Level l) const;
  double prob(Level l) const;

  // raw single-port click probability and the one left after filtering
  double q_port_raw() const { return q_raw_; }
  double q_port() const { return q_eff_; }
  double survival() const { return surv_; }  // per-port p_s, 1 when filtering is off
  double n_tot() const { return n_tot_; }
  double delta() const { return delta_; }
  double p_nc() const;
  double mean_intensity() const;

  // joint port term q_ab with filtered pairs removed
  double q_pair(Level a, Level b) const;
  bool filtered(Level a, Level b) const;

  // expected paired events of intensity set K (phase averaged, no phase sifting)
  double n_set(const IntensitySet& k) const;
  // p_K: sum over splits of prod p_e p_l; the all-2nu set is 2 p_nu^{2N}/M.
  // With filtering, removed splits are dropped and the result divided by p_s^N.
  double p_set(const IntensitySet& k) const;

  std::vector<IntensitySet> z_sets() const;
  double n_z() const;
  // marginal Z errors between user 1 and user i (0-based i >= 1)
  double m_z(int i) const;
  double e_z_max() const;

  // average over the N-1 free port phases with theta_1 = delta - sum_{i>1} theta_i;
  // port i carries (a_i, b_i) = (late of user i, early of user i+1);
  // extra_phase is added to delta (pi for frames with two Y users)
  PhaseAverage phase_average(const std::vector<std::pair<double, double>>& port_ab, int points,
                             double extra_phase = 0.0) const;

  // X set [2nu,...,2nu] after phase sifting
  XTally x_tally() const;

 private:
  ProtocolConfig cfg_;
  Link link_;
  PortModel port_;
  double q_raw_ = 0.0, q_eff_ = 0.0, surv_ = 1.0, n_tot_ = 0.0, delta_ = 0.0;
  std::array<std::array<double, 3>, 3> q_tab_{};
};

struct SiftedTallies {
  int n_users = 3;
  double n_tot = 0.0;
  double q_port = 0.0;
  double survival = 1.0;
  double delta = 0.0;
  std::map<std::string, double> n;  // by set name
  double n_z = 0.0, m_z = 0.0, e_z = 0.0;
  double n_x = 0.0, m_x = 0.0, qber_x = 0.0;
  bool quad_warning = false;
};

// n_K for every set built from {o, nu, mu, 2nu} per user plus the Z and X tallies
SiftedTallies expected_counts(const ProtocolConfig& cfg);
SiftedTallies expected_counts(const CountModel& cm);

// per-port fraction of clicks kept by click filtering; 1 when filtering is off
double click_filter_survival(const ProtocolConfig& cfg);

// T_mean (2 pi df + omega) + pi/M with T_mean = T_c/2; pi/M when phase locked
double phase_misalignment(const ProtocolConfig& cfg);

}  // namespace amdi
