#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amdi/model.hpp"

namespace amdi {

// lumped transmittance and dark count probability of one arm
struct Link {
  double eta = 0.0;
  double p_d = 0.0;
};

Link link_of(const ChannelModel& ch);

using IntensityVector = std::vector<double>;

struct DetectorPair {
  double left = 0.0;   // E_{L_i}
  double right = 0.0;  // E_{R_i}
};

double bessel_i0(double x);
// I0(x) - 1 without cancellation at small x
double bessel_i0m1(double x);

// port i mixes users i and i+1 (cyclic)
double port_alpha(const IntensityVector& k, int i, double eta);
double port_beta(const IntensityVector& k, int i, double eta);

std::vector<DetectorPair> detector_click_probs(const IntensityVector& k, const std::vector<double>& theta_hat,
                                               const Link& link);

// probability that exactly detector L_i (first) or R_i (second) fires network-wide
std::pair<double, double> single_click_prob_phase(const IntensityVector& k, int i, double theta_hat_i,
                                                  const Link& link);

// phase-averaged probability that only port i fires
double port_click_prob(const IntensityVector& k, int i, const Link& link);
double total_click_prob(const IntensityVector& k, const Link& link);

// per-user intensity distribution {mu, nu, o} with probabilities
struct IntensityChoice {
  std::array<double, 3> value{};
  std::array<double, 3> prob{};
};
IntensityChoice intensity_choice(const SourceConfig& s);

// Port marginals for the symmetric network: the N-2 users not attached to the
// port are summed out. `a` is the intensity of the late slot of user i, `b` the
// early slot of user i+1.
struct PortModel {
  int n_users = 3;
  Link link;
  IntensityChoice choice;
  double other_factor = 1.0;  // (sum_k p_k e^{-eta k})^{N-2}

  PortModel(int n_users, const Link& link, const IntensityChoice& choice);

  // q^{P_i}_{ab}, phase averaged
  double q_pair(double a, double b) const;
  // q^{theta,L}_{ab} and q^{theta,R}_{ab}
  double q_pair_phase(double a, double b, double theta, bool right) const;
  // q_tot^{P_i} = sum_ab p_a p_b q_ab
  double q_port_total() const;
};

double q_tot_port(int n_users, const SourceConfig& s, const Link& link);
double q_tot(int n_users, const SourceConfig& s, const Link& link);

enum class YieldForm { exact, printed };

struct YieldTable {
  double y00 = 0.0, y01 = 0.0, y10 = 0.0, y11 = 0.0;
  // keyed by pattern string over {L,R}, port 1 first
  std::map<std::string, double> pattern;
};

// y_ab for a ports' two inputs carrying a and b photons, eta' = eta/2
YieldTable single_photon_yields(const Link& link, YieldForm form = YieldForm::exact);

// X-basis single-photon detector pattern yields; the correct class has an even
// number of R clicks when the global phase is 0
std::map<std::string, double> pattern_yields(int n_users, const Link& link, YieldForm form = YieldForm::exact);

// yield of one pattern in the error (odd R) or correct (even R) class
double pattern_yield_class(int n_users, bool correct, const Link& link, YieldForm form = YieldForm::exact);

// general-N evaluation by summing over surviving photons and their routings
double pattern_yield_routing_sum(int n_users, bool correct, const Link& link);

std::string pattern_string(unsigned bits, int n_users);
int parity(unsigned bits);

}  // namespace amdi
