#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "amdi/optics.hpp"

namespace amdi {

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Occupation = std::vector<int>;
using cplx = std::complex<double>;

struct FockState {
  int n_modes = 0;
  std::map<Occupation, cplx> amp;

  double norm2() const;
  int max_photons() const;
};

// Probability of every threshold-detector click mask (bit d set: detector d fired).
using ClickDistribution = std::map<std::uint32_t, double>;

// General lossy linear network. Mode m loses each photon independently with
// 1 - transmittance[m]; U maps input creation operators to output modes
// (column m is the image of input mode m).
ClickDistribution propagate_network(const FockState& in, const std::vector<double>& transmittance,
                                    const std::vector<std::vector<cplx>>& U, int n_out, double p_d,
                                    int photon_cap = 4);

// Output state of a lossless network, for unitarity checks.
FockState apply_network(const FockState& in, const std::vector<std::vector<cplx>>& U, int n_out);

// Ring wiring: input modes [e_1, l_1, e_2, l_2, ...]; port i mixes l_i and
// e_{i+1}; outputs [L_1, R_1, L_2, R_2, ...].
std::vector<std::vector<cplx>> ring_network(int n_users);

// X-basis single photon per user: (|10> + e^{i theta_i}|01>)/sqrt2 on (e_i, l_i)
FockState ring_x_input(const std::vector<double>& theta_d);

ClickDistribution propagate(const FockState& in, int n_users, const Link& link, int photon_cap = 4);

// probability that every port fires exactly the detector named by the pattern
double pattern_probability(const ClickDistribution& dist, unsigned pattern_bits, int n_users);

// exactly-one-click probability at one port with a and b photons on its inputs,
// each arriving with eta/2
double port_yield_oracle(int a, int b, const Link& link);

struct ParityVerdict {
  bool ok = false;
  int expected_parity = 0;      // convention shared with the sifting code
  int printed_rule_parity = 0;  // (N-1 mod 2) for theta_g = 0, (N mod 2) for pi
  std::vector<int> observed;    // parities of all nonzero N-fold coincidences
};

ParityVerdict parity_rule_check(int n_users, double theta_g);

}  // namespace amdi
