#pragma once

#include <string>
#include <vector>

#include "amdi/sift.hpp"
#include "amdi/stats.hpp"

namespace amdi {

enum class Provenance { asymptotic, decoy, finite };

struct DecoyEstimates {
  double s0_z = 0.0;
  double s1_z = 0.0;
  double s1_x = 0.0;
  double t1_x = 0.0;
  double e1_x = 0.0;
  double phi_z = 0.0;
  double gamma = 0.0;  // sampling correction added to e1_x
  double phi_raw = 0.0;  // before capping; 2 when the X single-photon bound vanishes
  Provenance provenance = Provenance::asymptotic;
  // expected-value (starred) quantities before conversion to observed bounds
  double s0_z_exp = 0.0, s1_z_exp = 0.0, s1_x_exp = 0.0, t1_x_exp = 0.0;
  bool clamped = false;    // some linear combination went negative
  bool phi_capped = false;
  EpsLedger ledger;
};

// s_{1..1}^z by the sum over a_i^e + a_i^l = 1
double asymptotic_s1_z(const CountModel& cm);
// the two- and three-term closed forms for N = 3 and N = 4; generic sum otherwise
double asymptotic_s1_z_closed(const CountModel& cm);
double asymptotic_s1_x(double s1_z, const CountModel& cm);
double asymptotic_t1_x(const CountModel& cm);

DecoyEstimates asymptotic_estimates(const CountModel& cm);

enum class FiniteMode {
  chernoff,     // variant Chernoff on every count, Chernoff conversion, sampling correction
  no_fluctuation  // same linear combinations on expected counts, no statistical terms
};

// three users, three intensities
DecoyEstimates finite_bounds_3user(const CountModel& cm, const SecurityParams& sec,
                                   FiniteMode mode = FiniteMode::chernoff);

}  // namespace amdi
