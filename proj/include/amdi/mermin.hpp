#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "amdi/decoy.hpp"
#include "amdi/sift.hpp"

namespace amdi {

// M = <XXX> - <XYY> - <YXY> - <YYX>; each correlator must lie in [-1, 1]
double mermin_inequality(double xxx, double xyy, double yxy, double yyx);

struct SignedCount {
  double ppp = 0.0;  // all users +, Phi_0^+ outcome
  double mmm = 0.0;  // all users -
};

// keyed by set name; the 2nu and 2mu families plus [o,o,o]
using SignedCounts = std::map<std::string, SignedCount>;

// three users only
SignedCounts expected_signed_counts(const CountModel& cm);

// [k,k,k] with k = 2nu or 2mu: sifted like the key-rate X set, split by class
SignedCount sifted_signed(const CountModel& cm, Level k);
// p_K for the signed sets; the two uniform sets carry the 2/M sifting factor
double signed_set_prob(const CountModel& cm, const std::string& set);

struct Correlators {
  double xxx = 0.0, xyy = 0.0, yxy = 0.0, yyx = 0.0;
};

// correlators of the observed [2nu,2nu,2nu] events in the X and Y frames
Correlators frame_correlators(const CountModel& cm);

struct MerminEstimate {
  double s_ppp_lower = 0.0;
  double s_ppp_upper = 0.0;
  double s_mmm_upper = 0.0;
  double m_lower = 0.0;
  bool defined = false;  // false when the denominator vanishes
  bool clamped = false;
  EpsLedger ledger;
};

MerminEstimate mermin_lower_bound(const SignedCounts& counts, const CountModel& cm, const SecurityParams& sec,
                                  FiniteMode mode = FiniteMode::chernoff);

struct MerminRow {
  double distance_km = 0.0;
  MerminEstimate est;
};

std::vector<MerminRow> scan_mermin(const ProtocolConfig& cfg, const std::vector<double>& distances_km,
                                   FiniteMode mode = FiniteMode::chernoff, int threads = 0);

void write_mermin_csv(std::ostream& os, const std::vector<MerminRow>& rows);

}  // namespace amdi
