#pragma once

#include <cstdint>
#include <optional>

#include "amdi/keyrate.hpp"
#include "amdi/mermin.hpp"

namespace amdi {

struct ParamVector {
  double mu = 0.4, nu = 0.1, p_mu = 0.5, p_nu = 0.25;
  double t_c_s = 3e-4;  // ignored when phase locked
};

ParamVector params_of(const ProtocolConfig& cfg);
// writes the vector into a copy of cfg; p_o = 1 - p_mu - p_nu
ProtocolConfig with_params(const ProtocolConfig& cfg, const ParamVector& p);
bool params_valid(const ParamVector& p, bool phase_locked);

// Largest coherence time searched: the drift part of the misalignment,
// (T_c / 2)(2 pi df + omega), stays within pi. Beyond that the deterministic
// drift phase wraps and would look aligned again.
double t_c_max(const TimingConfig& t);

// unconstrained coordinates: mu = 1.5 sig(a), nu = mu sig(b), p_mu = sig(c),
// p_nu = (1 - p_mu) sig(d), t_c = t_c_max sig(e)
std::vector<double> to_unconstrained(const ParamVector& p, const TimingConfig& timing);
ParamVector from_unconstrained(const std::vector<double>& x, const ParamVector& base, const TimingConfig& timing);

struct OptimizeOptions {
  Mode mode = Mode::asymptotic;
  int starts = 8;  // one warm start plus quasi-random ones
  int max_evals = 400;
  double size_tol = 1e-4;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct OptimizeResult {
  ParamVector params;
  KeyRateResult result;  // evaluated with the X-basis integral
  int evaluations = 0;
  int best_start = 0;
};

// objective value minimized by the simplex: -ln R when feasible, otherwise a
// penalty above 1e6 that still orders points by how far l is below zero
double objective(const ProtocolConfig& cfg, Mode mode);

OptimizeResult optimize_point(const ProtocolConfig& cfg, const OptimizeOptions& opt,
                              std::optional<ParamVector> warm = std::nullopt);

// the same search maximizing the Mermin lower bound (three users)
struct MerminOptimum {
  ParamVector params;
  MerminEstimate est;
  int evaluations = 0;
};

double mermin_objective(const ProtocolConfig& cfg, FiniteMode mode);
MerminOptimum optimize_mermin(const ProtocolConfig& cfg, const OptimizeOptions& opt,
                              FiniteMode mode = FiniteMode::chernoff,
                              std::optional<ParamVector> warm = std::nullopt);

// sequential scan, each distance warm-started from the previous optimum
std::vector<MerminRow> scan_mermin_optimized(const ProtocolConfig& cfg, const std::vector<double>& distances_km,
                                             const OptimizeOptions& opt, FiniteMode mode = FiniteMode::chernoff);

}  // namespace amdi
