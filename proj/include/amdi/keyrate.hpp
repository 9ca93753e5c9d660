#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "amdi/decoy.hpp"
#include "amdi/model.hpp"
#include "amdi/sift.hpp"

namespace amdi {

// asymptotic: infinite decoys; decoy: three decoys without fluctuation; finite: composable
enum class Mode { asymptotic, decoy, finite };

Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

struct KeyRateResult {
  double distance_km = 0.0;
  double eta = 0.0;
  double key_length = 0.0;      // clamped at 0
  double key_length_raw = 0.0;  // before clamping
  double rate = 0.0;            // key_length / total pulses
  double plob = 0.0;
  bool feasible = false;

  // components
  double n_tot = 0.0;
  double n_z = 0.0;
  double e_z = 0.0;  // max_i E^z_{1,i}
  double leak = 0.0;
  double eps_terms = 0.0;
  double qber_x = 0.0;
  DecoyEstimates est;
  SourceConfig source;
  double t_c_s = 0.0;
};

double leak_ec(double n_z, double e_z, double f);

KeyRateResult asymptotic_key_length(const DecoyEstimates& est, const CountModel& cm);
KeyRateResult finite_key_length_3user(const DecoyEstimates& est, const CountModel& cm);

// the full pipeline for one configuration; with_qber adds the X-basis integral
// in asymptotic mode (always done in the other modes)
KeyRateResult evaluate(const ProtocolConfig& cfg, Mode mode, bool with_qber = true);

struct SecurityBudget {
  double eps_sec = 0.0;
  double eps_tot = 0.0;  // eps_sec + eps_cor
  std::map<std::string, double> terms;
};

// composition with eps_0 = 4 eps, eps_3 = 15 eps, eps_beta = eps
SecurityBudget security_budget(const SecurityParams& sec);
// same, using the Chernoff applications actually charged; throws DomainError if the
// s0 or s111 count exceeds the printed allocation
SecurityBudget security_budget(const SecurityParams& sec, const EpsLedger& used);

// -log2(1 - eta^2); +inf only in the limit, eta >= 1 is a DomainError
double plob_star_bound(double eta);

struct ScanOptions {
  Mode mode = Mode::asymptotic;
  bool optimize = false;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: OpenMP default
};

std::vector<KeyRateResult> scan_distance(const ProtocolConfig& cfg, const std::vector<double>& distances_km,
                                         const ScanOptions& opt);

// A:B:STEP inclusive of B up to rounding
std::vector<double> distance_grid(double a, double b, double step);

std::string format_double(double x);
void write_keyrate_csv(std::ostream& os, const std::vector<KeyRateResult>& rows);

}  // namespace amdi
