#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amdi::tools {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

// closed-form yields vs the Fock-space oracle on a grid of `points` (eta, p_d)
// pairs; N = 3 all patterns, N = 4 the LLLL and RLLL patterns
CheckResult check_oracle_equivalence(int points, double tol = 1e-10);
// parity_rule_check for N in {3,4} and theta_g in {0, pi}
CheckResult check_parity_rule();
// empirical two-sided violation rate of the Chernoff bounds, both directions
CheckResult check_chernoff_coverage(int draws, double eps, std::uint64_t seed);
// gamma^U positive and decreasing in n and in k on a fixed grid
CheckResult check_gamma_grid();
// every figure preset passes config validation
CheckResult check_presets();
// generic and closed-form asymptotic s_1..1^z agree
CheckResult check_s1z_forms();
// printed epsilon composition and the ledger of a finite run
CheckResult check_security_budget();

std::vector<CheckResult> run_checks(bool quick);

}  // namespace amdi::tools
