#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace amdi {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
};

// H2(x), continuous at 0 and 1
double binary_entropy(double x);

// bounds on the observed value given its expectation, beta = ln(1/eps)
BoundPair chernoff_observed(double expected, double eps);

// bounds on the expectation given an observed value
BoundPair chernoff_expected(double observed, double eps);

// random-sampling-without-replacement correction gamma^U(n, k, lambda, eps)
double sampling_gamma_upper(double n, double k, double lambda, double eps);

// Counts bound applications per estimation target; one eps per application.
class EpsLedger {
 public:
  void charge(const std::string& target, int applications = 1) { counts_[target] += applications; }
  int count(const std::string& target) const {
    auto it = counts_.find(target);
    return it == counts_.end() ? 0 : it->second;
  }
  int total() const {
    int t = 0;
    for (const auto& [k, v] : counts_) t += v;
    return t;
  }
  const std::map<std::string, int>& counts() const { return counts_; }

 private:
  std::map<std::string, int> counts_;
};

}  // namespace amdi
