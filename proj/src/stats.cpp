#include "amdi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace amdi {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy: x outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {
double beta_of(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("chernoff: eps outside (0,1)");
  return -std::log(eps);
}
}  // namespace

BoundPair chernoff_observed(double x, double eps) {
  if (!(x >= 0.0)) throw DomainError("chernoff_observed: negative expectation");
  double b = beta_of(eps);
  BoundPair r;
  r.upper = x + b / 2.0 + std::sqrt(2.0 * b * x + b * b / 4.0);
  r.lower = std::max(x - std::sqrt(2.0 * b * x), 0.0);
  return r;
}

BoundPair chernoff_expected(double x, double eps) {
  if (!(x >= 0.0)) throw DomainError("chernoff_expected: negative observation");
  double b = beta_of(eps);
  BoundPair r;
  r.upper = x + b + std::sqrt(2.0 * b * x + b * b);
  r.lower = std::max(x - b / 2.0 - std::sqrt(2.0 * b * x + b * b / 4.0), 0.0);
  return r;
}

double sampling_gamma_upper(double n, double k, double lambda, double eps) {
  if (!(n >= 1.0 && k >= 1.0)) throw DomainError("sampling_gamma_upper: n,k must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("sampling_gamma_upper: lambda outside (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("sampling_gamma_upper: eps outside (0,1)");
  double s = n + k;
  double A = std::max(n, k);
  double G = s / (n * k) *
             std::log(s / (2.0 * std::numbers::pi * n * k * lambda * (1.0 - lambda) * eps * eps));
  // G < 0 only for tiny samples where the theorem gives no useful bound
  if (G < 0.0) G = 0.0;
  double num = (1.0 - 2.0 * lambda) * A * G / s + std::sqrt(A * A * G * G / (s * s) + 4.0 * lambda * (1.0 - lambda) * G);
  double den = 2.0 + 2.0 * A * A * G / (s * s);
  return num / den;
}

}  // namespace amdi
