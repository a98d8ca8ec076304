#pragma once

// Binomial helpers shared by the statistical tests.

#include <cmath>
#include <cstddef>

namespace agentir::test {

inline double binomial_sigma(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

// |k/n - p| <= z * sigma(p, n); a degenerate p must be hit exactly.
inline bool within_sigma(std::size_t k, std::size_t n, double p, double z) {
  const double est = static_cast<double>(k) / static_cast<double>(n);
  const double sigma = binomial_sigma(p, n);
  if (sigma == 0.0) return est == p;
  return std::abs(est - p) <= z * sigma;
}

}  // namespace agentir::test
