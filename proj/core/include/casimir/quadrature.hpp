#pragma once

#include <cstddef>
#include <vector>

namespace casimir {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of order n (n >= 1), computed by Newton iteration on P_n and cached.
/// Thread-safe.
const GaussLegendreRule& gauss_legendre(std::size_t n);

}  // namespace casimir
