#pragma once

#include <vector>

namespace specfn {

/// Gauss-Legendre rule on [0, 1]: exact for polynomials of degree 2n-1.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes (and caches) the n-point rule via Newton iteration on P_n.
const QuadRule& gauss_legendre_01(int n);

}  // namespace specfn
