#pragma once

#include <vector>

#include "specfn/matrix.hpp"

namespace specfn {

/// A d-tuple of mutually orthogonal rank-one projections summing to the
/// identity. An eigenflag of X additionally diagonalizes X.
struct Flag {
  std::vector<SymMatrix> projections;

  int dim() const { return static_cast<int>(projections.size()); }

  /// Max violation of pi^2 = pi, pi_i pi_j = 0, sum pi = I, Tr pi = 1.
  double residual() const;
  bool valid(double tol = 1e-10) const { return residual() <= tol; }
};

/// Eigenvalues sorted non-increasing plus an eigenflag: x = sum_i r_i pi_i.
struct Spectrum {
  std::vector<double> r;
  Flag flag;

  int dim() const { return static_cast<int>(r.size()); }
};

/// Cyclic Jacobi eigendecomposition with threshold sweeps. Eigenvalues come
/// back sorted non-increasing (stable order on ties); exactly diagonal input
/// keeps the standard-basis flag. Throws NumericalError after 30 sweeps
/// without convergence.
Spectrum jacobi_eigh(const SymMatrix& x);

/// sum_i r_i pi_i.
SymMatrix reconstruct(const Spectrum& s);

/// Tangent field delta(a, xi) on flags:
///   delta_i = pi_i xi (sum_j a_ij pi_j) + (sum_j a_ij pi_j) xi pi_i.
/// a must be skew-symmetric within 1e-12.
std::vector<SymMatrix> delta_field(const Matrix& a, const SymMatrix& xi, const Flag& flag);

/// w[a][b] = u_a^T xi u_b where u_k spans range(pi_k), sign fixed so the
/// largest-magnitude component of u_k is positive. Every cyclic trace
/// monomial Tr(pi_a1 xi pi_a2 xi ... pi_am xi) equals the cyclic product
/// w[a1][a2] w[a2][a3] ... w[am][a1].
struct WMatrix {
  SymMatrix w;

  int dim() const { return w.dim(); }
  double operator()(int a, int b) const { return w(a, b); }
};

WMatrix w_matrix(const Flag& flag, const SymMatrix& xi);

/// Unit vector spanning range(pi), largest-magnitude component positive.
/// Throws InputError when pi is not rank-one within tolerance.
std::vector<double> flag_vector(const SymMatrix& pi, double tol = 1e-8);

}  // namespace specfn
