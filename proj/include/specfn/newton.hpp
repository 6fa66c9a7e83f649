#pragma once

#include <map>
#include <vector>

#include "specfn/eigen.hpp"
#include "specfn/matrix.hpp"

namespace specfn {

/// Power sums of a matrix: p_k = Trace(X^k) and the scaled n_k = p_k / k.
struct PowerSums {
  std::vector<double> p;  // p[k-1] = Trace(X^k)
  std::vector<double> n;  // n[k-1] = Trace(X^k) / k
};

PowerSums power_sums(const SymMatrix& x, int kmax);

/// Polynomial in the power sums p_1..p_d: sparse monomial map
/// exponents -> coefficient. Exponent vectors have length d.
class PolyPS {
 public:
  PolyPS() = default;
  explicit PolyPS(int d) : d_(d) {}

  int dim() const { return d_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }

  void add_term(const std::vector<int>& exps, double coeff);
  PolyPS& operator+=(const PolyPS& o);
  PolyPS& operator*=(double s);
  friend PolyPS operator*(const PolyPS& a, const PolyPS& b);

  /// Evaluates at concrete power-sum values (p_1..p_d).
  double eval(const std::vector<double>& p) const;

  /// Total degree where p_k counts as degree k.
  int weighted_degree() const;

 private:
  int d_ = 0;
  std::map<std::vector<int>, double> terms_;
};

/// Newton's identity expansion of the k-th elementary symmetric polynomial
/// into power sums: e_k = (1/k) sum_{m=1..k} (-1)^{m-1} e_{k-m} p_m.
PolyPS esym_to_psums(int k, int d);

/// Symmetric polynomial in the elementary-symmetric basis: list of
/// {coeff, exponents over e_1..e_d}. The JSON interface mirrors this.
struct SymPolyE {
  int d = 0;
  std::vector<std::pair<std::vector<int>, double>> terms;  // (exponents, coeff)

  PolyPS to_power_sums() const;
};

/// Evaluates a power-sum polynomial at p_k(X) = Trace(X^k).
double lift_polynomial(const PolyPS& p, const SymMatrix& x);

/// Vandermonde matrix with rows (r_1^k, ..., r_d^k), k = 0..d-1, and its
/// determinant (Gaussian elimination); det = prod_{i<j} (r_j - r_i).
struct VandermondeResult {
  Matrix m;
  double det;
};

VandermondeResult vandermonde_jacobian(const std::vector<double>& r);

/// Checks Dr(x) = (pi_1; ...; pi_d): finite differences of the sorted
/// eigenvalues against <pi_i, xi> over a few random directions.
struct DrDxResult {
  bool skipped = false;   // coalescent spectrum
  double residual = 0.0;  // max |FD(r_i) - <pi_i, xi>|
};

DrDxResult dr_dx_rows_check(const SymMatrix& x, std::uint64_t seed = 7011,
                            int directions = 4, double separation_tol = 1e-6);

}  // namespace specfn
