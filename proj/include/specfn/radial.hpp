#pragma once

#include <map>
#include <string>
#include <vector>

#include "specfn/expr.hpp"

namespace specfn {

/// Even one-variable profile f(r) defining the rotation-invariant
/// F(x) = f(|x|). The expression uses r[1]; evenness is checked numerically
/// at construction.
class RadialProfile {
 public:
  RadialProfile(const DiagExpr& f, std::map<std::string, double> params = {},
                int max_order = kDefaultMaxOrder);

  double value(double r) const;
  /// k-th derivative f^(k)(r), exact symbolic.
  double deriv(int k, double r) const;
  int max_order() const { return max_order_; }

  /// Coefficients of f^(k) when it is a polynomial in r (params folded in);
  /// empty when it is not.
  const std::vector<double>& poly_coeffs(int k) const;

 private:
  DiagExpr inst_;
  std::map<std::string, double> params_;
  int max_order_;
  std::vector<ExprPtr> derivs_;               // index k
  std::vector<std::vector<double>> coeffs_;   // per k; empty = not polynomial
  std::vector<bool> coeffs_known_;
};

/// One intermediate term of the L^j composition:
///   coeff * s^spow * q^qpow * Int prod_v t_v^{jexp[v]} f^(n)((prod t) r) dt
/// with s = <pi, xi> and q = |xi|^2.
struct RadialTerm {
  double coeff = 1.0;
  int spow = 0;
  int qpow = 0;
  std::vector<int> jexp;
};

/// Builds the term list of L^0 L^1 ... L^{n-1} (f^(n)).
std::vector<RadialTerm> radial_terms(int n);

/// Tangent field on the sphere: delta_xi(pi) = xi - <pi, xi> pi.
/// pi must be unit within 1e-12.
std::vector<double> delta_sphere(const std::vector<double>& xi, const std::vector<double>& pi);

/// n-th directional derivative of F(x) = f(|x|) along xi.
double radial_dirderiv(const RadialProfile& f, const std::vector<double>& x,
                       const std::vector<double>& xi, int n, int quad_nodes = 32);

/// Diagnostic pair (|D^n F(x)|, sup_{|r| <= |x|} |f^(n)(r)|) for the decay
/// bound; the constant relating them is not pinned.
struct RadialBound {
  double lhs = 0.0;
  double rhs_sup = 0.0;
};

RadialBound radial_bound_check(const RadialProfile& f, const std::vector<double>& x,
                               const std::vector<double>& xi, int n, int grid = 201);

}  // namespace specfn
