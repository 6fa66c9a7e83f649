#include "specfn/radial.hpp"

#include <algorithm>
#include <cmath>

#include "specfn/quadrature.hpp"

namespace specfn {

namespace {

constexpr int kMaxPolyDegree = 63;  // GL-32 integrates these exactly anyway

// Polynomial coefficient extraction; params fold to constants. Returns false
// for transcendental structure or degrees past the cap.
bool extract_poly(const ExprPtr& e, const std::map<std::string, double>& params,
                  std::vector<double>& out) {
  switch (e->kind) {
    case Expr::Kind::Const:
      out = {e->value};
      return true;
    case Expr::Kind::Param: {
      auto it = params.find(e->name);
      if (it == params.end()) return false;
      out = {it->second};
      return true;
    }
    case Expr::Kind::Var:
      out = {0.0, 1.0};
      return true;
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      std::vector<double> a, b;
      if (!extract_poly(e->a, params, a) || !extract_poly(e->b, params, b)) return false;
      const double sign = (e->kind == Expr::Kind::Add) ? 1.0 : -1.0;
      if (b.size() > a.size()) a.resize(b.size(), 0.0);
      for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
      out = std::move(a);
      return true;
    }
    case Expr::Kind::Neg: {
      if (!extract_poly(e->a, params, out)) return false;
      for (double& c : out) c = -c;
      return true;
    }
    case Expr::Kind::Mul: {
      std::vector<double> a, b;
      if (!extract_poly(e->a, params, a) || !extract_poly(e->b, params, b)) return false;
      if (a.size() + b.size() > kMaxPolyDegree + 2) return false;
      std::vector<double> c(a.size() + b.size() - 1, 0.0);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
      out = std::move(c);
      return true;
    }
    case Expr::Kind::Div: {
      std::vector<double> a, b;
      if (!extract_poly(e->a, params, a) || !extract_poly(e->b, params, b)) return false;
      if (b.size() != 1 || b[0] == 0.0) return false;
      for (double& c : a) c /= b[0];
      out = std::move(a);
      return true;
    }
    case Expr::Kind::Pow: {
      if (e->ipow < 0) return false;
      std::vector<double> base;
      if (!extract_poly(e->a, params, base)) return false;
      std::vector<double> acc = {1.0};
      for (int k = 0; k < e->ipow; ++k) {
        if (acc.size() + base.size() > kMaxPolyDegree + 2) return false;
        std::vector<double> c(acc.size() + base.size() - 1, 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i)
          for (std::size_t j = 0; j < base.size(); ++j) c[i + j] += acc[i] * base[j];
        acc = std::move(c);
      }
      out = std::move(acc);
      return true;
    }
    default:
      return false;
  }
}

}  // namespace

RadialProfile::RadialProfile(const DiagExpr& f, std::map<std::string, double> params,
                             int max_order)
    : params_(std::move(params)), max_order_(max_order) {
  inst_ = instantiate(f, 1);
  derivs_.resize(static_cast<std::size_t>(max_order) + 1);
  coeffs_.resize(static_cast<std::size_t>(max_order) + 1);
  coeffs_known_.resize(static_cast<std::size_t>(max_order) + 1, false);
  derivs_[0] = inst_.ast;
  for (int k = 1; k <= max_order; ++k)
    derivs_[static_cast<std::size_t>(k)] = derivative_node(derivs_[static_cast<std::size_t>(k) - 1], 0);

  // Evenness: f(-r) = f(r) at random points.
  Rng rng(0xEBE7ull);
  for (int trial = 0; trial < 24; ++trial) {
    const double r = rng.uniform(0.1, 2.5);
    try {
      const double plus = value(r);
      const double minus = value(-r);
      if (std::abs(plus - minus) > 1e-10 * (1.0 + std::abs(plus)))
        throw InputError("radial profile must be even: f(-r) != f(r) at r=" + std::to_string(r));
    } catch (const DomainError&) {
      // Profiles with one-sided domains cannot define F(x) = f(|x|) smoothly
      // through 0 anyway; surface that directly.
      throw InputError("radial profile not evaluable on both signs of r");
    }
  }
}

double RadialProfile::value(double r) const {
  return eval_node(derivs_[0], {r}, params_);
}

double RadialProfile::deriv(int k, double r) const {
  if (k < 0 || k > max_order_)
    throw InputError("radial deriv order " + std::to_string(k) + " exceeds cap");
  return eval_node(derivs_[static_cast<std::size_t>(k)], {r}, params_);
}

const std::vector<double>& RadialProfile::poly_coeffs(int k) const {
  auto& self = const_cast<RadialProfile&>(*this);
  if (!coeffs_known_[static_cast<std::size_t>(k)]) {
    std::vector<double> c;
    if (!extract_poly(derivs_[static_cast<std::size_t>(k)], params_, c)) c.clear();
    self.coeffs_[static_cast<std::size_t>(k)] = std::move(c);
    self.coeffs_known_[static_cast<std::size_t>(k)] = true;
  }
  return coeffs_[static_cast<std::size_t>(k)];
}

std::vector<RadialTerm> radial_terms(int n) {
  if (n < 1) throw InputError("radial_terms: n must be >= 1");
  // Innermost operator first: L^{n-1} ... L^0 applied to f^(n).
  std::vector<RadialTerm> terms = {RadialTerm{}};
  for (int j = n - 1; j >= 0; --j) {
    std::vector<RadialTerm> next;
    next.reserve(terms.size() * 3);
    for (const RadialTerm& t : terms) {
      RadialTerm s = t;  // <pi, xi> f
      s.spow += 1;
      next.push_back(std::move(s));
      if (t.spow > 0) {
        // delta_xi(s^a q^b) = a s^(a-1) q^b (q - s^2), then scale r by the
        // new path variable weighted t^j.
        RadialTerm up = t;
        up.coeff *= t.spow;
        up.spow -= 1;
        up.qpow += 1;
        up.jexp.push_back(j);
        next.push_back(std::move(up));
        RadialTerm down = t;
        down.coeff *= -t.spow;
        down.spow += 1;
        down.jexp.push_back(j);
        next.push_back(std::move(down));
      }
    }
    terms = std::move(next);
  }
  return terms;
}

std::vector<double> delta_sphere(const std::vector<double>& xi, const std::vector<double>& pi) {
  if (xi.size() != pi.size()) throw InputError("delta_sphere: dimension mismatch");
  double norm2 = 0.0;
  for (double v : pi) norm2 += v * v;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw InputError("delta_sphere: pi is not a unit vector within 1e-12");
  double dot = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) dot += pi[i] * xi[i];
  std::vector<double> out(xi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) out[i] = xi[i] - dot * pi[i];
  return out;
}

namespace {

// Int over [0,1]^m of prod t_v^{jexp[v]} * f^(n)((prod t) r) dt.
double pending_integral(const RadialProfile& f, int n, const std::vector<int>& jexp,
                        double r, int quad_nodes) {
  if (jexp.empty()) return f.deriv(n, r);

  const std::vector<double>& coeffs = f.poly_coeffs(n);
  if (!coeffs.empty()) {
    // Exact monomial integration: Int t^j (t r)^m dt = r^m / (j + m + 1).
    double total = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
      if (coeffs[m] == 0.0) continue;
      double v = coeffs[m] * std::pow(r, static_cast<double>(m));
      for (int j : jexp) v /= static_cast<double>(j) + static_cast<double>(m) + 1.0;
      total += v;
    }
    return total;
  }

  const QuadRule& rule = gauss_legendre_01(quad_nodes);
  const int m = static_cast<int>(jexp.size());
  std::vector<int> digits(static_cast<std::size_t>(m), 0);
  double total = 0.0;
  for (;;) {
    double wgt = 1.0;
    double scale = 1.0;
    for (int v = 0; v < m; ++v) {
      const double t = rule.nodes[static_cast<std::size_t>(digits[static_cast<std::size_t>(v)])];
      wgt *= rule.weights[static_cast<std::size_t>(digits[static_cast<std::size_t>(v)])] *
             std::pow(t, jexp[static_cast<std::size_t>(v)]);
      scale *= t;
    }
    total += wgt * f.deriv(n, scale * r);
    int v = m - 1;
    for (; v >= 0; --v) {
      if (++digits[static_cast<std::size_t>(v)] < quad_nodes) break;
      digits[static_cast<std::size_t>(v)] = 0;
    }
    if (v < 0) break;
  }
  return total;
}

}  // namespace

double radial_dirderiv(const RadialProfile& f, const std::vector<double>& x,
                       const std::vector<double>& xi, int n, int quad_nodes) {
  if (x.size() != xi.size()) throw InputError("radial_dirderiv: dimension mismatch");
  if (n < 0 || n > f.max_order())
    throw InputError("radial_dirderiv: order cap exceeded");
  double r = 0.0;
  for (double v : x) r += v * v;
  r = std::sqrt(r);

  std::vector<double> pi(x.size(), 0.0);
  if (r > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) pi[i] = x[i] / r;
  } else {
    // Convention at the origin; legitimate when the derivative extends
    // continuously (even profiles), which is the documented precondition.
    pi[0] = 1.0;
  }

  if (n == 0) return f.value(r);

  double s = 0.0, q = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    s += pi[i] * xi[i];
    q += xi[i] * xi[i];
  }

  double total = 0.0;
  for (const RadialTerm& t : radial_terms(n)) {
    double v = t.coeff;
    for (int k = 0; k < t.spow; ++k) v *= s;
    for (int k = 0; k < t.qpow; ++k) v *= q;
    if (v == 0.0) continue;
    total += v * pending_integral(f, n, t.jexp, r, quad_nodes);
  }
  return total;
}

RadialBound radial_bound_check(const RadialProfile& f, const std::vector<double>& x,
                               const std::vector<double>& xi, int n, int grid) {
  RadialBound out;
  out.lhs = std::abs(radial_dirderiv(f, x, xi, n));
  double r = 0.0;
  for (double v : x) r += v * v;
  r = std::sqrt(r);
  for (int i = 0; i < grid; ++i) {
    const double rr = -r + 2.0 * r * i / (grid - 1);
    out.rhs_sup = std::max(out.rhs_sup, std::abs(f.deriv(n, rr)));
  }
  return out;
}

}  // namespace specfn
