#include "specfn/newton.hpp"

#include <algorithm>
#include <cmath>

namespace specfn {

PowerSums power_sums(const SymMatrix& x, int kmax) {
  if (kmax < 1) throw InputError("power_sums: kmax must be >= 1");
  PowerSums ps;
  ps.p.reserve(static_cast<std::size_t>(kmax));
  ps.n.reserve(static_cast<std::size_t>(kmax));
  Matrix acc = x.as_matrix();
  for (int k = 1; k <= kmax; ++k) {
    ps.p.push_back(acc.trace());
    ps.n.push_back(acc.trace() / k);
    if (k < kmax) acc = matmul(acc, x.as_matrix());
  }
  return ps;
}

void PolyPS::add_term(const std::vector<int>& exps, double coeff) {
  if (static_cast<int>(exps.size()) != d_) throw InputError("PolyPS: exponent length mismatch");
  const double v = (terms_[exps] += coeff);
  if (v == 0.0) terms_.erase(exps);
}

PolyPS& PolyPS::operator+=(const PolyPS& o) {
  if (o.d_ != d_) throw InputError("PolyPS: dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

PolyPS& PolyPS::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

PolyPS operator*(const PolyPS& a, const PolyPS& b) {
  if (a.d_ != b.d_) throw InputError("PolyPS: dimension mismatch");
  PolyPS out(a.d_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

double PolyPS::eval(const std::vector<double>& p) const {
  if (static_cast<int>(p.size()) < d_) throw InputError("PolyPS::eval: missing power sums");
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int k = 0; k < d_; ++k)
      for (int rep = 0; rep < e[static_cast<std::size_t>(k)]; ++rep)
        m *= p[static_cast<std::size_t>(k)];
    total += m;
  }
  return total;
}

int PolyPS::weighted_degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int t = 0;
    for (int k = 0; k < d_; ++k) t += (k + 1) * e[static_cast<std::size_t>(k)];
    deg = std::max(deg, t);
  }
  return deg;
}

PolyPS esym_to_psums(int k, int d) {
  if (k < 1 || k > d) throw InputError("esym_to_psums: need 1 <= k <= d");
  // e_0 = 1; e_k = (1/k) sum_{m=1..k} (-1)^{m-1} e_{k-m} p_m.
  std::vector<PolyPS> e(static_cast<std::size_t>(k) + 1, PolyPS(d));
  e[0].add_term(std::vector<int>(static_cast<std::size_t>(d), 0), 1.0);
  for (int kk = 1; kk <= k; ++kk) {
    PolyPS acc(d);
    for (int m = 1; m <= kk; ++m) {
      PolyPS pm(d);
      std::vector<int> exps(static_cast<std::size_t>(d), 0);
      exps[static_cast<std::size_t>(m - 1)] = 1;
      pm.add_term(exps, (m % 2 == 1) ? 1.0 : -1.0);
      acc += e[static_cast<std::size_t>(kk - m)] * pm;
    }
    acc *= 1.0 / kk;
    e[static_cast<std::size_t>(kk)] = acc;
  }
  return e[static_cast<std::size_t>(k)];
}

PolyPS SymPolyE::to_power_sums() const {
  PolyPS out(d);
  // Cache single e_k expansions, then multiply per monomial.
  std::vector<PolyPS> ek;
  ek.reserve(static_cast<std::size_t>(d));
  for (int k = 1; k <= d; ++k) ek.push_back(esym_to_psums(k, d));
  for (const auto& [exps, coeff] : terms) {
    if (static_cast<int>(exps.size()) != d) throw InputError("SymPolyE: exponent length mismatch");
    PolyPS mono(d);
    mono.add_term(std::vector<int>(static_cast<std::size_t>(d), 0), coeff);
    for (int k = 0; k < d; ++k)
      for (int rep = 0; rep < exps[static_cast<std::size_t>(k)]; ++rep)
        mono = mono * ek[static_cast<std::size_t>(k)];
    out += mono;
  }
  return out;
}

double lift_polynomial(const PolyPS& p, const SymMatrix& x) {
  PowerSums ps = power_sums(x, std::max(p.dim(), 1));
  return p.eval(ps.p);
}

VandermondeResult vandermonde_jacobian(const std::vector<double>& r) {
  const int d = static_cast<int>(r.size());
  if (d < 1) throw InputError("vandermonde_jacobian: empty spectrum");
  VandermondeResult out{Matrix(d), 0.0};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.m(i, j) = std::pow(r[static_cast<std::size_t>(j)], i);

  // LU with partial pivoting for the determinant.
  Matrix lu = out.m;
  double det = 1.0;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int i = c + 1; i < d; ++i)
      if (std::abs(lu(i, c)) > std::abs(lu(piv, c))) piv = i;
    if (lu(piv, c) == 0.0) {
      det = 0.0;
      break;
    }
    if (piv != c) {
      for (int j = 0; j < d; ++j) std::swap(lu(piv, j), lu(c, j));
      det = -det;
    }
    det *= lu(c, c);
    for (int i = c + 1; i < d; ++i) {
      const double m = lu(i, c) / lu(c, c);
      for (int j = c; j < d; ++j) lu(i, j) -= m * lu(c, j);
    }
  }
  out.det = det;
  return out;
}

DrDxResult dr_dx_rows_check(const SymMatrix& x, std::uint64_t seed, int directions,
                            double separation_tol) {
  Spectrum s = jacobi_eigh(x);
  const int d = x.dim();
  double maxabs = 0.0;
  for (double v : s.r) maxabs = std::max(maxabs, std::abs(v));
  for (int i = 0; i + 1 < d; ++i) {
    if (std::abs(s.r[static_cast<std::size_t>(i)] - s.r[static_cast<std::size_t>(i) + 1]) <=
        separation_tol * (1.0 + maxabs)) {
      return {true, 0.0};
    }
  }

  Rng rng(seed);
  const double h = 2e-6 * (1.0 + x.frobenius());
  DrDxResult out;
  for (int trial = 0; trial < directions; ++trial) {
    SymMatrix xi(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) xi.set(i, j, rng.normal());
    SymMatrix xp = x, xm = x;
    SymMatrix step = xi;
    step *= h;
    xp += step;
    xm -= step;
    Spectrum sp = jacobi_eigh(xp);
    Spectrum sm = jacobi_eigh(xm);
    for (int i = 0; i < d; ++i) {
      const double fd =
          (sp.r[static_cast<std::size_t>(i)] - sm.r[static_cast<std::size_t>(i)]) / (2.0 * h);
      const double formula = inner(s.flag.projections[static_cast<std::size_t>(i)], xi);
      out.residual = std::max(out.residual, std::abs(fd - formula));
    }
  }
  return out;
}

}  // namespace specfn
