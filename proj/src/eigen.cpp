#include "specfn/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace specfn {

double Flag::residual() const {
  const int d = dim();
  double worst = 0.0;
  Matrix sum(d);
  for (int i = 0; i < d; ++i) {
    const Matrix& pi = projections[static_cast<std::size_t>(i)].as_matrix();
    sum += pi;
    Matrix idem = matmul(pi, pi);
    idem -= pi;
    worst = std::max(worst, idem.max_abs());
    worst = std::max(worst, std::abs(pi.trace() - 1.0));
    for (int j = i + 1; j < d; ++j) {
      Matrix prod = matmul(pi, projections[static_cast<std::size_t>(j)].as_matrix());
      worst = std::max(worst, prod.max_abs());
    }
  }
  sum -= Matrix::identity(d);
  return std::max(worst, sum.max_abs());
}

namespace {

// One threshold sweep of cyclic Jacobi rotations on A, accumulating into V.
void jacobi_sweep(Matrix& a, Matrix& v, double thresh) {
  const int d = a.dim();
  for (int p = 0; p < d - 1; ++p) {
    for (int q = p + 1; q < d; ++q) {
      const double apq = a(p, q);
      if (std::abs(apq) <= thresh) continue;
      const double app = a(p, p);
      const double aqq = a(q, q);
      const double theta = 0.5 * (aqq - app) / apq;
      double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
      if (theta < 0.0) t = -t;
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      const double tau = s / (1.0 + c);
      const double h = t * apq;
      a(p, p) = app - h;
      a(q, q) = aqq + h;
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      for (int k = 0; k < d; ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = akp - s * (akq + tau * akp);
        a(p, k) = a(k, p);
        a(k, q) = akq + s * (akp - tau * akq);
        a(q, k) = a(k, q);
      }
      for (int k = 0; k < d; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = vkp - s * (vkq + tau * vkp);
        v(k, q) = vkq + s * (vkp - tau * vkq);
      }
    }
  }
}

double offdiag_norm(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

Spectrum jacobi_eigh(const SymMatrix& x) {
  const int d = x.dim();
  Matrix a = x.as_matrix();
  Matrix v = Matrix::identity(d);
  const double scale = x.frobenius();

  int sweep = 0;
  for (; sweep < 30; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += std::abs(a(i, j));
    if (off == 0.0) break;
    // Skip tiny rotations early on, then polish everything.
    const double thresh = (sweep < 3) ? 0.2 * off / (d * d) : 0.0;
    jacobi_sweep(a, v, thresh);
  }
  if (sweep == 30 && offdiag_norm(a) > 1e-13 * std::max(scale, 1e-300)) {
    throw NumericalError("jacobi_eigh: no convergence after 30 sweeps");
  }

  // Stable sort, non-increasing; ties keep Jacobi column order.
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int i, int j) { return a(i, i) > a(j, j); });

  Spectrum s;
  s.r.resize(static_cast<std::size_t>(d));
  s.flag.projections.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const int c = order[static_cast<std::size_t>(i)];
    s.r[static_cast<std::size_t>(i)] = a(c, c);
    SymMatrix pi(d);
    for (int p = 0; p < d; ++p)
      for (int q = p; q < d; ++q) pi.set(p, q, v(p, c) * v(q, c));
    s.flag.projections.push_back(pi);
  }
  return s;
}

SymMatrix reconstruct(const Spectrum& s) {
  const int d = s.dim();
  SymMatrix x(d);
  for (int i = 0; i < d; ++i) {
    SymMatrix term = s.flag.projections[static_cast<std::size_t>(i)];
    term *= s.r[static_cast<std::size_t>(i)];
    x += term;
  }
  return x;
}

std::vector<SymMatrix> delta_field(const Matrix& a, const SymMatrix& xi, const Flag& flag) {
  const int d = flag.dim();
  if (a.dim() != d || xi.dim() != d) throw InputError("delta_field: dimension mismatch");
  if (!is_skew(a)) throw InputError("delta_field: a is not skew-symmetric within 1e-12");

  std::vector<SymMatrix> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Matrix mix(d);
    for (int j = 0; j < d; ++j) {
      if (a(i, j) == 0.0) continue;
      Matrix pj = flag.projections[static_cast<std::size_t>(j)].as_matrix();
      pj *= a(i, j);
      mix += pj;
    }
    const Matrix& pi = flag.projections[static_cast<std::size_t>(i)].as_matrix();
    Matrix left = matmul(matmul(pi, xi.as_matrix()), mix);
    Matrix di = left + left.transposed();
    out.push_back(SymMatrix::from_matrix(di));
  }
  return out;
}

std::vector<double> flag_vector(const SymMatrix& pi, double tol) {
  const int d = pi.dim();
  // pi = u u^T, so column j is u_j * u; take the largest diagonal.
  int best = 0;
  for (int j = 1; j < d; ++j)
    if (pi(j, j) > pi(best, best)) best = j;
  if (pi(best, best) <= 0.0) throw InputError("flag_vector: projection is not rank-one");
  const double root = std::sqrt(pi(best, best));
  std::vector<double> u(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) u[static_cast<std::size_t>(i)] = pi(i, best) / root;

  double resid = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      resid = std::max(resid, std::abs(u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)] - pi(i, j)));
  if (resid > tol * (1.0 + pi.max_abs()))
    throw InputError("flag_vector: projection is not rank-one within tolerance");

  int big = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(u[static_cast<std::size_t>(i)]) > std::abs(u[static_cast<std::size_t>(big)])) big = i;
  if (u[static_cast<std::size_t>(big)] < 0.0)
    for (double& c : u) c = -c;
  return u;
}

WMatrix w_matrix(const Flag& flag, const SymMatrix& xi) {
  const int d = flag.dim();
  if (xi.dim() != d) throw InputError("w_matrix: dimension mismatch");
  std::vector<std::vector<double>> u;
  u.reserve(static_cast<std::size_t>(d));
  for (const SymMatrix& pi : flag.projections) u.push_back(flag_vector(pi));

  WMatrix wm{SymMatrix(d)};
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        double row = 0.0;
        for (int j = 0; j < d; ++j) row += xi(i, j) * u[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
        s += u[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] * row;
      }
      wm.w.set(a, b, s);
    }
  }
  return wm;
}

}  // namespace specfn
