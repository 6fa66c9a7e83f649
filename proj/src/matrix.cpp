#include "specfn/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace specfn {

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (o.dim_ != dim_) throw InputError("Matrix: dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (o.dim_ != dim_) throw InputError("Matrix: dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Matrix Matrix::transposed() const {
  Matrix t(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
  return s;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) throw InputError("matmul: dimension mismatch");
  const int d = a.dim();
  Matrix c(d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

SymMatrix SymMatrix::from_matrix(const Matrix& m) {
  SymMatrix s(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i; j < m.dim(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix s(dim);
  for (int i = 0; i < dim; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (int i = 0; i < s.dim(); ++i) s.set(i, i, d[static_cast<std::size_t>(i)]);
  return s;
}

double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InputError("inner: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) s += a(i, j) * b(i, j);
  return s;
}

bool is_orthogonal(const Matrix& q, double tol) {
  const int d = q.dim();
  Matrix qtq = matmul(q.transposed(), q);
  qtq -= Matrix::identity(d);
  return qtq.max_abs() <= tol;
}

bool is_skew(const Matrix& a, double tol) {
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j)
      if (std::abs(a(i, j) + a(j, i)) > tol) return false;
  return true;
}

SymMatrix conjugate(const SymMatrix& x, const Matrix& q) {
  if (q.dim() != x.dim()) throw InputError("conjugate: dimension mismatch");
  if (!is_orthogonal(q)) throw InputError("conjugate: Q is not orthogonal within 1e-10");
  return SymMatrix::from_matrix(matmul(matmul(q, x.as_matrix()), q.transposed()));
}

SymMatrix rand_sym(int dim, std::uint64_t seed) {
  Rng rng(seed);
  SymMatrix s(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) s.set(i, j, rng.normal());
  return s;
}

Matrix rand_orthogonal(int dim, Rng& rng) {
  // Gram-Schmidt on a Gaussian matrix, diagonal signs fixed positive.
  Matrix g(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Matrix q(dim);
  for (int j = 0; j < dim; ++j) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] = g(i, j);
    for (int k = 0; k < j; ++k) {
      double dot = 0.0;
      for (int i = 0; i < dim; ++i) dot += q(i, k) * v[static_cast<std::size_t>(i)];
      for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= dot * q(i, k);
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw NumericalError("rand_orthogonal: degenerate Gaussian draw");
    const double s = (v[static_cast<std::size_t>(j)] >= 0.0) ? 1.0 : -1.0;
    for (int i = 0; i < dim; ++i) q(i, j) = s * v[static_cast<std::size_t>(i)] / nrm;
  }
  return q;
}

Matrix rand_orthogonal(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return rand_orthogonal(dim, rng);
}

SymMatrix sym_with_spectrum(const std::vector<double>& r, std::uint64_t seed) {
  const int d = static_cast<int>(r.size());
  if (d < 1) throw InputError("sym_with_spectrum: empty spectrum");
  Matrix q = rand_orthogonal(d, seed);
  Matrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += q(i, k) * r[static_cast<std::size_t>(k)] * q(j, k);
      m(i, j) = s;
    }
  return SymMatrix::from_matrix(m);
}

}  // namespace specfn
