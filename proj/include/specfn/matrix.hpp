#pragma once

#include <vector>

#include "specfn/common.hpp"

namespace specfn {

/// Dense d x d real matrix, row-major. Workhorse for intermediates that are
/// not symmetric (products like pi * xi).
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
    if (dim < 1) throw InputError("Matrix: dim must be >= 1");
  }
  static Matrix identity(int dim);

  int dim() const { return dim_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  Matrix transposed() const;
  double trace() const;
  double frobenius() const;
  double max_abs() const;

  const std::vector<double>& data() const { return a_; }

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

/// Real symmetric d x d matrix. Entries are stored exactly symmetrized:
/// construction averages (i,j) and (j,i), so entries[i][j] == entries[j][i]
/// holds bitwise afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : m_(dim) {}

  /// Symmetrizes the argument: (m + m^T) / 2.
  static SymMatrix from_matrix(const Matrix& m);
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const std::vector<double>& d);

  int dim() const { return m_.dim(); }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Symmetric write: sets (i,j) and (j,i).
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Matrix& as_matrix() const { return m_; }

  SymMatrix& operator+=(const SymMatrix& o) {
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(double s) {
    m_ *= s;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  double trace() const { return m_.trace(); }
  double frobenius() const { return m_.frobenius(); }
  double max_abs() const { return m_.max_abs(); }

 private:
  Matrix m_;
};

/// Frobenius inner product Trace(A B^T) = Trace(A B) for symmetric inputs.
double inner(const SymMatrix& a, const SymMatrix& b);

/// Q X Q^T, re-symmetrized. Q must be orthogonal within 1e-10.
SymMatrix conjugate(const SymMatrix& x, const Matrix& q);

/// Gaussian symmetric matrix, entries N(0,1) symmetrized.
SymMatrix rand_sym(int dim, std::uint64_t seed);

/// Haar-ish random rotation from QR of a Gaussian matrix.
Matrix rand_orthogonal(int dim, Rng& rng);
Matrix rand_orthogonal(int dim, std::uint64_t seed);

/// Random symmetric matrix with the prescribed eigenvalues: Q diag(r) Q^T.
SymMatrix sym_with_spectrum(const std::vector<double>& r, std::uint64_t seed);

bool is_orthogonal(const Matrix& q, double tol = 1e-10);
bool is_skew(const Matrix& a, double tol = 1e-12);

}  // namespace specfn
