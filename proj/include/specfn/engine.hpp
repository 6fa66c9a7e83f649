#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "specfn/eigen.hpp"
#include "specfn/expr.hpp"
#include "specfn/matrix.hpp"

namespace specfn {

/// Divided-difference realization. Quotient is (g_i - g_j)/(r_i - r_j);
/// MidpointIntegral is the path-integral form that stays finite when the
/// pair coalesces; Auto switches on the pair gap.
enum class DividedDiffMode { Quotient, MidpointIntegral, Auto };

struct EngineConfig {
  double coalescence_tol = 1e-6;  // Auto switches below tol * (1 + max|r|)
  int quad_nodes = 32;            // Gauss-Legendre nodes per path variable
  int max_order = 4;              // derivative order cap
  bool fd_consistency_check = false;
  DividedDiffMode dd_mode = DividedDiffMode::Auto;

  void validate() const;
};

/// Per-pair route taken by the last derivative evaluation.
struct PairModeRecord {
  int i = 0, j = 0;        // 0-based eigen-indices, i < j
  double gap = 0.0;        // |r_i - r_j|
  bool midpoint = false;   // true when the integral form fired
};

struct EngineDiagnostics {
  std::vector<double> eigenvalues;
  std::vector<double> gaps;  // consecutive |r_i - r_{i+1}|
  std::vector<PairModeRecord> pair_modes;
  std::optional<double> fd_consistency_rel_err;
};

/// A symmetric function of the eigenvalues with cached exact partials.
/// Construction instantiates the expression at dimension d and enforces
/// permutation symmetry (the spectral extension is only well defined for
/// symmetric f).
class DiagFunction {
 public:
  DiagFunction(const DiagExpr& f, int d,
               std::map<std::string, double> params = {},
               int max_order = kDefaultMaxOrder,
               bool enforce_symmetry = true);

  int dim() const { return d_; }
  int max_order() const { return max_order_; }
  const DiagExpr& expr() const { return inst_; }
  const std::map<std::string, double>& params() const { return params_; }

  double value(const std::vector<double>& r) const;
  double partial_value(const MultiIndex& alpha, const std::vector<double>& r) const;

 private:
  const ExprPtr& partial_ast(const MultiIndex& alpha) const;

  int d_;
  int max_order_;
  DiagExpr inst_;
  std::map<std::string, double> params_;
  mutable std::map<MultiIndex, ExprPtr> cache_;
  mutable std::mutex mu_;
};

// ---------------------------------------------------------------------------
// TermSum: the symbolic intermediates of the (L_xi D)^n engine
// ---------------------------------------------------------------------------

/// Cyclic word (a_1 ... a_m) over eigen-indices standing for the trace
/// monomial Tr(pi_{a_1} xi pi_{a_2} xi ... pi_{a_m} xi). Stored in the
/// lexicographically minimal rotation/reversal so equal monomials merge.
struct CyclicWord {
  std::vector<int> letters;

  void canonicalize();
  double eval(const WMatrix& w) const;
  bool operator==(const CyclicWord& o) const { return letters == o.letters; }
  bool operator<(const CyclicWord& o) const { return letters < o.letters; }
};

/// Sparse polynomial in the path variables t_0..t_{m-1} of a term's
/// substitution chain. Exponent keys always have length m.
struct TPoly {
  std::map<std::vector<int>, double> mono;

  static TPoly constant(double v, int nvars);
  bool zero() const { return mono.empty(); }
  int nvars() const { return mono.empty() ? 0 : static_cast<int>(mono.begin()->first.size()); }

  TPoly& operator+=(const TPoly& o);
  TPoly& operator*=(double s);
  friend TPoly operator*(const TPoly& a, const TPoly& b);

  /// Re-keys every monomial with a zero exponent prepended (new newest
  /// path variable).
  TPoly shifted() const;

  double eval(const std::vector<double>& t) const;
};

/// ((y_i - y_j))^(-pow) where y is the point after the `level`-newest
/// substitutions wore off; level records the chain length at creation.
struct PairFactor {
  int i = 0, j = 0;  // i < j
  int pow = 1;
  int level = 0;

  bool operator<(const PairFactor& o) const {
    return std::tie(i, j, pow, level) < std::tie(o.i, o.j, o.pow, o.level);
  }
  bool operator==(const PairFactor& o) const {
    return i == o.i && j == o.j && pow == o.pow && level == o.level;
  }
};

/// One term: weight(t) * prod(pair factors) * (d^alpha f)(path point) *
/// prod(cyclic trace words). The chain lists midpoint substitutions
/// newest-first; each entry owns one path variable.
struct Term {
  MultiIndex alpha;
  std::vector<CyclicWord> words;           // sorted
  std::vector<std::pair<int, int>> chain;  // (i < j), newest first
  std::vector<PairFactor> pairs;           // sorted
  TPoly weight;
};

class TermSum {
 public:
  TermSum() = default;
  explicit TermSum(int d) : d_(d) {}

  /// The constant function f itself: one empty term with weight 1.
  static TermSum seed(int d);

  int dim() const { return d_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void push(Term t);
  /// Merges structurally equal terms and drops zero weights.
  void canonicalize();

  /// Numeric value at (r, flag-as-w, xi) given the diagonal restriction.
  double evaluate(const DiagFunction& fn, const std::vector<double>& r,
                  const WMatrix& w, const EngineConfig& cfg) const;

  int max_word_letters() const;

 private:
  int d_ = 0;
  std::vector<Term> terms_;
};

/// d/dr_k through every r-dependence (partial orders, path Jacobians,
/// pair-factor denominators). Component k of the result is the k-th
/// partial as a TermSum.
std::vector<TermSum> apply_D(const TermSum& ts);

/// One application of the operator L_xi to the gradient vector `tsv`
/// (= apply_D(prev)). Separated pairs take the quotient route
/// delta_ij(prev)/(r_i - r_j); coalescent pairs take the midpoint-path
/// integral of delta_ij(tsv_i - tsv_j). `prev` must be the TermSum that
/// produced `tsv`.
TermSum apply_L(const std::vector<TermSum>& tsv, const TermSum& prev,
                const std::vector<double>& r, const EngineConfig& cfg,
                std::vector<PairModeRecord>* modes = nullptr);

/// delta_{ij xi} word rewriting on a single term (the product rule over
/// letters equal to i or j); exposed for tests.
std::vector<Term> delta_rewrite(const Term& t, int i, int j);

// ---------------------------------------------------------------------------
// spectral operations
// ---------------------------------------------------------------------------

/// F(X) = f(eigenvalues of X), eigenvalues sorted non-increasing.
double eval_F(const DiagExpr& f, const SymMatrix& x,
              const std::map<std::string, double>& params = {},
              const EngineConfig& cfg = {});

/// Derivatives of the spectral data along xi on a separated spectrum:
/// rdot_i = <pi_i, xi>, pidot_i = sum_{j != i} (pi_j xi pi_i + pi_i xi pi_j)/(r_i - r_j).
struct EigenDerivative {
  std::vector<double> rdot;
  std::vector<SymMatrix> pidot;
};

EigenDerivative eigen_derivative(const SymMatrix& x, const SymMatrix& xi,
                                 const EngineConfig& cfg = {});

/// grad F(X) = sum_i f_{r_i}(r) pi_i.
SymMatrix gradient(const DiagExpr& f, const SymMatrix& x,
                   const std::map<std::string, double>& params = {},
                   const EngineConfig& cfg = {});

/// Scalar divided difference of the gradient components of d^alpha f over
/// the pair (i, j):
///   Quotient:          (d^{alpha+e_i} f - d^{alpha+e_j} f)(r) / (r_i - r_j)
///   MidpointIntegral:  1/2 int_0^1 (d_i - d_j)(d^{alpha+e_i} f - d^{alpha+e_j} f)(r(t)) dt
/// with r(t) the midpoint path moving only coordinates i and j. The two
/// routes agree for alpha_i == alpha_j (the engine only needs that case);
/// the integral stays finite at r_i == r_j.
double divided_difference(const DiagFunction& fn, const MultiIndex& alpha,
                          const std::vector<double>& r, int i, int j,
                          DividedDiffMode mode, const EngineConfig& cfg = {});

/// Hessian action H[xi] = sum_{i,k} f_{r_i r_k} <pi_k, xi> pi_i
///   + sum_{i<j} DD(i,j) (pi_i xi pi_j + pi_j xi pi_i), DD in Auto mode.
SymMatrix hessian_apply(const DiagExpr& f, const SymMatrix& x, const SymMatrix& xi,
                        const std::map<std::string, double>& params = {},
                        const EngineConfig& cfg = {});

/// n-th directional derivative D^n_xi F(X) via (L_xi D)^n f.
double dirderiv(const DiagExpr& f, const SymMatrix& x, const SymMatrix& xi, int n,
                const std::map<std::string, double>& params = {},
                const EngineConfig& cfg = {}, EngineDiagnostics* diag = nullptr);

/// Same, at a precomputed spectrum (used by flag-independence checks).
double dirderiv_at(const DiagFunction& fn, const Spectrum& s, const SymMatrix& xi,
                   int n, const EngineConfig& cfg = {},
                   EngineDiagnostics* diag = nullptr);

}  // namespace specfn
