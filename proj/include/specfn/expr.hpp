#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "specfn/common.hpp"

namespace specfn {

/// Multi-index alpha for iterated partials d^alpha f.
struct MultiIndex {
  std::vector<int> a;

  MultiIndex() = default;
  explicit MultiIndex(int d) : a(static_cast<std::size_t>(d), 0) {}

  int dim() const { return static_cast<int>(a.size()); }
  int order() const;
  MultiIndex plus(int i) const;  // alpha + e_i (0-based)

  bool operator==(const MultiIndex& o) const { return a == o.a; }
  bool operator<(const MultiIndex& o) const { return a < o.a; }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression node. Template nodes (VarIdx, SumIdx, ProdIdx, PSum, LogDet)
/// disappear at instantiation; the concrete tree uses the rest.
struct Expr {
  enum class Kind {
    Const, Var, Param,
    Add, Sub, Mul, Div, Neg, Pow,
    Log, Exp, Sin, Cos, Sqrt,
    ESym,                       // e_k over indices not in excl
    VarLit,                     // r[j] with a literal 1-based index
    VarIdx,                     // r[i] with a bound symbolic index
    SumIdx, ProdIdx,            // sum(i, body), prod(i, body)
    PSum, LogDet                // builtins expanded at instantiation
  };

  Kind kind;
  double value = 0.0;          // Const
  int index = -1;              // Var (0-based) or VarLit (1-based)
  std::string name;            // Param / bound index variable
  int ipow = 0;                // Pow exponent
  int k = 0;                   // PSum / ESym order
  std::vector<int> excl;       // ESym excluded indices, sorted, 0-based
  ExprPtr a, b;
  int src = -1;                // byte offset in the source text
};

/// A parsed symmetric-function expression, optionally instantiated at a
/// dimension d (indices expanded, builtins lowered).
struct DiagExpr {
  std::string source;
  ExprPtr tmpl;
  int dim = 0;       // 0 until instantiated
  ExprPtr ast;       // concrete tree, null until instantiated
};

inline constexpr int kDefaultMaxOrder = 4;

/// Parses the surface syntax. Throws InputError with "offset N" on syntax
/// problems; the tree is not yet bound to a dimension.
DiagExpr parse(const std::string& src);

/// Expands sums/products/builtins at dimension d.
DiagExpr instantiate(const DiagExpr& f, int d);

double eval(const DiagExpr& f, const std::vector<double>& r,
            const std::map<std::string, double>& params = {});
double eval_node(const ExprPtr& node, const std::vector<double>& r,
                 const std::map<std::string, double>& params);

/// Exact symbolic partial d^alpha f, constant-folded.
DiagExpr partial(const DiagExpr& f, const MultiIndex& alpha,
                 int max_order = kDefaultMaxOrder);
ExprPtr derivative_node(const ExprPtr& node, int i);

enum class Symmetry { symmetric, asymmetric, indeterminate };

/// Permutation-invariance check: structural fast path (no literal r[k]
/// anywhere), then randomized trials. Domain failures resample and
/// eventually report indeterminate.
Symmetry check_symmetry(const DiagExpr& f, int d, int trials, std::uint64_t seed);

std::string to_string(const ExprPtr& node);

}  // namespace specfn
