#include "specfn/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

namespace specfn {

int MultiIndex::order() const {
  return std::accumulate(a.begin(), a.end(), 0);
}

MultiIndex MultiIndex::plus(int i) const {
  MultiIndex m = *this;
  m.a[static_cast<std::size_t>(i)] += 1;
  return m;
}

// ---------------------------------------------------------------------------
// node constructors with constant folding
// ---------------------------------------------------------------------------

namespace {

ExprPtr node(Expr e) { return std::make_shared<Expr>(std::move(e)); }

ExprPtr mk_const(double v) {
  Expr e;
  e.kind = Expr::Kind::Const;
  e.value = v;
  return node(std::move(e));
}

bool is_const(const ExprPtr& e, double v) {
  return e->kind == Expr::Kind::Const && e->value == v;
}
bool is_const(const ExprPtr& e) { return e->kind == Expr::Kind::Const; }

ExprPtr mk_bin(Expr::Kind k, ExprPtr a, ExprPtr b, int src = -1) {
  Expr e;
  e.kind = k;
  e.a = std::move(a);
  e.b = std::move(b);
  e.src = src;
  return node(std::move(e));
}

ExprPtr mk_add(ExprPtr a, ExprPtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return mk_const(a->value + b->value);
  return mk_bin(Expr::Kind::Add, std::move(a), std::move(b));
}

ExprPtr mk_sub(ExprPtr a, ExprPtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return mk_const(a->value - b->value);
  return mk_bin(Expr::Kind::Sub, std::move(a), std::move(b));
}

ExprPtr mk_neg(ExprPtr a) {
  if (is_const(a)) return mk_const(-a->value);
  Expr e;
  e.kind = Expr::Kind::Neg;
  e.a = std::move(a);
  return node(std::move(e));
}

ExprPtr mk_mul(ExprPtr a, ExprPtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return mk_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return mk_const(a->value * b->value);
  return mk_bin(Expr::Kind::Mul, std::move(a), std::move(b));
}

ExprPtr mk_div(ExprPtr a, ExprPtr b, int src = -1) {
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return mk_const(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b) && b->value != 0.0) return mk_const(a->value / b->value);
  return mk_bin(Expr::Kind::Div, std::move(a), std::move(b), src);
}

ExprPtr mk_pow(ExprPtr a, int k, int src = -1) {
  if (k == 0) return mk_const(1.0);
  if (k == 1) return a;
  if (is_const(a)) return mk_const(std::pow(a->value, k));
  Expr e;
  e.kind = Expr::Kind::Pow;
  e.a = std::move(a);
  e.ipow = k;
  e.src = src;
  return node(std::move(e));
}

ExprPtr mk_fn(Expr::Kind k, ExprPtr a, int src = -1) {
  Expr e;
  e.kind = k;
  e.a = std::move(a);
  e.src = src;
  return node(std::move(e));
}

ExprPtr mk_var(int idx0) {
  Expr e;
  e.kind = Expr::Kind::Var;
  e.index = idx0;
  return node(std::move(e));
}

// ---------------------------------------------------------------------------
// lexer / parser
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Num, Ident, LParen, RParen, LBracket, RBracket, Comma,
                    Plus, Minus, Star, Slash, Caret, End };
  Kind kind;
  double num = 0.0;
  std::string text;
  int pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    Token t;
    t.pos = static_cast<int>(i_);
    if (i_ >= s_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + i_;
      char* end = nullptr;
      t.num = std::strtod(begin, &end);
      if (end == begin) throw InputError("syntax error at offset " + std::to_string(i_) + ": bad number");
      i_ += static_cast<std::size_t>(end - begin);
      t.kind = Token::Kind::Num;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = s_.substr(i_, j - i_);
      i_ = j;
      return t;
    }
    ++i_;
    switch (c) {
      case '(': t.kind = Token::Kind::LParen; return t;
      case ')': t.kind = Token::Kind::RParen; return t;
      case '[': t.kind = Token::Kind::LBracket; return t;
      case ']': t.kind = Token::Kind::RBracket; return t;
      case ',': t.kind = Token::Kind::Comma; return t;
      case '+': t.kind = Token::Kind::Plus; return t;
      case '-': t.kind = Token::Kind::Minus; return t;
      case '*': t.kind = Token::Kind::Star; return t;
      case '/': t.kind = Token::Kind::Slash; return t;
      case '^': t.kind = Token::Kind::Caret; return t;
      default:
        throw InputError("syntax error at offset " + std::to_string(i_ - 1) +
                         ": unexpected character '" + std::string(1, c) + "'");
    }
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { advance(); }

  ExprPtr parse() {
    ExprPtr e = expr();
    expect(Token::Kind::End, "end of input");
    return e;
  }

 private:
  Lexer lex_;
  Token cur_;
  std::vector<std::string> bound_;

  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& what) {
    throw InputError("syntax error at offset " + std::to_string(cur_.pos) + ": " + what);
  }

  void expect(Token::Kind k, const std::string& what) {
    if (cur_.kind != k) fail("expected " + what);
    advance();
  }

  int expect_int(const std::string& what) {
    bool neg = false;
    if (cur_.kind == Token::Kind::Minus) {
      neg = true;
      advance();
    }
    if (cur_.kind != Token::Kind::Num) fail("expected " + what);
    const double v = cur_.num;
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(what + " must be an integer");
    advance();
    return neg ? -static_cast<int>(v) : static_cast<int>(v);
  }

  bool is_bound(const std::string& name) const {
    return std::find(bound_.begin(), bound_.end(), name) != bound_.end();
  }

  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (cur_.kind == Token::Kind::Plus) {
        advance();
        e = mk_add(e, term());
      } else if (cur_.kind == Token::Kind::Minus) {
        advance();
        e = mk_sub(e, term());
      } else {
        return e;
      }
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    for (;;) {
      if (cur_.kind == Token::Kind::Star) {
        advance();
        e = mk_mul(e, unary());
      } else if (cur_.kind == Token::Kind::Slash) {
        const int src = cur_.pos;
        advance();
        e = mk_div(e, unary(), src);
      } else {
        return e;
      }
    }
  }

  ExprPtr unary() {
    if (cur_.kind == Token::Kind::Minus) {
      advance();
      return mk_neg(unary());
    }
    if (cur_.kind == Token::Kind::Plus) {
      advance();
      return unary();
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (cur_.kind == Token::Kind::Caret) {
      const int src = cur_.pos;
      advance();
      const int k = expect_int("integer exponent");
      return mk_pow(base, k, src);
    }
    return base;
  }

  ExprPtr atom() {
    const int src = cur_.pos;
    if (cur_.kind == Token::Kind::Num) {
      const double v = cur_.num;
      advance();
      return mk_const(v);
    }
    if (cur_.kind == Token::Kind::LParen) {
      advance();
      ExprPtr e = expr();
      expect(Token::Kind::RParen, "')'");
      return e;
    }
    if (cur_.kind != Token::Kind::Ident) fail("expected expression");
    const std::string name = cur_.text;
    advance();

    if (name == "r") {
      expect(Token::Kind::LBracket, "'[' after r");
      Expr e;
      e.src = src;
      if (cur_.kind == Token::Kind::Num) {
        const double v = cur_.num;
        if (v != std::floor(v) || v < 1) fail("r index must be a positive integer");
        e.kind = Expr::Kind::VarLit;
        e.index = static_cast<int>(v);
        advance();
      } else if (cur_.kind == Token::Kind::Ident && is_bound(cur_.text)) {
        e.kind = Expr::Kind::VarIdx;
        e.name = cur_.text;
        advance();
      } else if (cur_.kind == Token::Kind::Ident) {
        fail("unbound index '" + cur_.text + "'");
      } else {
        fail("expected index");
      }
      expect(Token::Kind::RBracket, "']'");
      return node(std::move(e));
    }

    if (name == "sum" || name == "prod") {
      expect(Token::Kind::LParen, "'('");
      if (cur_.kind != Token::Kind::Ident) fail("expected index variable");
      const std::string var = cur_.text;
      advance();
      expect(Token::Kind::Comma, "','");
      bound_.push_back(var);
      ExprPtr body = expr();
      bound_.pop_back();
      expect(Token::Kind::RParen, "')'");
      Expr e;
      e.kind = (name == "sum") ? Expr::Kind::SumIdx : Expr::Kind::ProdIdx;
      e.name = var;
      e.a = body;
      e.src = src;
      return node(std::move(e));
    }

    if (name == "pow") {
      expect(Token::Kind::LParen, "'('");
      ExprPtr base = expr();
      expect(Token::Kind::Comma, "','");
      const int k = expect_int("integer exponent");
      expect(Token::Kind::RParen, "')'");
      return mk_pow(base, k, src);
    }

    if (name == "psum" || name == "esym") {
      expect(Token::Kind::LParen, "'('");
      const int k = expect_int("order");
      expect(Token::Kind::RParen, "')'");
      if (k < 1) fail(name + " order must be >= 1");
      Expr e;
      e.kind = (name == "psum") ? Expr::Kind::PSum : Expr::Kind::ESym;
      e.k = k;
      e.src = src;
      return node(std::move(e));
    }

    if (name == "logdet") {
      if (cur_.kind == Token::Kind::LParen) {
        advance();
        expect(Token::Kind::RParen, "')'");
      }
      Expr e;
      e.kind = Expr::Kind::LogDet;
      e.src = src;
      return node(std::move(e));
    }

    if (name == "log" || name == "exp" || name == "sin" || name == "cos" || name == "sqrt") {
      expect(Token::Kind::LParen, "'('");
      ExprPtr arg = expr();
      expect(Token::Kind::RParen, "')'");
      Expr::Kind k = Expr::Kind::Log;
      if (name == "exp") k = Expr::Kind::Exp;
      else if (name == "sin") k = Expr::Kind::Sin;
      else if (name == "cos") k = Expr::Kind::Cos;
      else if (name == "sqrt") k = Expr::Kind::Sqrt;
      return mk_fn(k, arg, src);
    }

    if (is_bound(name)) fail("index variable '" + name + "' used as a value");

    Expr e;
    e.kind = Expr::Kind::Param;
    e.name = name;
    e.src = src;
    return node(std::move(e));
  }
};

// ---------------------------------------------------------------------------
// instantiation
// ---------------------------------------------------------------------------

ExprPtr instantiate_node(const ExprPtr& e, int d, std::map<std::string, int>& env) {
  switch (e->kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Param:
    case Expr::Kind::Var:
      return e;
    case Expr::Kind::VarLit:
      if (e->index < 1 || e->index > d)
        throw InputError("r[" + std::to_string(e->index) + "] out of range for dimension " +
                         std::to_string(d));
      return mk_var(e->index - 1);
    case Expr::Kind::VarIdx: {
      auto it = env.find(e->name);
      if (it == env.end()) throw InputError("unbound index '" + e->name + "'");
      return mk_var(it->second);
    }
    case Expr::Kind::SumIdx:
    case Expr::Kind::ProdIdx: {
      const bool is_sum = e->kind == Expr::Kind::SumIdx;
      ExprPtr acc = mk_const(is_sum ? 0.0 : 1.0);
      for (int i = 0; i < d; ++i) {
        env[e->name] = i;
        ExprPtr body = instantiate_node(e->a, d, env);
        acc = is_sum ? mk_add(acc, body) : mk_mul(acc, body);
      }
      env.erase(e->name);
      return acc;
    }
    case Expr::Kind::PSum: {
      ExprPtr acc = mk_const(0.0);
      for (int i = 0; i < d; ++i) acc = mk_add(acc, mk_pow(mk_var(i), e->k, e->src));
      return acc;
    }
    case Expr::Kind::LogDet: {
      ExprPtr acc = mk_const(0.0);
      for (int i = 0; i < d; ++i) acc = mk_add(acc, mk_fn(Expr::Kind::Log, mk_var(i), e->src));
      return acc;
    }
    case Expr::Kind::ESym: {
      if (e->k > d)
        throw InputError("esym(" + std::to_string(e->k) + ") needs dimension >= " +
                         std::to_string(e->k));
      Expr out = *e;  // keep k and src, excl stays as-is
      out.a = nullptr;
      out.b = nullptr;
      return node(std::move(out));
    }
    case Expr::Kind::Neg:
      return mk_neg(instantiate_node(e->a, d, env));
    case Expr::Kind::Pow:
      return mk_pow(instantiate_node(e->a, d, env), e->ipow, e->src);
    case Expr::Kind::Log:
    case Expr::Kind::Exp:
    case Expr::Kind::Sin:
    case Expr::Kind::Cos:
    case Expr::Kind::Sqrt:
      return mk_fn(e->kind, instantiate_node(e->a, d, env), e->src);
    case Expr::Kind::Add:
      return mk_add(instantiate_node(e->a, d, env), instantiate_node(e->b, d, env));
    case Expr::Kind::Sub:
      return mk_sub(instantiate_node(e->a, d, env), instantiate_node(e->b, d, env));
    case Expr::Kind::Mul:
      return mk_mul(instantiate_node(e->a, d, env), instantiate_node(e->b, d, env));
    case Expr::Kind::Div:
      return mk_div(instantiate_node(e->a, d, env), instantiate_node(e->b, d, env), e->src);
  }
  throw InputError("instantiate: unreachable");
}

double esym_value(int k, const std::vector<int>& excl, const std::vector<double>& r) {
  // Elementary symmetric polynomial over the non-excluded coordinates, by the
  // usual one-pass DP over e_0..e_k.
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int j = 0; j < static_cast<int>(r.size()); ++j) {
    if (std::binary_search(excl.begin(), excl.end(), j)) continue;
    const double x = r[static_cast<std::size_t>(j)];
    for (int m = std::min<int>(k, j + 1); m >= 1; --m)
      e[static_cast<std::size_t>(m)] += x * e[static_cast<std::size_t>(m) - 1];
  }
  return e[static_cast<std::size_t>(k)];
}

std::string node_label(const Expr& e) {
  std::string base;
  switch (e.kind) {
    case Expr::Kind::Log: base = "log"; break;
    case Expr::Kind::Sqrt: base = "sqrt"; break;
    case Expr::Kind::Div: base = "division"; break;
    case Expr::Kind::Pow: base = "pow"; break;
    default: base = "expression"; break;
  }
  if (e.src >= 0) base += " at offset " + std::to_string(e.src);
  return base;
}

}  // namespace

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

DiagExpr parse(const std::string& src) {
  DiagExpr f;
  f.source = src;
  Parser p(src);
  f.tmpl = p.parse();
  return f;
}

DiagExpr instantiate(const DiagExpr& f, int d) {
  if (d < 1) throw InputError("instantiate: dimension must be >= 1");
  if (!f.tmpl) throw InputError("instantiate: empty expression");
  if (f.dim == d && f.ast) return f;
  DiagExpr out = f;
  out.dim = d;
  std::map<std::string, int> env;
  out.ast = instantiate_node(f.tmpl, d, env);
  return out;
}

double eval_node(const ExprPtr& e, const std::vector<double>& r,
                 const std::map<std::string, double>& params) {
  switch (e->kind) {
    case Expr::Kind::Const:
      return e->value;
    case Expr::Kind::Var:
      return r[static_cast<std::size_t>(e->index)];
    case Expr::Kind::Param: {
      auto it = params.find(e->name);
      if (it == params.end()) throw InputError("unbound parameter '" + e->name + "'");
      return it->second;
    }
    case Expr::Kind::Add:
      return eval_node(e->a, r, params) + eval_node(e->b, r, params);
    case Expr::Kind::Sub:
      return eval_node(e->a, r, params) - eval_node(e->b, r, params);
    case Expr::Kind::Mul:
      return eval_node(e->a, r, params) * eval_node(e->b, r, params);
    case Expr::Kind::Div: {
      const double den = eval_node(e->b, r, params);
      if (den == 0.0) throw DomainError("division by zero in " + node_label(*e));
      return eval_node(e->a, r, params) / den;
    }
    case Expr::Kind::Neg:
      return -eval_node(e->a, r, params);
    case Expr::Kind::Pow: {
      const double base = eval_node(e->a, r, params);
      if (base == 0.0 && e->ipow < 0)
        throw DomainError("zero base with negative exponent in " + node_label(*e));
      return std::pow(base, e->ipow);
    }
    case Expr::Kind::Log: {
      const double v = eval_node(e->a, r, params);
      if (v <= 0.0) throw DomainError("non-positive argument to " + node_label(*e));
      return std::log(v);
    }
    case Expr::Kind::Exp:
      return std::exp(eval_node(e->a, r, params));
    case Expr::Kind::Sin:
      return std::sin(eval_node(e->a, r, params));
    case Expr::Kind::Cos:
      return std::cos(eval_node(e->a, r, params));
    case Expr::Kind::Sqrt: {
      const double v = eval_node(e->a, r, params);
      if (v < 0.0) throw DomainError("negative argument to " + node_label(*e));
      return std::sqrt(v);
    }
    case Expr::Kind::ESym:
      if (e->k > static_cast<int>(r.size()) - static_cast<int>(e->excl.size())) return 0.0;
      return esym_value(e->k, e->excl, r);
    default:
      throw InputError("eval: expression not instantiated");
  }
}

double eval(const DiagExpr& f, const std::vector<double>& r,
            const std::map<std::string, double>& params) {
  if (!f.ast) throw InputError("eval: expression not instantiated");
  if (static_cast<int>(r.size()) != f.dim) throw InputError("eval: wrong point dimension");
  return eval_node(f.ast, r, params);
}

ExprPtr derivative_node(const ExprPtr& e, int i) {
  switch (e->kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Param:
      return mk_const(0.0);
    case Expr::Kind::Var:
      return mk_const(e->index == i ? 1.0 : 0.0);
    case Expr::Kind::Add:
      return mk_add(derivative_node(e->a, i), derivative_node(e->b, i));
    case Expr::Kind::Sub:
      return mk_sub(derivative_node(e->a, i), derivative_node(e->b, i));
    case Expr::Kind::Mul:
      return mk_add(mk_mul(derivative_node(e->a, i), e->b),
                    mk_mul(e->a, derivative_node(e->b, i)));
    case Expr::Kind::Div:
      return mk_div(mk_sub(mk_mul(derivative_node(e->a, i), e->b),
                           mk_mul(e->a, derivative_node(e->b, i))),
                    mk_pow(e->b, 2), e->src);
    case Expr::Kind::Neg:
      return mk_neg(derivative_node(e->a, i));
    case Expr::Kind::Pow:
      return mk_mul(mk_const(e->ipow),
                    mk_mul(mk_pow(e->a, e->ipow - 1, e->src), derivative_node(e->a, i)));
    case Expr::Kind::Log:
      return mk_div(derivative_node(e->a, i), e->a, e->src);
    case Expr::Kind::Exp:
      return mk_mul(derivative_node(e->a, i), e);
    case Expr::Kind::Sin:
      return mk_mul(derivative_node(e->a, i), mk_fn(Expr::Kind::Cos, e->a, e->src));
    case Expr::Kind::Cos:
      return mk_neg(mk_mul(derivative_node(e->a, i), mk_fn(Expr::Kind::Sin, e->a, e->src)));
    case Expr::Kind::Sqrt:
      return mk_div(derivative_node(e->a, i),
                    mk_mul(mk_const(2.0), mk_fn(Expr::Kind::Sqrt, e->a, e->src)), e->src);
    case Expr::Kind::ESym: {
      if (std::binary_search(e->excl.begin(), e->excl.end(), i)) return mk_const(0.0);
      if (e->k == 1) return mk_const(1.0);
      Expr out = *e;
      out.k = e->k - 1;
      out.excl.insert(std::upper_bound(out.excl.begin(), out.excl.end(), i), i);
      return node(std::move(out));
    }
    default:
      throw InputError("derivative: expression not instantiated");
  }
}

DiagExpr partial(const DiagExpr& f, const MultiIndex& alpha, int max_order) {
  if (!f.ast) throw InputError("partial: expression not instantiated");
  if (alpha.dim() != f.dim) throw InputError("partial: multi-index dimension mismatch");
  if (alpha.order() > max_order)
    throw InputError("partial: order " + std::to_string(alpha.order()) +
                     " exceeds cap " + std::to_string(max_order));
  DiagExpr out = f;
  ExprPtr cur = f.ast;
  for (int i = 0; i < alpha.dim(); ++i)
    for (int c = 0; c < alpha.a[static_cast<std::size_t>(i)]; ++c)
      cur = derivative_node(cur, i);
  out.ast = cur;
  return out;
}

namespace {

bool contains_literal_index(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == Expr::Kind::VarLit || e->kind == Expr::Kind::Var) return true;
  return contains_literal_index(e->a) || contains_literal_index(e->b);
}

}  // namespace

Symmetry check_symmetry(const DiagExpr& f, int d, int trials, std::uint64_t seed) {
  if (d < 1) throw InputError("check_symmetry: dimension must be >= 1");
  if (f.tmpl && !contains_literal_index(f.tmpl)) return Symmetry::symmetric;

  DiagExpr g = instantiate(f, d);
  Rng rng(seed);
  int done = 0;
  int domain_failures = 0;
  const int cap = 12 * std::max(trials, 1);
  bool positive_sampler = false;

  while (done < trials) {
    if (domain_failures > cap) return Symmetry::indeterminate;
    std::vector<double> r(static_cast<std::size_t>(d));
    for (double& x : r)
      x = positive_sampler ? rng.uniform(0.3, 2.9) : rng.uniform(-2.0, 2.0);
    std::vector<double> perm = r;
    rng.shuffle(perm);
    try {
      const double base = eval(g, r);
      const double permuted = eval(g, perm);
      if (std::abs(permuted - base) > 1e-9 * (1.0 + std::abs(base)))
        return Symmetry::asymmetric;
      ++done;
    } catch (const DomainError&) {
      ++domain_failures;
      if (domain_failures > cap / 2) positive_sampler = true;
    } catch (const InputError&) {
      // Unbound parameter: bind nothing here, treat like a domain failure so
      // parameterized expressions come back indeterminate, not crashed.
      return Symmetry::indeterminate;
    }
  }
  return Symmetry::symmetric;
}

std::string to_string(const ExprPtr& e) {
  if (!e) return "<null>";
  std::ostringstream os;
  switch (e->kind) {
    case Expr::Kind::Const: os << e->value; break;
    case Expr::Kind::Var: os << "r[" << e->index + 1 << "]"; break;
    case Expr::Kind::VarLit: os << "r[" << e->index << "]"; break;
    case Expr::Kind::VarIdx: os << "r[" << e->name << "]"; break;
    case Expr::Kind::Param: os << e->name; break;
    case Expr::Kind::Add: os << "(" << to_string(e->a) << " + " << to_string(e->b) << ")"; break;
    case Expr::Kind::Sub: os << "(" << to_string(e->a) << " - " << to_string(e->b) << ")"; break;
    case Expr::Kind::Mul: os << "(" << to_string(e->a) << " * " << to_string(e->b) << ")"; break;
    case Expr::Kind::Div: os << "(" << to_string(e->a) << " / " << to_string(e->b) << ")"; break;
    case Expr::Kind::Neg: os << "(-" << to_string(e->a) << ")"; break;
    case Expr::Kind::Pow: os << "pow(" << to_string(e->a) << ", " << e->ipow << ")"; break;
    case Expr::Kind::Log: os << "log(" << to_string(e->a) << ")"; break;
    case Expr::Kind::Exp: os << "exp(" << to_string(e->a) << ")"; break;
    case Expr::Kind::Sin: os << "sin(" << to_string(e->a) << ")"; break;
    case Expr::Kind::Cos: os << "cos(" << to_string(e->a) << ")"; break;
    case Expr::Kind::Sqrt: os << "sqrt(" << to_string(e->a) << ")"; break;
    case Expr::Kind::SumIdx: os << "sum(" << e->name << ", " << to_string(e->a) << ")"; break;
    case Expr::Kind::ProdIdx: os << "prod(" << e->name << ", " << to_string(e->a) << ")"; break;
    case Expr::Kind::PSum: os << "psum(" << e->k << ")"; break;
    case Expr::Kind::LogDet: os << "logdet"; break;
    case Expr::Kind::ESym: {
      os << "esym(" << e->k;
      if (!e->excl.empty()) {
        os << "; excl";
        for (int j : e->excl) os << " " << j + 1;
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

}  // namespace specfn
