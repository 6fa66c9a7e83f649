#include "specfn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "specfn/quadrature.hpp"

namespace specfn {

void EngineConfig::validate() const {
  if (coalescence_tol <= 0.0) throw InputError("EngineConfig: coalescence_tol must be > 0");
  if (quad_nodes < 2) throw InputError("EngineConfig: quad_nodes must be >= 2");
  if (max_order < 1) throw InputError("EngineConfig: max_order must be >= 1");
}

// ---------------------------------------------------------------------------
// DiagFunction
// ---------------------------------------------------------------------------

DiagFunction::DiagFunction(const DiagExpr& f, int d, std::map<std::string, double> params,
                           int max_order, bool enforce_symmetry)
    : d_(d), max_order_(max_order), params_(std::move(params)) {
  inst_ = instantiate(f, d);
  if (enforce_symmetry) {
    switch (check_symmetry(f, d, 24, 0xA11CEull)) {
      case Symmetry::symmetric:
        break;
      case Symmetry::asymmetric:
        throw InputError("spectral use requires a symmetric f; '" + f.source +
                         "' is not permutation-symmetric");
      case Symmetry::indeterminate:
        throw InputError("could not verify symmetry of '" + f.source +
                         "' (domain too thin or unbound parameters)");
    }
  }
}

double DiagFunction::value(const std::vector<double>& r) const {
  return eval(inst_, r, params_);
}

namespace {

// Recursive cache fill; the caller holds the lock. Higher orders build on
// the nearest lower-order ancestor so repeated requests stay cheap.
const ExprPtr& fill_partial(std::map<MultiIndex, ExprPtr>& cache, const ExprPtr& root,
                            const MultiIndex& alpha) {
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  if (alpha.order() == 0) return cache.emplace(alpha, root).first->second;
  int last = -1;
  for (int i = 0; i < alpha.dim(); ++i)
    if (alpha.a[static_cast<std::size_t>(i)] > 0) last = i;
  MultiIndex base = alpha;
  base.a[static_cast<std::size_t>(last)] -= 1;
  const ExprPtr& parent = fill_partial(cache, root, base);
  ExprPtr ast = derivative_node(parent, last);
  return cache.emplace(alpha, std::move(ast)).first->second;
}

}  // namespace

const ExprPtr& DiagFunction::partial_ast(const MultiIndex& alpha) const {
  if (alpha.order() > max_order_)
    throw InputError("partial order " + std::to_string(alpha.order()) + " exceeds cap " +
                     std::to_string(max_order_));
  std::lock_guard<std::mutex> lock(mu_);
  return fill_partial(cache_, inst_.ast, alpha);
}

double DiagFunction::partial_value(const MultiIndex& alpha, const std::vector<double>& r) const {
  const ExprPtr ast = partial_ast(alpha);
  return eval_node(ast, r, params_);
}

// ---------------------------------------------------------------------------
// CyclicWord / TPoly
// ---------------------------------------------------------------------------

void CyclicWord::canonicalize() {
  const std::size_t m = letters.size();
  if (m <= 1) return;
  std::vector<int> best = letters;
  std::vector<int> cand = letters;
  for (int rev = 0; rev < 2; ++rev) {
    for (std::size_t s = 0; s < m; ++s) {
      std::rotate(cand.begin(), cand.begin() + 1, cand.end());
      if (cand < best) best = cand;
    }
    std::reverse(cand.begin(), cand.end());
  }
  letters = best;
}

double CyclicWord::eval(const WMatrix& w) const {
  const std::size_t m = letters.size();
  double v = 1.0;
  for (std::size_t s = 0; s < m; ++s)
    v *= w(letters[s], letters[(s + 1) % m]);
  return v;
}

TPoly TPoly::constant(double v, int nvars) {
  TPoly p;
  if (v != 0.0) p.mono.emplace(std::vector<int>(static_cast<std::size_t>(nvars), 0), v);
  return p;
}

TPoly& TPoly::operator+=(const TPoly& o) {
  for (const auto& [e, c] : o.mono) {
    const double v = (mono[e] += c);
    if (v == 0.0) mono.erase(e);
  }
  return *this;
}

TPoly& TPoly::operator*=(double s) {
  if (s == 0.0) {
    mono.clear();
    return *this;
  }
  for (auto& [e, c] : mono) c *= s;
  return *this;
}

TPoly operator*(const TPoly& a, const TPoly& b) {
  TPoly out;
  for (const auto& [ea, ca] : a.mono) {
    for (const auto& [eb, cb] : b.mono) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      const double v = (out.mono[e] += ca * cb);
      if (v == 0.0) out.mono.erase(e);
    }
  }
  return out;
}

TPoly TPoly::shifted() const {
  TPoly out;
  for (const auto& [e, c] : mono) {
    std::vector<int> ne;
    ne.reserve(e.size() + 1);
    ne.push_back(0);
    ne.insert(ne.end(), e.begin(), e.end());
    out.mono.emplace(std::move(ne), c);
  }
  return out;
}

double TPoly::eval(const std::vector<double>& t) const {
  double total = 0.0;
  for (const auto& [e, c] : mono) {
    double v = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int rep = 0; rep < e[i]; ++rep) v *= t[i];
    total += v;
  }
  return total;
}

// ---------------------------------------------------------------------------
// TermSum
// ---------------------------------------------------------------------------

TermSum TermSum::seed(int d) {
  TermSum ts(d);
  Term t;
  t.alpha = MultiIndex(d);
  t.weight = TPoly::constant(1.0, 0);
  ts.terms_.push_back(std::move(t));
  return ts;
}

void TermSum::push(Term t) {
  if (t.weight.zero()) return;
  terms_.push_back(std::move(t));
}

namespace {

using TermKey = std::tuple<std::vector<int>, std::vector<CyclicWord>,
                           std::vector<std::pair<int, int>>, std::vector<PairFactor>>;

TermKey key_of(const Term& t) {
  return {t.alpha.a, t.words, t.chain, t.pairs};
}

}  // namespace

void TermSum::canonicalize() {
  std::map<TermKey, TPoly> merged;
  for (Term& t : terms_) {
    std::sort(t.words.begin(), t.words.end());
    std::sort(t.pairs.begin(), t.pairs.end());
    auto [it, fresh] = merged.emplace(key_of(t), t.weight);
    if (!fresh) it->second += t.weight;
  }
  std::vector<Term> out;
  out.reserve(merged.size());
  for (auto& [key, weight] : merged) {
    if (weight.zero()) continue;
    Term t;
    t.alpha.a = std::get<0>(key);
    t.words = std::get<1>(key);
    t.chain = std::get<2>(key);
    t.pairs = std::get<3>(key);
    t.weight = std::move(weight);
    out.push_back(std::move(t));
  }
  terms_ = std::move(out);
}

int TermSum::max_word_letters() const {
  int m = 0;
  for (const Term& t : terms_) {
    int letters = 0;
    for (const CyclicWord& w : t.words) letters += static_cast<int>(w.letters.size());
    m = std::max(m, letters);
  }
  return m;
}

namespace {

// Midpoint path substitution on coordinates (i, j):
//   y_i = t r_i + (1-t)(r_i + r_j)/2,  y_j = t r_j + (1-t)(r_i + r_j)/2.
std::vector<double> substitute_pair(const std::vector<double>& p, int i, int j, double t) {
  std::vector<double> q = p;
  const double mid = 0.5 * (p[static_cast<std::size_t>(i)] + p[static_cast<std::size_t>(j)]);
  q[static_cast<std::size_t>(i)] = t * p[static_cast<std::size_t>(i)] + (1.0 - t) * mid;
  q[static_cast<std::size_t>(j)] = t * p[static_cast<std::size_t>(j)] + (1.0 - t) * mid;
  return q;
}

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

double TermSum::evaluate(const DiagFunction& fn, const std::vector<double>& r,
                         const WMatrix& w, const EngineConfig& cfg) const {
  cfg.validate();
  std::map<std::vector<std::pair<int, int>>, std::vector<std::size_t>> groups;
  for (std::size_t idx = 0; idx < terms_.size(); ++idx)
    groups[terms_[idx].chain].push_back(idx);

  Kahan total;
  for (const auto& [chain, indices] : groups) {
    const int m = static_cast<int>(chain.size());
    const QuadRule* rule = (m > 0) ? &gauss_legendre_01(cfg.quad_nodes) : nullptr;
    const int q = (m > 0) ? cfg.quad_nodes : 1;

    std::vector<Kahan> acc(indices.size());
    std::vector<int> digits(static_cast<std::size_t>(m), 0);
    std::vector<double> tvals(static_cast<std::size_t>(m), 0.0);

    for (;;) {
      double glw = 1.0;
      for (int v = 0; v < m; ++v) {
        tvals[static_cast<std::size_t>(v)] = rule->nodes[static_cast<std::size_t>(digits[static_cast<std::size_t>(v)])];
        glw *= rule->weights[static_cast<std::size_t>(digits[static_cast<std::size_t>(v)])];
      }

      // Point sequence: pts[s] applies the s newest substitutions.
      std::vector<std::vector<double>> pts;
      pts.reserve(static_cast<std::size_t>(m) + 1);
      pts.push_back(r);
      for (int s = 1; s <= m; ++s)
        pts.push_back(substitute_pair(pts.back(), chain[static_cast<std::size_t>(s - 1)].first,
                                      chain[static_cast<std::size_t>(s - 1)].second,
                                      tvals[static_cast<std::size_t>(s - 1)]));

      std::map<MultiIndex, double> fcache;
      for (std::size_t ti = 0; ti < indices.size(); ++ti) {
        const Term& term = terms_[indices[ti]];
        const double wv = term.weight.eval(tvals);
        if (wv == 0.0) continue;
        double factor = wv;
        for (const PairFactor& pf : term.pairs) {
          const std::vector<double>& y = pts[static_cast<std::size_t>(m - pf.level)];
          const double den = y[static_cast<std::size_t>(pf.i)] - y[static_cast<std::size_t>(pf.j)];
          if (den == 0.0)
            throw NumericalError("divided-difference quotient hit an exactly repeated eigenvalue");
          for (int rep = 0; rep < pf.pow; ++rep) factor /= den;
        }
        auto it = fcache.find(term.alpha);
        if (it == fcache.end())
          it = fcache.emplace(term.alpha, fn.partial_value(term.alpha, pts.back())).first;
        acc[ti].add(glw * factor * it->second);
      }

      int v = m - 1;
      for (; v >= 0; --v) {
        if (++digits[static_cast<std::size_t>(v)] < q) break;
        digits[static_cast<std::size_t>(v)] = 0;
      }
      if (v < 0) break;
    }

    for (std::size_t ti = 0; ti < indices.size(); ++ti) {
      const Term& term = terms_[indices[ti]];
      double wordval = 1.0;
      for (const CyclicWord& word : term.words) wordval *= word.eval(w);
      total.add(acc[ti].sum * wordval);
    }
  }
  return total.sum;
}

// ---------------------------------------------------------------------------
// apply_D
// ---------------------------------------------------------------------------

namespace {

// Prefix Jacobians of a substitution chain: J[s] = A(chain[s-1], t_{s-1}) ... A(chain[0], t_0),
// each entry a polynomial in the chain's path variables.
using PolyMatrix = std::vector<std::vector<TPoly>>;

std::vector<PolyMatrix> jacobian_prefixes(const std::vector<std::pair<int, int>>& chain, int d) {
  const int m = static_cast<int>(chain.size());
  std::vector<PolyMatrix> J;
  J.reserve(static_cast<std::size_t>(m) + 1);
  PolyMatrix id(static_cast<std::size_t>(d), std::vector<TPoly>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i) id[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = TPoly::constant(1.0, m);
  J.push_back(id);
  for (int s = 1; s <= m; ++s) {
    const auto [i, j] = chain[static_cast<std::size_t>(s - 1)];
    // Rows i and j become ((1+t)/2, (1-t)/2) mixes; A is symmetric in i, j.
    TPoly half_plus;   // (1 + t_{s-1}) / 2
    TPoly half_minus;  // (1 - t_{s-1}) / 2
    std::vector<int> e0(static_cast<std::size_t>(m), 0);
    std::vector<int> e1 = e0;
    e1[static_cast<std::size_t>(s - 1)] = 1;
    half_plus.mono[e0] = 0.5;
    half_plus.mono[e1] = 0.5;
    half_minus.mono[e0] = 0.5;
    half_minus.mono[e1] = -0.5;

    PolyMatrix next = J.back();
    for (int k = 0; k < d; ++k) {
      const TPoly& row_i = J.back()[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      const TPoly& row_j = J.back()[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      TPoly ni = half_plus * row_i;
      ni += half_minus * row_j;
      TPoly nj = half_minus * row_i;
      nj += half_plus * row_j;
      next[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = std::move(ni);
      next[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = std::move(nj);
    }
    J.push_back(std::move(next));
  }
  return J;
}

}  // namespace

std::vector<TermSum> apply_D(const TermSum& ts) {
  const int d = ts.dim();
  std::vector<TermSum> out(static_cast<std::size_t>(d), TermSum(d));
  std::map<std::vector<std::pair<int, int>>, std::vector<PolyMatrix>> jcache;

  for (const Term& term : ts.terms()) {
    const int m = static_cast<int>(term.chain.size());

    if (m == 0 && term.pairs.empty()) {
      for (int k = 0; k < d; ++k) {
        Term nt = term;
        nt.alpha = term.alpha.plus(k);
        out[static_cast<std::size_t>(k)].push(std::move(nt));
      }
      continue;
    }

    auto jit = jcache.find(term.chain);
    if (jit == jcache.end())
      jit = jcache.emplace(term.chain, jacobian_prefixes(term.chain, d)).first;
    const std::vector<PolyMatrix>& J = jit->second;

    for (int k = 0; k < d; ++k) {
      // Derivative through the partial of f: chain rule over the path point.
      const PolyMatrix& Jm = J[static_cast<std::size_t>(m)];
      for (int c = 0; c < d; ++c) {
        const TPoly& jck = Jm[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        if (jck.zero()) continue;
        Term nt = term;
        nt.alpha = term.alpha.plus(c);
        nt.weight = term.weight * jck;
        out[static_cast<std::size_t>(k)].push(std::move(nt));
      }
      // Derivative through each pair-factor denominator.
      for (std::size_t pi = 0; pi < term.pairs.size(); ++pi) {
        const PairFactor& pf = term.pairs[pi];
        const PolyMatrix& Jp = J[static_cast<std::size_t>(m - pf.level)];
        TPoly gk = Jp[static_cast<std::size_t>(pf.i)][static_cast<std::size_t>(k)];
        TPoly gj = Jp[static_cast<std::size_t>(pf.j)][static_cast<std::size_t>(k)];
        gj *= -1.0;
        gk += gj;
        if (gk.zero()) continue;
        Term nt = term;
        nt.pairs[pi].pow += 1;
        nt.weight = term.weight * gk;
        nt.weight *= -static_cast<double>(pf.pow);
        out[static_cast<std::size_t>(k)].push(std::move(nt));
      }
    }
  }
  for (TermSum& c : out) c.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// delta rewriting and apply_L
// ---------------------------------------------------------------------------

std::vector<Term> delta_rewrite(const Term& t, int i, int j) {
  std::vector<Term> out;
  for (std::size_t wi = 0; wi < t.words.size(); ++wi) {
    const CyclicWord& word = t.words[wi];
    for (std::size_t pos = 0; pos < word.letters.size(); ++pos) {
      const int letter = word.letters[pos];
      if (letter != i && letter != j) continue;
      const double sign = (letter == i) ? 1.0 : -1.0;
      // pi_letter -> pi_i xi pi_j + pi_j xi pi_i: two insertion variants.
      for (int variant = 0; variant < 2; ++variant) {
        Term nt = t;
        std::vector<int>& letters = nt.words[wi].letters;
        letters[pos] = (variant == 0) ? i : j;
        letters.insert(letters.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                       (variant == 0) ? j : i);
        nt.words[wi].canonicalize();
        nt.weight *= sign;
        out.push_back(std::move(nt));
      }
    }
  }
  return out;
}

namespace {

bool use_midpoint(DividedDiffMode mode, double gap, double thresh) {
  switch (mode) {
    case DividedDiffMode::Quotient: return false;
    case DividedDiffMode::MidpointIntegral: return true;
    case DividedDiffMode::Auto: return gap <= thresh;
  }
  return true;
}

}  // namespace

TermSum apply_L(const std::vector<TermSum>& tsv, const TermSum& prev,
                const std::vector<double>& r, const EngineConfig& cfg,
                std::vector<PairModeRecord>* modes) {
  const int d = prev.dim();
  if (static_cast<int>(tsv.size()) != d) throw InputError("apply_L: gradient arity mismatch");
  TermSum out(d);

  for (int k = 0; k < d; ++k) {
    for (const Term& t : tsv[static_cast<std::size_t>(k)].terms()) {
      Term nt = t;
      CyclicWord w;
      w.letters = {k};
      nt.words.push_back(std::move(w));
      out.push(std::move(nt));
    }
  }

  double maxabs = 0.0;
  for (double v : r) maxabs = std::max(maxabs, std::abs(v));
  const double thresh = cfg.coalescence_tol * (1.0 + maxabs);

  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double gap = std::abs(r[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(j)]);
      const bool midpoint = use_midpoint(cfg.dd_mode, gap, thresh);
      if (modes) modes->push_back({i, j, gap, midpoint});

      if (!midpoint) {
        if (gap == 0.0)
          throw NumericalError("quotient divided difference at exactly repeated eigenvalues");
        // Both orders of the (i, j) sum collapse to delta_ij(prev)/(r_i - r_j).
        for (const Term& t : prev.terms()) {
          for (Term& nt : delta_rewrite(t, i, j)) {
            nt.pairs.push_back({i, j, 1, static_cast<int>(nt.chain.size())});
            out.push(std::move(nt));
          }
        }
      } else {
        // 1/2 int_0^1 delta_ij(tsv_i - tsv_j)(r_ij(t)) dt.
        for (int side = 0; side < 2; ++side) {
          const TermSum& comp = tsv[static_cast<std::size_t>(side == 0 ? i : j)];
          const double sign = (side == 0) ? 0.5 : -0.5;
          for (const Term& t : comp.terms()) {
            for (Term& nt : delta_rewrite(t, i, j)) {
              nt.chain.insert(nt.chain.begin(), {i, j});
              nt.weight = nt.weight.shifted();
              nt.weight *= sign;
              out.push(std::move(nt));
            }
          }
        }
      }
    }
  }

  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// spectral operations
// ---------------------------------------------------------------------------

double eval_F(const DiagExpr& f, const SymMatrix& x,
              const std::map<std::string, double>& params, const EngineConfig& cfg) {
  cfg.validate();
  DiagFunction fn(f, x.dim(), params, cfg.max_order);
  Spectrum s = jacobi_eigh(x);
  return fn.value(s.r);
}

EigenDerivative eigen_derivative(const SymMatrix& x, const SymMatrix& xi,
                                 const EngineConfig& cfg) {
  cfg.validate();
  if (xi.dim() != x.dim()) throw InputError("eigen_derivative: dimension mismatch");
  const int d = x.dim();
  Spectrum s = jacobi_eigh(x);

  double maxabs = 0.0;
  for (double v : s.r) maxabs = std::max(maxabs, std::abs(v));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(s.r[static_cast<std::size_t>(i)] - s.r[static_cast<std::size_t>(j)]) <=
          cfg.coalescence_tol * (1.0 + maxabs))
        throw InputError("eigenprojection derivative undefined at coalescence");

  EigenDerivative out;
  out.rdot.resize(static_cast<std::size_t>(d));
  out.pidot.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    out.rdot[static_cast<std::size_t>(i)] = inner(s.flag.projections[static_cast<std::size_t>(i)], xi);
  for (int i = 0; i < d; ++i) {
    Matrix acc(d);
    const Matrix& pii = s.flag.projections[static_cast<std::size_t>(i)].as_matrix();
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      Matrix cross = matmul(matmul(s.flag.projections[static_cast<std::size_t>(j)].as_matrix(),
                                   xi.as_matrix()),
                            pii);
      cross += cross.transposed();
      cross *= 1.0 / (s.r[static_cast<std::size_t>(i)] - s.r[static_cast<std::size_t>(j)]);
      acc += cross;
    }
    out.pidot.push_back(SymMatrix::from_matrix(acc));
  }
  return out;
}

SymMatrix gradient(const DiagExpr& f, const SymMatrix& x,
                   const std::map<std::string, double>& params, const EngineConfig& cfg) {
  cfg.validate();
  const int d = x.dim();
  DiagFunction fn(f, d, params, std::max(cfg.max_order, 1));
  Spectrum s = jacobi_eigh(x);
  SymMatrix g(d);
  MultiIndex alpha(d);
  for (int i = 0; i < d; ++i) {
    SymMatrix term = s.flag.projections[static_cast<std::size_t>(i)];
    term *= fn.partial_value(alpha.plus(i), s.r);
    g += term;
  }
  return g;
}

double divided_difference(const DiagFunction& fn, const MultiIndex& alpha,
                          const std::vector<double>& r, int i, int j,
                          DividedDiffMode mode, const EngineConfig& cfg) {
  cfg.validate();
  const int d = fn.dim();
  if (i == j || i < 0 || j < 0 || i >= d || j >= d)
    throw InputError("divided_difference: bad pair");
  if (alpha.dim() != d) throw InputError("divided_difference: multi-index dimension mismatch");
  if (alpha.order() + 1 > cfg.max_order)
    throw InputError("divided_difference: order cap exceeded");

  const double ri = r[static_cast<std::size_t>(i)];
  const double rj = r[static_cast<std::size_t>(j)];
  double maxabs = 0.0;
  for (double v : r) maxabs = std::max(maxabs, std::abs(v));
  const bool midpoint = use_midpoint(mode, std::abs(ri - rj), cfg.coalescence_tol * (1.0 + maxabs));

  if (!midpoint) {
    if (ri == rj)
      throw NumericalError("divided_difference: quotient at exactly repeated eigenvalues");
    return (fn.partial_value(alpha.plus(i), r) - fn.partial_value(alpha.plus(j), r)) / (ri - rj);
  }

  const MultiIndex aii = alpha.plus(i).plus(i);
  const MultiIndex aij = alpha.plus(i).plus(j);
  const MultiIndex ajj = alpha.plus(j).plus(j);
  const QuadRule& rule = gauss_legendre_01(cfg.quad_nodes);
  Kahan acc;
  for (int q = 0; q < cfg.quad_nodes; ++q) {
    const std::vector<double> rt = substitute_pair(r, i, j, rule.nodes[static_cast<std::size_t>(q)]);
    const double integrand = fn.partial_value(aii, rt) - 2.0 * fn.partial_value(aij, rt) +
                             fn.partial_value(ajj, rt);
    acc.add(rule.weights[static_cast<std::size_t>(q)] * integrand);
  }
  return 0.5 * acc.sum;
}

SymMatrix hessian_apply(const DiagExpr& f, const SymMatrix& x, const SymMatrix& xi,
                        const std::map<std::string, double>& params, const EngineConfig& cfg) {
  cfg.validate();
  if (xi.dim() != x.dim()) throw InputError("hessian_apply: dimension mismatch");
  const int d = x.dim();
  DiagFunction fn(f, d, params, std::max(cfg.max_order, 2));
  Spectrum s = jacobi_eigh(x);

  std::vector<double> xi_diag(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    xi_diag[static_cast<std::size_t>(k)] = inner(s.flag.projections[static_cast<std::size_t>(k)], xi);

  SymMatrix h(d);
  MultiIndex zero(d);
  for (int i = 0; i < d; ++i) {
    double coeff = 0.0;
    for (int k = 0; k < d; ++k)
      coeff += fn.partial_value(zero.plus(i).plus(k), s.r) * xi_diag[static_cast<std::size_t>(k)];
    SymMatrix term = s.flag.projections[static_cast<std::size_t>(i)];
    term *= coeff;
    h += term;
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double dd = divided_difference(fn, zero, s.r, i, j, cfg.dd_mode, cfg);
      Matrix cross = matmul(matmul(s.flag.projections[static_cast<std::size_t>(i)].as_matrix(),
                                   xi.as_matrix()),
                            s.flag.projections[static_cast<std::size_t>(j)].as_matrix());
      cross += cross.transposed();
      cross *= dd;
      h += SymMatrix::from_matrix(cross);
    }
  }
  return h;
}

double dirderiv_at(const DiagFunction& fn, const Spectrum& s, const SymMatrix& xi, int n,
                   const EngineConfig& cfg, EngineDiagnostics* diag) {
  cfg.validate();
  const int d = s.dim();
  if (xi.dim() != d) throw InputError("dirderiv: dimension mismatch");
  if (n < 0) throw InputError("dirderiv: order must be >= 0");
  if (n > cfg.max_order)
    throw InputError("dirderiv: order " + std::to_string(n) + " exceeds cap " +
                     std::to_string(cfg.max_order));

  if (diag) {
    diag->eigenvalues = s.r;
    diag->gaps.clear();
    for (int i = 0; i + 1 < d; ++i)
      diag->gaps.push_back(std::abs(s.r[static_cast<std::size_t>(i)] - s.r[static_cast<std::size_t>(i) + 1]));
    diag->pair_modes.clear();
  }

  if (n == 0) return fn.value(s.r);

  WMatrix w = w_matrix(s.flag, xi);
  TermSum g = TermSum::seed(d);
  for (int k = 1; k <= n; ++k) {
    std::vector<TermSum> gv = apply_D(g);
    std::vector<PairModeRecord>* modes = (diag && k == 1) ? &diag->pair_modes : nullptr;
    g = apply_L(gv, g, s.r, cfg, modes);
    if (g.max_word_letters() > 2 * n + 2)
      throw NumericalError("dirderiv: trace-monomial length cap exceeded (engine bug)");
  }
  return g.evaluate(fn, s.r, w, cfg);
}

double dirderiv(const DiagExpr& f, const SymMatrix& x, const SymMatrix& xi, int n,
                const std::map<std::string, double>& params, const EngineConfig& cfg,
                EngineDiagnostics* diag) {
  cfg.validate();
  DiagFunction fn(f, x.dim(), params, cfg.max_order);
  Spectrum s = jacobi_eigh(x);
  const double value = dirderiv_at(fn, s, xi, n, cfg, diag);

  if (cfg.fd_consistency_check && n >= 1) {
    EngineConfig sub = cfg;
    sub.fd_consistency_check = false;
    const double h = 1e-3 * (1.0 + x.frobenius());
    SymMatrix step = xi;
    step *= h;
    SymMatrix xp = x;
    xp += step;
    SymMatrix xm = x;
    xm -= step;
    const double fd = (dirderiv(f, xp, xi, n - 1, params, sub) -
                       dirderiv(f, xm, xi, n - 1, params, sub)) /
                      (2.0 * h);
    const double rel = std::abs(fd - value) / (1.0 + std::abs(value));
    if (diag) diag->fd_consistency_rel_err = rel;
    if (rel > 1e-3)
      throw NumericalError("dirderiv: finite-difference consistency check failed (rel err " +
                           std::to_string(rel) + ")");
  }
  return value;
}

}  // namespace specfn
