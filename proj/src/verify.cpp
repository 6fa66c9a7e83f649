#include "specfn/verify.hpp"

#include <algorithm>
#include <cmath>

#include "specfn/newton.hpp"
#include "specfn/radial.hpp"

namespace specfn {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

double FDConfig::step_for(int n, const SymMatrix& x) const {
  if (h > 0.0) return h;
  // Larger steps for higher orders keep the stencil cancellation above the
  // roundoff floor; truncation is handled by Richardson (and vanishes for
  // the polynomial corpus).
  static constexpr double kBase[] = {1e-4, 1e-4, 3e-3, 2e-2, 5e-2};
  const int idx = std::clamp(n, 0, 4);
  return kBase[idx] * (1.0 + x.frobenius());
}

namespace {

double central_stencil(const std::function<double(double)>& phi, int n, double h) {
  switch (n) {
    case 0:
      return phi(0.0);
    case 1:
      return (phi(h) - phi(-h)) / (2.0 * h);
    case 2:
      return (phi(h) - 2.0 * phi(0.0) + phi(-h)) / (h * h);
    case 3:
      return (phi(2.0 * h) - 2.0 * phi(h) + 2.0 * phi(-h) - phi(-2.0 * h)) / (2.0 * h * h * h);
    case 4:
      return (phi(2.0 * h) - 4.0 * phi(h) + 6.0 * phi(0.0) - 4.0 * phi(-h) + phi(-2.0 * h)) /
             (h * h * h * h);
    default:
      throw InputError("fd_dirderiv: order must be <= 4");
  }
}

double richardson(const std::function<double(double)>& phi, int n, double h, int levels) {
  if (levels < 1) throw InputError("fd_dirderiv: richardson_levels must be >= 1");
  std::vector<std::vector<double>> t(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    t[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(k) + 1);
    t[static_cast<std::size_t>(k)][0] = central_stencil(phi, n, h / std::pow(2.0, k));
    for (int m = 1; m <= k; ++m) {
      const double p = std::pow(4.0, m);
      t[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] =
          (p * t[static_cast<std::size_t>(k)][static_cast<std::size_t>(m - 1)] -
           t[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - 1)]) /
          (p - 1.0);
    }
  }
  return t[static_cast<std::size_t>(levels - 1)][static_cast<std::size_t>(levels - 1)];
}

}  // namespace

double fd_dirderiv(const std::function<double(const SymMatrix&)>& f_eval,
                   const SymMatrix& x, const SymMatrix& xi, int n, const FDConfig& cfg) {
  if (n < 0) throw InputError("fd_dirderiv: order must be >= 0");
  if (n == 0) return f_eval(x);
  const double h = cfg.step_for(n, x);
  auto phi = [&](double t) {
    SymMatrix shifted = x;
    SymMatrix step = xi;
    step *= t;
    shifted += step;
    return f_eval(shifted);
  };
  return richardson(phi, n, h, cfg.richardson_levels);
}

void DerivReport::finalize() {
  max_rel_err = 0.0;
  int passed = 0;
  for (const CaseRecord& c : records) {
    max_rel_err = std::max(max_rel_err, c.rel_err);
    if (c.pass) ++passed;
  }
  pass_rate = records.empty() ? 1.0 : static_cast<double>(passed) / records.size();
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

namespace {

struct CorpusEntry {
  const char* src;
  bool positive;   // spectrum must sit above 1
  int min_dim;
  bool polynomial;
};

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> c = {
      {"psum(2)", false, 2, true},  {"psum(3)", false, 2, true},
      {"psum(4)", false, 2, true},  {"esym(2)", false, 2, true},
      {"esym(3)", false, 3, true},  {"sum(i, log(r[i]))", true, 2, false},
  };
  return c;
}

std::vector<double> spectrum_with_gaps(Rng& rng, int d, double min_gap, bool positive) {
  std::vector<double> r(static_cast<std::size_t>(d));
  r[0] = rng.uniform(1.0, 3.0);
  for (int i = 1; i < d; ++i)
    r[static_cast<std::size_t>(i)] =
        r[static_cast<std::size_t>(i - 1)] - (min_gap + rng.uniform(0.0, 1.5));
  if (positive) {
    const double lift = 1.0 + rng.uniform(0.0, 1.0) - r[static_cast<std::size_t>(d - 1)];
    for (double& v : r) v += lift;
  }
  return r;
}

SymMatrix random_direction(Rng& rng, int d) {
  SymMatrix xi(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) xi.set(i, j, rng.normal());
  return xi;
}

Flag flag_from_columns(const Matrix& q) {
  Flag f;
  const int d = q.dim();
  f.projections.reserve(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    SymMatrix pi(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) pi.set(i, j, q(i, c) * q(j, c));
    f.projections.push_back(pi);
  }
  return f;
}

CaseRecord make_record(std::string f_src, std::string x_desc, std::string xi_desc, int n,
                       double formula, double oracle, double tol) {
  CaseRecord rec;
  rec.f_src = std::move(f_src);
  rec.x_desc = std::move(x_desc);
  rec.xi_desc = std::move(xi_desc);
  rec.n = n;
  rec.formula_value = formula;
  rec.oracle_value = oracle;
  rec.rel_err = rel_err(formula, oracle);
  rec.tol = tol;
  rec.pass = std::isfinite(formula) && std::isfinite(oracle) && rec.rel_err <= tol;
  return rec;
}

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t salt, int idx) {
  return seed * 1000003ull + salt * 7919ull + static_cast<std::uint64_t>(idx) * 104729ull + 1ull;
}

void suite_gradient(DerivReport& rep, std::uint64_t seed, int trials) {
  for (const CorpusEntry& entry : corpus()) {
    DiagExpr f = parse(entry.src);
    for (int c = 0; c < trials; ++c) {
      Rng rng(case_seed(seed, 11, c));
      const int d = std::max(entry.min_dim, 2 + static_cast<int>(rng.below(5)));
      const std::vector<double> r = spectrum_with_gaps(rng, d, 0.1, entry.positive);
      const SymMatrix x = sym_with_spectrum(r, case_seed(seed, 12, c));
      const SymMatrix xi = random_direction(rng, d);
      const double formula = inner(gradient(f, x), xi);
      const double oracle =
          fd_dirderiv([&](const SymMatrix& y) { return eval_F(f, y); }, x, xi, 1);
      rep.records.push_back(make_record(entry.src, "d=" + std::to_string(d) + " gaps>=0.1",
                                        "gauss", 1, formula, oracle, 1e-6));
    }
  }
}

void suite_hessian(DerivReport& rep, std::uint64_t seed, int trials) {
  for (const CorpusEntry& entry : corpus()) {
    DiagExpr f = parse(entry.src);
    for (int c = 0; c < trials; ++c) {
      Rng rng(case_seed(seed, 21, c));
      const int d = std::max(entry.min_dim, 2 + static_cast<int>(rng.below(5)));
      const std::vector<double> r = spectrum_with_gaps(rng, d, 0.1, entry.positive);
      const SymMatrix x = sym_with_spectrum(r, case_seed(seed, 22, c));
      const SymMatrix xi = random_direction(rng, d);
      const double contraction = inner(hessian_apply(f, x, xi), xi);
      FDConfig fdc;
      fdc.richardson_levels = 3;
      const double fd =
          fd_dirderiv([&](const SymMatrix& y) { return eval_F(f, y); }, x, xi, 2, fdc);
      rep.records.push_back(make_record(entry.src, "d=" + std::to_string(d) + " gaps>=0.1",
                                        "gauss", 2, contraction, fd, 1e-5));
      const double dd2 = dirderiv(f, x, xi, 2);
      rep.records.push_back(make_record(std::string(entry.src) + " [vs dirderiv]",
                                        "d=" + std::to_string(d), "gauss", 2, contraction, dd2,
                                        1e-9));
    }
  }
}

void suite_order3(DerivReport& rep, std::uint64_t seed, int trials) {
  for (const CorpusEntry& entry : corpus()) {
    if (!entry.polynomial) continue;
    DiagExpr f = parse(entry.src);
    for (int c = 0; c < trials; ++c) {
      Rng rng(case_seed(seed, 31, c));
      const int d = std::max(entry.min_dim, 2 + static_cast<int>(rng.below(5)));
      const std::vector<double> r = spectrum_with_gaps(rng, d, 0.1, false);
      const SymMatrix x = sym_with_spectrum(r, case_seed(seed, 32, c));
      const SymMatrix xi = random_direction(rng, d);
      const double formula = dirderiv(f, x, xi, 3);
      FDConfig fdc;
      fdc.richardson_levels = 3;
      const double fd =
          fd_dirderiv([&](const SymMatrix& y) { return eval_F(f, y); }, x, xi, 3, fdc);
      rep.records.push_back(make_record(entry.src, "d=" + std::to_string(d) + " gaps>=0.1",
                                        "gauss", 3, formula, fd, 1e-4));
    }
  }
}

void suite_dualpath(DerivReport& rep, std::uint64_t seed, int trials) {
  EngineConfig cfg;
  for (int c = 0; c < trials; ++c) {
    Rng rng(case_seed(seed, 41, c));
    const CorpusEntry& entry = corpus()[rng.below(corpus().size())];
    const int d = std::max(entry.min_dim, 2 + static_cast<int>(rng.below(5)));
    DiagExpr f = parse(entry.src);
    DiagFunction fn(f, d, {}, 4);

    // Pair gap drawn log-uniform over [1e-5, 1].
    std::vector<double> r(static_cast<std::size_t>(d));
    r[0] = rng.uniform(1.0, 3.0);
    for (int i = 1; i < d; ++i) {
      const double gap = std::pow(10.0, rng.uniform(-5.0, 0.0));
      r[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i - 1)] - gap;
    }
    if (entry.positive) {
      const double lift = 1.0 - r[static_cast<std::size_t>(d - 1)];
      for (double& v : r) v += lift;
    }
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    if (j == i) j = (j + 1) % d;

    // Base alpha symmetric in (i, j): zero or e_i + e_j.
    MultiIndex alpha(d);
    if (rng.below(2) == 1) {
      alpha = alpha.plus(i).plus(j);
    }
    const double quot = divided_difference(fn, alpha, r, i, j, DividedDiffMode::Quotient, cfg);
    const double midp =
        divided_difference(fn, alpha, r, i, j, DividedDiffMode::MidpointIntegral, cfg);
    rep.records.push_back(make_record(entry.src,
                                      "pair (" + std::to_string(i) + "," + std::to_string(j) +
                                          ") |alpha|=" + std::to_string(alpha.order()),
                                      "-", 0, quot, midp, 1e-9));
  }
}

void suite_coalescence(DerivReport& rep, std::uint64_t seed, int /*trials*/) {
  // Fixed-frame pair sweep: r = (c + g/2, c - g/2, b), xi touching the
  // coalescing pair only through its off-diagonal block, so the value's
  // genuine gap sensitivity stays inside the criterion's band while the
  // pair terms are exercised (w(0,1) != 0).
  const int d = 3;
  const Matrix q = rand_orthogonal(d, case_seed(seed, 51, 0));
  Matrix eta(d);
  eta(0, 1) = eta(1, 0) = 0.05;
  eta(2, 2) = 0.8;
  SymMatrix xi(d);
  {
    Matrix tmp = matmul(matmul(q, eta), q.transposed());
    xi = SymMatrix::from_matrix(tmp);
  }
  const double c0 = 1.0;
  const double b = -2.0;

  std::vector<double> gaps;
  for (int k = 2; k <= 10; ++k) gaps.push_back(std::pow(10.0, -k));
  gaps.push_back(0.0);

  const std::vector<const char*> fs = {"psum(2)", "psum(3)", "psum(4)", "esym(2)"};
  for (const char* src : fs) {
    DiagExpr f = parse(src);
    for (int n = 1; n <= 3; ++n) {
      std::vector<double> values;
      for (double g : gaps) {
        std::vector<double> r = {c0 + 0.5 * g, c0 - 0.5 * g, b};
        Matrix m(d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += q(i, k) * r[static_cast<std::size_t>(k)] * q(j, k);
            m(i, j) = s;
          }
        values.push_back(dirderiv(f, SymMatrix::from_matrix(m), xi, n));
      }
      for (std::size_t k = 0; k + 1 < values.size() - 1; ++k) {
        const double tol = 1e-6;
        CaseRecord rec = make_record(src,
                                     "gap " + std::to_string(gaps[k]) + " vs " +
                                         std::to_string(gaps[k + 1]),
                                     "fixed frame", n, values[k], values[k + 1], tol);
        rec.rel_err = std::abs(values[k] - values[k + 1]) / (1.0 + std::abs(values[k + 1]));
        rec.pass = std::isfinite(values[k]) && std::isfinite(values[k + 1]) && rec.rel_err <= tol;
        rep.records.push_back(rec);
      }
      // Exact coalescence equals the small-gap extrapolation.
      const double extrap = 2.0 * values[values.size() - 2] - values[values.size() - 3];
      CaseRecord rec = make_record(src, "gap 0 vs extrapolation", "fixed frame", n,
                                   values.back(), extrap, 1e-7);
      rec.rel_err = std::abs(values.back() - extrap);
      rec.pass = std::isfinite(values.back()) && rec.rel_err <= 1e-7;
      rep.records.push_back(rec);
    }
  }
}

void suite_invariance(DerivReport& rep, std::uint64_t seed, int trials) {
  const std::vector<const char*> fs = {"psum(2)", "psum(3)", "esym(2)", "psum(4)"};
  for (int c = 0; c < trials; ++c) {
    Rng rng(case_seed(seed, 61, c));
    const char* src = fs[rng.below(fs.size())];
    DiagExpr f = parse(src);
    const int d = 2 + static_cast<int>(rng.below(5));
    const SymMatrix x = rand_sym(d, case_seed(seed, 62, c));
    const SymMatrix xi = random_direction(rng, d);
    const Matrix q = rand_orthogonal(d, rng);
    const SymMatrix xq = conjugate(x, q);
    const SymMatrix xiq = conjugate(xi, q);

    const double f0 = eval_F(f, x);
    const double f1 = eval_F(f, xq);
    CaseRecord rec = make_record(src, "d=" + std::to_string(d) + " conj", "eval_F", 0, f1, f0,
                                 1e-9);
    rec.rel_err = std::abs(f1 - f0) / (1.0 + std::abs(f0));
    rec.pass = rec.rel_err <= 1e-9;
    rep.records.push_back(rec);

    const int n = 1 + static_cast<int>(rng.below(3));
    const double d0 = dirderiv(f, x, xi, n);
    const double d1 = dirderiv(f, xq, xiq, n);
    rep.records.push_back(
        make_record(src, "d=" + std::to_string(d) + " conj", "dirderiv", n, d1, d0, 1e-8));
  }

  // Flag independence at exactly repeated eigenvalues: two eigenflags of the
  // same X, mixed inside the degenerate 2-plane.
  for (int c = 0; c < std::max(1, trials / 4); ++c) {
    Rng rng(case_seed(seed, 63, c));
    const int d = 3 + static_cast<int>(rng.below(3));
    std::vector<double> r = spectrum_with_gaps(rng, d, 0.3, false);
    r[1] = r[0];  // degenerate pair
    const Matrix q = rand_orthogonal(d, rng);
    const double theta = rng.uniform(0.3, 1.2);
    Matrix rot = Matrix::identity(d);
    rot(0, 0) = std::cos(theta);
    rot(0, 1) = -std::sin(theta);
    rot(1, 0) = std::sin(theta);
    rot(1, 1) = std::cos(theta);
    const Matrix q2 = matmul(q, rot);

    Spectrum sa{r, flag_from_columns(q)};
    Spectrum sb{r, flag_from_columns(q2)};
    const SymMatrix xi = random_direction(rng, d);

    const std::vector<const char*> fs2 = {"psum(3)", "esym(2)", "psum(4)"};
    const char* src = fs2[rng.below(fs2.size())];
    DiagFunction fn(parse(src), d, {}, 4);
    for (int n = 1; n <= 3; ++n) {
      const double va = dirderiv_at(fn, sa, xi, n);
      const double vb = dirderiv_at(fn, sb, xi, n);
      CaseRecord rec = make_record(src, "repeated pair, two flags", "dirderiv", n, va, vb, 1e-9);
      rec.rel_err = std::abs(va - vb) / (1.0 + std::abs(vb));
      rec.pass = rec.rel_err <= 1e-9;
      rep.records.push_back(rec);
    }
  }
}

void suite_radial(DerivReport& rep, std::uint64_t seed, int trials) {
  // Polynomial profiles get the acceptance tolerance 1e-6; the degree <= 6
  // stencils plus one extrapolation are exact there, so only roundoff is in
  // play. The transcendental profile is extra coverage at a looser 1e-5.
  struct Profile {
    const char* src;
    bool polynomial;
  };
  const std::vector<Profile> profiles = {{"r[1]^2", true},
                                         {"r[1]^4", true},
                                         {"r[1]^6", true},
                                         {"r[1]^2 - 0.5*r[1]^4", true},
                                         {"exp(-(r[1]^2))", false}};
  for (const Profile& p : profiles) {
    RadialProfile prof(parse(p.src));
    for (int c = 0; c < std::max(1, trials / 5); ++c) {
      Rng rng(case_seed(seed, 71, c));
      const int d = 2 + static_cast<int>(rng.below(4));
      std::vector<double> x(static_cast<std::size_t>(d)), xi(static_cast<std::size_t>(d));
      for (double& v : x) v = rng.normal();
      for (double& v : xi) v = rng.normal();
      double norm = 0.0;
      for (double v : x) norm += v * v;
      norm = std::sqrt(norm);
      const double target = rng.uniform(0.5, 1.5);
      for (double& v : x) v *= target / std::max(norm, 1e-9);

      for (int n = 1; n <= 3; ++n) {
        const double formula = radial_dirderiv(prof, x, xi, n);
        auto phi = [&](double t) {
          double rr = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double v = x[i] + t * xi[i];
            rr += v * v;
          }
          return prof.value(std::sqrt(rr));
        };
        double h = 0.0;
        int levels = 2;
        if (p.polynomial) {
          h = (n == 1 ? 1e-4 : (n == 2 ? 1e-2 : 5e-2)) * (1.0 + target);
        } else {
          h = (n == 1 ? 1e-4 : (n == 2 ? 3e-3 : 1e-2)) * (1.0 + target);
          levels = 3;
        }
        const double fd = richardson(phi, n, h, levels);
        rep.records.push_back(make_record(p.src, "d=" + std::to_string(d), "radial", n, formula,
                                          fd, p.polynomial ? 1e-6 : 1e-5));
      }
    }
  }
}

void suite_newton(DerivReport& rep, std::uint64_t seed, int trials) {
  for (int c = 0; c < trials; ++c) {
    Rng rng(case_seed(seed, 81, c));
    const int d = 2 + static_cast<int>(rng.below(7));  // up to 8
    std::vector<double> r(static_cast<std::size_t>(d));
    for (double& v : r) v = rng.uniform(-2.0, 2.0);

    // Newton-identity rewrite matches the direct elementary symmetric value.
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    PolyPS ek = esym_to_psums(k, d);
    std::vector<double> p(static_cast<std::size_t>(d), 0.0);
    for (int m = 1; m <= d; ++m)
      for (double v : r) p[static_cast<std::size_t>(m - 1)] += std::pow(v, m);
    const double via_newton = ek.eval(p);
    DiagExpr esym = instantiate(parse("esym(" + std::to_string(k) + ")"), d);
    const double direct = eval(esym, r);
    rep.records.push_back(make_record("esym(" + std::to_string(k) + ")",
                                      "d=" + std::to_string(d), "newton-identity", 0, via_newton,
                                      direct, 1e-9));

    // Vandermonde determinant against the pair-product formula.
    VandermondeResult vr = vandermonde_jacobian(r);
    double prod = 1.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        prod *= (r[static_cast<std::size_t>(j)] - r[static_cast<std::size_t>(i)]);
    rep.records.push_back(make_record("vandermonde", "d=" + std::to_string(d), "product", 0,
                                      vr.det, prod, 1e-9));
  }

  // lift_polynomial(e_k) equals eval_F(esym(k)), and Dr(x) rows are the
  // eigenprojections.
  for (int c = 0; c < std::max(1, trials / 2); ++c) {
    Rng rng(case_seed(seed, 82, c));
    const int d = 2 + static_cast<int>(rng.below(5));  // up to 6
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    const std::vector<double> r = spectrum_with_gaps(rng, d, 0.05, false);
    const SymMatrix x = sym_with_spectrum(r, case_seed(seed, 83, c));
    const double lifted = lift_polynomial(esym_to_psums(k, d), x);
    const double direct = eval_F(parse("esym(" + std::to_string(k) + ")"), x);
    rep.records.push_back(make_record("esym(" + std::to_string(k) + ") lift",
                                      "d=" + std::to_string(d), "eval_F", 0, lifted, direct,
                                      1e-9));

    DrDxResult dr = dr_dx_rows_check(x, case_seed(seed, 84, c));
    CaseRecord rec;
    rec.f_src = "dr_dx_rows";
    rec.x_desc = "d=" + std::to_string(d);
    rec.xi_desc = dr.skipped ? "skipped (coalescent)" : "fd";
    rec.formula_value = dr.residual;
    rec.oracle_value = 0.0;
    rec.rel_err = dr.residual;
    rec.tol = 1e-6;
    rec.pass = dr.skipped || dr.residual <= 1e-6;
    rep.records.push_back(rec);
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"gradient",    "hessian",  "order3",
                                                 "coalescence", "invariance", "radial",
                                                 "newton",      "dualpath"};
  return names;
}

DerivReport run_suite(const std::string& suite, std::uint64_t seed, int trials) {
  DerivReport rep;
  rep.suite = suite;
  rep.seed = seed;
  rep.trials = trials;
  if (suite == "gradient") suite_gradient(rep, seed, trials);
  else if (suite == "hessian") suite_hessian(rep, seed, trials);
  else if (suite == "order3") suite_order3(rep, seed, trials);
  else if (suite == "coalescence") suite_coalescence(rep, seed, trials);
  else if (suite == "invariance") suite_invariance(rep, seed, trials);
  else if (suite == "radial") suite_radial(rep, seed, trials);
  else if (suite == "newton") suite_newton(rep, seed, trials);
  else if (suite == "dualpath") suite_dualpath(rep, seed, trials);
  else throw InputError("unknown suite '" + suite + "'");
  rep.finalize();
  return rep;
}

}  // namespace specfn
