// Acceptance suite: one line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "specfn/engine.hpp"
#include "specfn/newton.hpp"
#include "specfn/radial.hpp"
#include "specfn/verify.hpp"

using namespace specfn;

namespace {

constexpr std::uint64_t kSeed = 20031006;
int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("CRITERION %2d %-38s %s  (%s)\n", idx, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++failures;
}

std::string err_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max_rel_err=%.3g", v);
  return buf;
}

// 1. Gradient vs FD, 100 seeded cases per corpus function, < 10 s.
void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  DerivReport rep = run_suite("gradient", kSeed, 100);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%zu cases, max_rel_err=%.3g, %.2fs", rep.records.size(),
                rep.max_rel_err, secs);
  report(1, "gradient vs FD (1e-6)", rep.all_pass() && secs < 10.0, buf);
}

// 2. Hessian contraction vs FD (1e-5) and vs dirderiv(2) (1e-9).
void criterion2() {
  DerivReport rep = run_suite("hessian", kSeed, 50);
  report(2, "hessian vs FD and dirderiv(2)", rep.all_pass(), err_str(rep.max_rel_err));
}

// 3. Third order vs FD on the polynomial corpus, 50 seeded cases.
void criterion3() {
  DerivReport rep = run_suite("order3", kSeed, 10);  // 10 x 5 polynomial f
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%zu cases, max_rel_err=%.3g", rep.records.size(),
                rep.max_rel_err);
  report(3, "dirderiv(3) vs FD (1e-4)", rep.all_pass() && rep.records.size() == 50, buf);
}

// 4. Exact polynomial identities.
void criterion4() {
  bool pass = true;
  double worst = 0.0;
  DiagExpr p2 = parse("psum(2)");
  DiagExpr p3 = parse("psum(3)");
  for (int c = 0; c < 50; ++c) {
    Rng rng(kSeed + 41000 + c);
    const int d = 2 + static_cast<int>(rng.below(5));
    SymMatrix x = rand_sym(d, kSeed + 42000 + c);
    SymMatrix xi = rand_sym(d, kSeed + 43000 + c);

    const double grad_err = (gradient(p2, x) - 2.0 * x).max_abs();
    pass = pass && grad_err <= 1e-10 * (1.0 + x.max_abs());
    worst = std::max(worst, grad_err);

    const double want2 = 2.0 * xi.frobenius() * xi.frobenius();
    const double e2 = std::abs(dirderiv(p2, x, xi, 2) - want2);
    pass = pass && e2 <= 1e-10 * (1.0 + want2);
    worst = std::max(worst, e2);

    const double e3 = std::abs(dirderiv(p2, x, xi, 3));
    pass = pass && e3 <= 1e-10;
    worst = std::max(worst, e3);

    Matrix xxi2 = matmul(x.as_matrix(), matmul(xi.as_matrix(), xi.as_matrix()));
    const double want_p3 = 6.0 * xxi2.trace();
    const double ep3 = std::abs(dirderiv(p3, x, xi, 2) - want_p3);
    pass = pass && ep3 <= 1e-9 * (1.0 + std::abs(want_p3));
    worst = std::max(worst, ep3 / (1.0 + std::abs(want_p3)));
  }
  report(4, "exact psum identities", pass, err_str(worst));
}

// 5. Quotient vs midpoint-integral divided differences, 1000 seeded cases.
void criterion5() {
  DerivReport rep = run_suite("dualpath", kSeed, 1000);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%zu cases, max_rel_err=%.3g", rep.records.size(),
                rep.max_rel_err);
  report(5, "dual-path equivalence (1e-9)", rep.all_pass() && rep.records.size() == 1000, buf);
}

// 6. Coalescence sweep: continuity through the mode switch and at gap 0.
void criterion6() {
  DerivReport rep = run_suite("coalescence", kSeed, 0);
  report(6, "coalescence sweep continuity", rep.all_pass(), err_str(rep.max_rel_err));
}

// 7. Rotation invariance and flag independence.
void criterion7() {
  DerivReport rep = run_suite("invariance", kSeed, 100);
  report(7, "rotation/flag invariance", rep.all_pass(), err_str(rep.max_rel_err));
}

// 8. Eigenvalue/eigenprojection derivative formulas vs FD, 50 seeded cases.
void criterion8() {
  bool pass = true;
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    Rng rng(kSeed + 81000 + c);
    const int d = 3 + static_cast<int>(rng.below(3));
    std::vector<double> r(static_cast<std::size_t>(d));
    r[0] = rng.uniform(2.0, 3.0);
    for (int i = 1; i < d; ++i)
      r[static_cast<std::size_t>(i)] =
          r[static_cast<std::size_t>(i - 1)] - (0.4 + rng.uniform(0.0, 1.0));
    SymMatrix x = sym_with_spectrum(r, kSeed + 82000 + c);
    SymMatrix xi(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) xi.set(i, j, rng.normal());

    EigenDerivative ed = eigen_derivative(x, xi);
    const double h = 1e-6 * (1.0 + x.frobenius());
    SymMatrix step = xi;
    step *= h;
    SymMatrix xp = x;
    xp += step;
    SymMatrix xm = x;
    xm -= step;
    Spectrum sp = jacobi_eigh(xp);
    Spectrum sm = jacobi_eigh(xm);
    for (int i = 0; i < d; ++i) {
      const double fd_r = (sp.r[static_cast<std::size_t>(i)] -
                           sm.r[static_cast<std::size_t>(i)]) / (2.0 * h);
      const double er = std::abs(fd_r - ed.rdot[static_cast<std::size_t>(i)]);
      pass = pass && er <= 1e-6 * (1.0 + std::abs(fd_r));
      worst = std::max(worst, er);
      SymMatrix pfd = sp.flag.projections[static_cast<std::size_t>(i)];
      pfd -= sm.flag.projections[static_cast<std::size_t>(i)];
      pfd *= 1.0 / (2.0 * h);
      const double ep = (pfd - ed.pidot[static_cast<std::size_t>(i)]).max_abs();
      pass = pass && ep <= 1e-6 * (1.0 + pfd.max_abs());
      worst = std::max(worst, ep);
    }
  }
  report(8, "eigen-derivative formulas vs FD", pass, err_str(worst));
}

// 9. Radial engine vs FD plus the closed n=2 case for r^2.
void criterion9() {
  DerivReport rep = run_suite("radial", kSeed, 50);
  bool closed = true;
  RadialProfile f2(parse("r[1]^2"));
  for (int c = 0; c < 20; ++c) {
    Rng rng(kSeed + 91000 + c);
    std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
    std::vector<double> xi = {rng.normal(), rng.normal(), rng.normal()};
    double q = 0.0;
    for (double v : xi) q += v * v;
    closed = closed && std::abs(radial_dirderiv(f2, x, xi, 2) - 2.0 * q) <= 1e-12 * (1.0 + q);
  }
  report(9, "radial engine (operator count)", rep.all_pass() && closed,
         err_str(rep.max_rel_err));
}

// 10. Newton lift, Vandermonde determinant, Dr(x) rows.
void criterion10() {
  DerivReport rep = run_suite("newton", kSeed, 60);
  report(10, "newton lift / vandermonde / dr", rep.all_pass(), err_str(rep.max_rel_err));
}

// 11. Decay: |D^3 F(t X0)| <= C t with a stable constant.
void criterion11() {
  SymMatrix x0 = sym_with_spectrum({2.0, 1.0, -0.5, -2.5}, kSeed + 111);
  SymMatrix xi = rand_sym(4, kSeed + 112);
  Matrix xi3 = matmul(matmul(xi.as_matrix(), xi.as_matrix()), xi.as_matrix());
  const double slope = 24.0 * matmul(x0.as_matrix(), xi3).trace();
  DiagExpr f = parse("psum(4)");
  double lo = 1e300, hi = 0.0;
  bool finite = std::abs(slope) > 1e-3;  // instance genuinely linear in t
  for (int k = 0; k <= 10; ++k) {
    const double t = std::pow(0.5, k);
    SymMatrix xt = x0;
    xt *= t;
    const double v = dirderiv(f, xt, xi, 3);
    finite = finite && std::isfinite(v);
    const double ratio = std::abs(v) / t;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "ratio spread %.6f", hi / lo);
  report(11, "decay bound |D^3F(tX)| <= Ct", finite && hi / lo <= 3.0, buf);
}

}  // namespace

int main() {
  std::printf("acceptance suite (seed %llu)\n", static_cast<unsigned long long>(kSeed));
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return 1;
}
