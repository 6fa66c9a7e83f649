#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "specfn/engine.hpp"
#include "specfn/radial.hpp"

using namespace specfn;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Central FD of t -> f(|x + t xi|) with one Richardson extrapolation.
double fd_radial(const RadialProfile& f, const std::vector<double>& x,
                 const std::vector<double>& xi, int n, double h) {
  auto phi = [&](double t) {
    double rr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i] + t * xi[i];
      rr += v * v;
    }
    return f.value(std::sqrt(rr));
  };
  auto stencil = [&](double hh) {
    switch (n) {
      case 1: return (phi(hh) - phi(-hh)) / (2 * hh);
      case 2: return (phi(hh) - 2 * phi(0) + phi(-hh)) / (hh * hh);
      case 3: return (phi(2 * hh) - 2 * phi(hh) + 2 * phi(-hh) - phi(-2 * hh)) / (2 * hh * hh * hh);
      default: return phi(0);
    }
  };
  // Two Richardson steps on the h^2 error series.
  const double d0 = stencil(h);
  const double d1 = stencil(h / 2);
  const double d2 = stencil(h / 4);
  const double r1 = (4.0 * d1 - d0) / 3.0;
  const double r2 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace

TEST_CASE("closed forms for the quadratic profile") {
  RadialProfile f(parse("r[1]^2"));
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
    std::vector<double> xi = {rng.normal(), rng.normal(), rng.normal()};
    const double q = dot(xi, xi);
    CHECK(radial_dirderiv(f, x, xi, 2) == doctest::Approx(2.0 * q).epsilon(1e-12));
    CHECK(radial_dirderiv(f, x, xi, 1) == doctest::Approx(2.0 * dot(x, xi)).epsilon(1e-12));
  }
  // Continuity convention at the origin still gives 2|xi|^2.
  CHECK(radial_dirderiv(f, {0.0, 0.0}, {1.0, 2.0}, 2) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("quartic profile first derivative is 4|x|^2 <x, xi>") {
  RadialProfile f(parse("r[1]^4"));
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    std::vector<double> xi = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const double want = 4.0 * dot(x, x) * dot(x, xi);
    CHECK(radial_dirderiv(f, x, xi, 1) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("operator count (n operators) matches finite differences") {
  // This pins the L^0...L^{n-1} composition; one extra operator would break
  // every case below.
  const std::vector<const char*> profiles = {"r[1]^2", "r[1]^4", "r[1]^6",
                                             "r[1]^2 - 0.25*r[1]^4", "exp(-(r[1]^2))"};
  Rng rng(3);
  for (const char* src : profiles) {
    RadialProfile f(parse(src));
    const bool transcendental = std::string(src).find("exp") != std::string::npos;
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<double> x(4), xi(4);
      for (double& v : x) v = rng.normal();
      for (double& v : xi) v = rng.normal();
      const double target = rng.uniform(0.5, 1.4);
      for (double& v : x) v *= target / std::max(norm(x), 1e-9);
      for (int n = 1; n <= 3; ++n) {
        double h = (n == 1 ? 1e-4 : (n == 2 ? 1e-2 : 4e-2)) * (1.0 + norm(x));
        if (transcendental && n == 3) h = 1e-2 * (1.0 + norm(x));
        const double fd = fd_radial(f, x, xi, n, h);
        const double formula = radial_dirderiv(f, x, xi, n);
        CHECK(std::abs(formula - fd) <= 1e-5 * (1.0 + std::abs(fd)));
      }
    }
  }
}

TEST_CASE("radial values are rotation invariant") {
  RadialProfile f(parse("r[1]^4"));
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(5), xi(5);
    for (double& v : x) v = rng.normal();
    for (double& v : xi) v = rng.normal();
    Matrix q = rand_orthogonal(5, 400 + trial);
    std::vector<double> qx(5, 0.0), qxi(5, 0.0);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        qx[static_cast<std::size_t>(i)] += q(i, j) * x[static_cast<std::size_t>(j)];
        qxi[static_cast<std::size_t>(i)] += q(i, j) * xi[static_cast<std::size_t>(j)];
      }
    for (int n = 1; n <= 3; ++n) {
      const double a = radial_dirderiv(f, x, xi, n);
      const double b = radial_dirderiv(f, qx, qxi, n);
      CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
    }
  }
}

TEST_CASE("delta_sphere tangency and special cases") {
  std::vector<double> pi = {1.0, 0.0, 0.0};
  CHECK(norm(delta_sphere(pi, pi)) == doctest::Approx(0.0));
  std::vector<double> perp = {0.0, 2.0, -1.0};
  auto d = delta_sphere(perp, pi);
  for (std::size_t i = 0; i < 3; ++i) CHECK(d[i] == doctest::Approx(perp[i]));

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> u(5), xi(5);
    for (double& v : u) v = rng.normal();
    const double nu = norm(u);
    for (double& v : u) v /= nu;
    for (double& v : xi) v = rng.normal();
    auto t = delta_sphere(xi, u);
    CHECK(std::abs(dot(t, u)) <= 1e-12 * (1.0 + norm(xi)));
  }
  CHECK_THROWS_AS(delta_sphere({1.0, 0.0}, {1.0, 1.0}), InputError);
}

TEST_CASE("decay diagnostics") {
  // f = r^4, n = 3: f''' = 24 r vanishes at 0, so |D^3 F| decays with |x|.
  RadialProfile f4(parse("r[1]^4"));
  std::vector<double> dir = {0.6, -0.3, 0.74};
  std::vector<double> xi = {0.2, 1.0, -0.5};
  double prev = 1e300;
  for (double t : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    std::vector<double> x = {t * dir[0], t * dir[1], t * dir[2]};
    RadialBound rb = radial_bound_check(f4, x, xi, 3);
    CHECK(rb.lhs < prev + 1e-12);
    CHECK(rb.rhs_sup == doctest::Approx(24.0 * t * norm(dir)).epsilon(1e-10));
    prev = rb.lhs;
  }

  // f = r^2, n = 2: lhs is the constant 2|xi|^2, sup |f''| = 2.
  RadialProfile f2(parse("r[1]^2"));
  RadialBound rb = radial_bound_check(f2, {1.0, 1.0, 0.5}, xi, 2);
  CHECK(rb.lhs == doctest::Approx(2.0 * dot(xi, xi)).epsilon(1e-12));
  CHECK(rb.rhs_sup == doctest::Approx(2.0).epsilon(1e-12));

  // f = r^6, n = 2: lhs = O(t^4) along scaled points.
  RadialProfile f6(parse("r[1]^6"));
  for (double t : {0.5, 0.25, 0.125}) {
    std::vector<double> x = {t, 0.0, 0.0};
    const double lhs = radial_bound_check(f6, x, xi, 2).lhs;
    const double lhs_half = radial_bound_check(f6, {t / 2, 0.0, 0.0}, xi, 2).lhs;
    CHECK(lhs_half <= lhs / 8.0);  // quartic scaling gives a factor 16
  }
}

TEST_CASE("odd profiles are rejected") {
  CHECK_THROWS_AS(RadialProfile(parse("r[1]^3")), InputError);
  CHECK_THROWS_AS(RadialProfile(parse("r[1] + r[1]^2")), InputError);
  CHECK_NOTHROW(RadialProfile(parse("cos(r[1])")));
}

TEST_CASE("radial order cap") {
  RadialProfile f(parse("r[1]^2"));
  CHECK_THROWS_AS(radial_dirderiv(f, {1.0}, {1.0}, 5), InputError);
}

TEST_CASE("consistency with the matrix engine on diagonal matrices") {
  // f_rad(t) = t^4 corresponds to f_mat = psum(2)^2 on diagonals.
  RadialProfile frad(parse("r[1]^4"));
  DiagExpr fmat = parse("psum(2)^2");
  Rng rng(6);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> x(3), xi(3);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    for (double& v : xi) v = rng.uniform(-1.0, 1.0);
    for (int n = 1; n <= 2; ++n) {
      const double radial = radial_dirderiv(frad, x, xi, n);
      const double matrix = dirderiv(fmat, SymMatrix::diagonal(x), SymMatrix::diagonal(xi), n);
      CHECK(std::abs(radial - matrix) <= 1e-8 * (1.0 + std::abs(matrix)));
    }
  }
}

TEST_CASE("term bookkeeping stays within the degree budget") {
  for (int n = 1; n <= 4; ++n) {
    for (const RadialTerm& t : radial_terms(n)) {
      CHECK(t.spow + 2 * t.qpow <= 2 * n);
      CHECK(static_cast<int>(t.jexp.size()) <= n - 1);
    }
  }
}
