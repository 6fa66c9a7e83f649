#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specfn/engine.hpp"
#include "specfn/newton.hpp"

using namespace specfn;

namespace {

SymMatrix two_one() {
  SymMatrix x(2);
  x.set(0, 0, 2.0);
  x.set(0, 1, 1.0);
  x.set(1, 1, 2.0);
  return x;
}

std::vector<double> psums_of(const std::vector<double>& r, int kmax) {
  std::vector<double> p(static_cast<std::size_t>(kmax), 0.0);
  for (int k = 1; k <= kmax; ++k)
    for (double v : r) p[static_cast<std::size_t>(k - 1)] += std::pow(v, k);
  return p;
}

}  // namespace

TEST_CASE("power sums of small instances") {
  PowerSums ps = power_sums(two_one(), 2);
  CHECK(ps.p[0] == doctest::Approx(4.0));   // trace
  CHECK(ps.p[1] == doctest::Approx(10.0));  // Tr X^2
  CHECK(ps.n[1] == doctest::Approx(5.0));   // scaled by 1/k

  PowerSums id3 = power_sums(SymMatrix::identity(3), 4);
  for (double v : id3.p) CHECK(v == doctest::Approx(3.0));

  PowerSums zero = power_sums(SymMatrix(3), 3);
  for (double v : zero.p) CHECK(v == 0.0);

  CHECK_THROWS_AS(power_sums(two_one(), 0), InputError);
}

TEST_CASE("power sums match eigenvalue power sums") {
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 5;
    SymMatrix x = rand_sym(d, 100 + trial);
    Spectrum s = jacobi_eigh(x);
    PowerSums ps = power_sums(x, d);
    std::vector<double> want = psums_of(s.r, d);
    for (int k = 0; k < d; ++k)
      CHECK(std::abs(ps.p[static_cast<std::size_t>(k)] - want[static_cast<std::size_t>(k)]) <=
            1e-9 * (1.0 + std::abs(want[static_cast<std::size_t>(k)])));
  }
}

TEST_CASE("vandermonde matrix and determinant") {
  VandermondeResult v = vandermonde_jacobian({2.0, 1.0});
  CHECK(v.m(0, 0) == 1.0);
  CHECK(v.m(0, 1) == 1.0);
  CHECK(v.m(1, 0) == 2.0);
  CHECK(v.m(1, 1) == 1.0);
  CHECK(v.det == doctest::Approx(-1.0).epsilon(1e-14));

  CHECK(vandermonde_jacobian({1.5, 1.5, 0.0}).det == doctest::Approx(0.0));
  CHECK(vandermonde_jacobian({1.0, 0.0, -1.0}).det == doctest::Approx(-2.0).epsilon(1e-13));

  // Against the product formula at random spectra.
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 6;
    std::vector<double> r(static_cast<std::size_t>(d));
    for (double& x : r) x = rng.uniform(-2.0, 2.0);
    double prod = 1.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        prod *= (r[static_cast<std::size_t>(j)] - r[static_cast<std::size_t>(i)]);
    CHECK(vandermonde_jacobian(r).det ==
          doctest::Approx(prod).epsilon(1e-9));
  }
}

TEST_CASE("newton identity expansions have the textbook coefficients") {
  // e1 = p1.
  PolyPS e1 = esym_to_psums(1, 3);
  REQUIRE(e1.terms().size() == 1);
  CHECK(e1.terms().begin()->second == doctest::Approx(1.0));

  // e2 = (p1^2 - p2)/2.
  PolyPS e2 = esym_to_psums(2, 3);
  std::map<std::vector<int>, double> want2 = {{{2, 0, 0}, 0.5}, {{0, 1, 0}, -0.5}};
  REQUIRE(e2.terms().size() == 2);
  for (const auto& [e, c] : want2) CHECK(e2.terms().at(e) == doctest::Approx(c));

  // e3 = (p1^3 - 3 p1 p2 + 2 p3)/6.
  PolyPS e3 = esym_to_psums(3, 3);
  std::map<std::vector<int>, double> want3 = {
      {{3, 0, 0}, 1.0 / 6.0}, {{1, 1, 0}, -0.5}, {{0, 0, 1}, 1.0 / 3.0}};
  REQUIRE(e3.terms().size() == 3);
  for (const auto& [e, c] : want3) CHECK(e3.terms().at(e) == doctest::Approx(c));

  CHECK_THROWS_AS(esym_to_psums(4, 3), InputError);
  CHECK_THROWS_AS(esym_to_psums(0, 3), InputError);
}

TEST_CASE("newton expansions evaluate to elementary symmetric values") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 7;  // up to 8
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    std::vector<double> r(static_cast<std::size_t>(d));
    for (double& x : r) x = rng.uniform(-2.0, 2.0);
    const double via_newton = esym_to_psums(k, d).eval(psums_of(r, d));
    const double direct = eval(instantiate(parse("esym(" + std::to_string(k) + ")"), d), r);
    CHECK(std::abs(via_newton - direct) <= 1e-9 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("lift_polynomial on hand-computed instances") {
  // p2 is psum(2): value 10 at [[2,1],[1,2]].
  PolyPS p2(2);
  p2.add_term({0, 1}, 1.0);
  CHECK(lift_polynomial(p2, two_one()) == doctest::Approx(10.0).epsilon(1e-12));

  PolyPS p1(2);
  p1.add_term({1, 0}, 1.0);
  CHECK(lift_polynomial(p1, two_one()) == doctest::Approx(4.0).epsilon(1e-14));

  // e2 rewritten via Newton equals det for d = 2.
  CHECK(lift_polynomial(esym_to_psums(2, 2), two_one()) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lift equals eval_F and is rotation invariant") {
  for (int trial = 0; trial < 15; ++trial) {
    Rng rng(900 + trial);
    const int d = 2 + trial % 5;  // up to 6
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    SymMatrix x = rand_sym(d, 950 + trial);
    const double lifted = lift_polynomial(esym_to_psums(k, d), x);
    const double direct = eval_F(parse("esym(" + std::to_string(k) + ")"), x);
    CHECK(std::abs(lifted - direct) <= 1e-9 * (1.0 + std::abs(direct)));

    Matrix q = rand_orthogonal(d, 990 + trial);
    CHECK(std::abs(lift_polynomial(esym_to_psums(k, d), conjugate(x, q)) - lifted) <=
          1e-10 * (1.0 + std::abs(lifted)));
  }
}

TEST_CASE("sym poly in the e-basis converts through power sums") {
  // e1^2 - 2 e2 = p2, checked numerically.
  SymPolyE poly;
  poly.d = 3;
  poly.terms = {{{2, 0, 0}, 1.0}, {{0, 1, 0}, -2.0}};
  PolyPS ps = poly.to_power_sums();
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> r = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    std::vector<double> p = psums_of(r, 3);
    CHECK(ps.eval(p) == doctest::Approx(p[1]).epsilon(1e-12));
  }
  CHECK(ps.weighted_degree() == 2);
}

TEST_CASE("dr/dx rows are the eigenprojections") {
  // Diagonal instance: the slope of r_1 along diag(1,0) is <pi_1, xi> = 1.
  DrDxResult diag_res = dr_dx_rows_check(SymMatrix::diagonal({3.0, 1.0}));
  CHECK_FALSE(diag_res.skipped);
  CHECK(diag_res.residual <= 1e-6);

  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(1200 + trial);
    std::vector<double> r = {2.8, 1.9, 1.0, 0.1, -0.9};
    for (double& v : r) v += 0.03 * rng.normal();
    SymMatrix x = sym_with_spectrum(r, 1300 + trial);
    DrDxResult res = dr_dx_rows_check(x, 1400 + trial);
    CHECK_FALSE(res.skipped);
    CHECK(res.residual <= 1e-6);
  }

  // Coalescent spectra are skipped with a notice rather than failed.
  DrDxResult merged = dr_dx_rows_check(sym_with_spectrum({2.0, 2.0, -1.0}, 17));
  CHECK(merged.skipped);
}
