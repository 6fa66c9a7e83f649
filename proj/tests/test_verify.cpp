#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specfn/engine.hpp"
#include "specfn/io.hpp"
#include "specfn/verify.hpp"

using namespace specfn;

TEST_CASE("fd_dirderiv on linear and quadratic functionals") {
  SymMatrix x = rand_sym(3, 1);
  SymMatrix xi = rand_sym(3, 2);
  // F = Trace: D F = Trace(xi) exactly.
  const double d1 = fd_dirderiv([](const SymMatrix& y) { return y.trace(); }, x, xi, 1);
  CHECK(std::abs(d1 - xi.trace()) <= 1e-10 * (1.0 + std::abs(xi.trace())));

  // F = ||X||_F^2: D^2 F = 2 ||xi||_F^2.
  const double d2 = fd_dirderiv(
      [](const SymMatrix& y) { return y.frobenius() * y.frobenius(); }, x, xi, 2);
  CHECK(std::abs(d2 - 2.0 * xi.frobenius() * xi.frobenius()) <= 1e-8 * (1.0 + d2));

  // n = 0 is plain evaluation.
  CHECK(fd_dirderiv([](const SymMatrix& y) { return y.trace(); }, x, xi, 0) ==
        doctest::Approx(x.trace()));
}

TEST_CASE("fd_dirderiv third derivative of Tr X^3") {
  SymMatrix x(2);
  x.set(0, 0, 2.0);
  x.set(0, 1, 1.0);
  x.set(1, 1, 2.0);
  SymMatrix xi(2);
  xi.set(0, 1, 1.0);
  auto trace_cubed = [](const SymMatrix& y) {
    return matmul(matmul(y.as_matrix(), y.as_matrix()), y.as_matrix()).trace();
  };
  // D^3 Tr X^3 = 6 Tr(xi^3) = 0 for this traceless off-diagonal direction.
  CHECK(std::abs(fd_dirderiv(trace_cubed, x, xi, 3)) <= 1e-6);
}

TEST_CASE("fd_dirderiv is essentially exact on degree-4 polynomials") {
  DiagExpr f = parse("psum(4)");
  for (int trial = 0; trial < 10; ++trial) {
    SymMatrix x = rand_sym(3, 100 + trial);
    SymMatrix xi = rand_sym(3, 200 + trial);
    for (int n = 1; n <= 3; ++n) {
      const double fd =
          fd_dirderiv([&](const SymMatrix& y) { return eval_F(f, y); }, x, xi, n);
      const double exact = dirderiv(f, x, xi, n);
      CHECK(rel_err(fd, exact) <= 1e-8);
    }
  }
}

TEST_CASE("fd_dirderiv input validation") {
  SymMatrix x = rand_sym(2, 5);
  CHECK_THROWS_AS(fd_dirderiv([](const SymMatrix&) { return 0.0; }, x, x, 5), InputError);
  CHECK_THROWS_AS(fd_dirderiv([](const SymMatrix&) { return 0.0; }, x, x, -1), InputError);
  FDConfig cfg;
  cfg.richardson_levels = 0;
  CHECK_THROWS_AS(fd_dirderiv([](const SymMatrix&) { return 0.0; }, x, x, 1, cfg), InputError);
}

TEST_CASE("suites run clean at reduced size") {
  for (const std::string& name : suite_names()) {
    const int trials = (name == "dualpath") ? 60 : 6;
    DerivReport rep = run_suite(name, 20031006, trials);
    INFO("suite ", name, " max_rel_err ", rep.max_rel_err);
    CHECK(rep.all_pass());
    CHECK(rep.records.size() > 0);
    CHECK(rep.suite == name);
  }
  CHECK_THROWS_AS(run_suite("nope", 1, 1), InputError);
}

TEST_CASE("reports are reproducible and summaries consistent") {
  DerivReport a = run_suite("dualpath", 99, 40);
  DerivReport b = run_suite("dualpath", 99, 40);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());

  DerivReport c = run_suite("dualpath", 100, 40);
  // A different seed draws different cases.
  CHECK(report_to_json(a).dump() != report_to_json(c).dump());

  int passed = 0;
  double max_err = 0.0;
  for (const CaseRecord& rec : a.records) {
    passed += rec.pass ? 1 : 0;
    max_err = std::max(max_err, rec.rel_err);
  }
  CHECK(a.pass_rate == doctest::Approx(static_cast<double>(passed) / a.records.size()));
  CHECK(a.max_rel_err == doctest::Approx(max_err));
}

TEST_CASE("matrix JSON parsing and validation") {
  nlohmann::json good = {{"dim", 2}, {"rows", {{2.0, 1.0}, {1.0, 2.0}}}};
  SymMatrix x = matrix_from_json(good);
  CHECK(x(0, 1) == 1.0);

  // Tiny asymmetry below threshold symmetrizes silently.
  nlohmann::json tiny = {{"dim", 2}, {"rows", {{2.0, 1.0 + 5e-14}, {1.0, 2.0}}}};
  SymMatrix y = matrix_from_json(tiny);
  CHECK(y(0, 1) == y(1, 0));

  // Gross asymmetry is rejected.
  nlohmann::json bad = {{"dim", 2}, {"rows", {{2.0, 1.0}, {1.5, 2.0}}}};
  CHECK_THROWS_AS(matrix_from_json(bad), InputError);

  CHECK_THROWS_AS(matrix_from_json(nlohmann::json{{"dim", 2}, {"rows", {{1.0, 0.0}}}}),
                  InputError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::array()), InputError);

  // Round trip.
  SymMatrix z = matrix_from_json(matrix_to_json(x));
  CHECK((z - x).max_abs() == 0.0);
}

TEST_CASE("sympoly JSON parsing") {
  nlohmann::json j = nlohmann::json::array(
      {{{"coeff", 1.0}, {"exponents", {2, 0}}}, {{"coeff", -2.0}, {"exponents", {0, 1}}}});
  SymPolyE poly = sympoly_from_json(j);
  CHECK(poly.d == 2);
  CHECK(poly.terms.size() == 2);

  CHECK_THROWS_AS(sympoly_from_json(nlohmann::json::array()), InputError);
  nlohmann::json mixed = nlohmann::json::array(
      {{{"coeff", 1.0}, {"exponents", {2, 0}}}, {{"coeff", 1.0}, {"exponents", {1}}}});
  CHECK_THROWS_AS(sympoly_from_json(mixed), InputError);
}

TEST_CASE("rel_err uses a unit floor") {
  CHECK(rel_err(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(rel_err(101.0, 100.0) == doctest::Approx(0.01));
}
