#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "specfn/engine.hpp"
#include "specfn/io.hpp"
#include "specfn/newton.hpp"
#include "specfn/radial.hpp"
#include "specfn/verify.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;

specfn::SymMatrix sym_from_rows(const Rows& rows) {
  const int d = static_cast<int>(rows.size());
  if (d < 1) throw specfn::InputError("matrix must have at least one row");
  specfn::Matrix m(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d)
      throw specfn::InputError("matrix rows must all have length " + std::to_string(d));
    for (int j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  double asym = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
  if (asym > 1e-12 * (1.0 + m.max_abs()))
    throw specfn::InputError("matrix is not symmetric");
  return specfn::SymMatrix::from_matrix(m);
}

Rows rows_of(const specfn::SymMatrix& m) {
  Rows out(static_cast<std::size_t>(m.dim()), std::vector<double>(static_cast<std::size_t>(m.dim())));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

specfn::EngineConfig config_of(double coalescence_tol, int quad_nodes, int max_order) {
  specfn::EngineConfig cfg;
  cfg.coalescence_tol = coalescence_tol;
  cfg.quad_nodes = quad_nodes;
  cfg.max_order = max_order;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral functions of symmetric matrices: F(X) = f(eigenvalues) and its "
            "directional derivatives, robust across repeated eigenvalues.";

  py::register_exception<specfn::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<specfn::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<specfn::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "eval_f",
      [](const std::string& expr, const Rows& x, const std::map<std::string, double>& params) {
        return specfn::eval_F(specfn::parse(expr), sym_from_rows(x), params);
      },
      py::arg("expr"), py::arg("x"), py::arg("params") = std::map<std::string, double>{},
      "F(X) = f(eigenvalues of X).");

  m.def(
      "gradient",
      [](const std::string& expr, const Rows& x, const std::map<std::string, double>& params) {
        return rows_of(specfn::gradient(specfn::parse(expr), sym_from_rows(x), params));
      },
      py::arg("expr"), py::arg("x"), py::arg("params") = std::map<std::string, double>{});

  m.def(
      "hessian_apply",
      [](const std::string& expr, const Rows& x, const Rows& xi,
         const std::map<std::string, double>& params) {
        return rows_of(specfn::hessian_apply(specfn::parse(expr), sym_from_rows(x),
                                             sym_from_rows(xi), params));
      },
      py::arg("expr"), py::arg("x"), py::arg("xi"),
      py::arg("params") = std::map<std::string, double>{});

  m.def(
      "dirderiv",
      [](const std::string& expr, const Rows& x, const Rows& xi, int n,
         const std::map<std::string, double>& params, double coalescence_tol, int quad_nodes,
         int max_order) {
        return specfn::dirderiv(specfn::parse(expr), sym_from_rows(x), sym_from_rows(xi), n,
                                params, config_of(coalescence_tol, quad_nodes, max_order));
      },
      py::arg("expr"), py::arg("x"), py::arg("xi"), py::arg("n"),
      py::arg("params") = std::map<std::string, double>{}, py::arg("coalescence_tol") = 1e-6,
      py::arg("quad_nodes") = 32, py::arg("max_order") = 4,
      "n-th directional derivative of F at X along xi.");

  m.def(
      "spectrum",
      [](const Rows& x) {
        specfn::Spectrum s = specfn::jacobi_eigh(sym_from_rows(x));
        std::vector<Rows> projections;
        projections.reserve(s.flag.projections.size());
        for (const specfn::SymMatrix& pi : s.flag.projections) projections.push_back(rows_of(pi));
        return py::make_tuple(s.r, projections);
      },
      py::arg("x"), "Eigenvalues (non-increasing) and rank-one eigenprojections.");

  m.def(
      "eigen_derivative",
      [](const Rows& x, const Rows& xi) {
        specfn::EigenDerivative ed = specfn::eigen_derivative(sym_from_rows(x), sym_from_rows(xi));
        std::vector<Rows> pidot;
        pidot.reserve(ed.pidot.size());
        for (const specfn::SymMatrix& p : ed.pidot) pidot.push_back(rows_of(p));
        return py::make_tuple(ed.rdot, pidot);
      },
      py::arg("x"), py::arg("xi"));

  m.def(
      "power_sums",
      [](const Rows& x, int kmax) {
        specfn::PowerSums ps = specfn::power_sums(sym_from_rows(x), kmax);
        return py::make_tuple(ps.p, ps.n);
      },
      py::arg("x"), py::arg("kmax"), "Trace(X^k) and Trace(X^k)/k for k = 1..kmax.");

  m.def(
      "lift",
      [](const std::vector<std::pair<std::vector<int>, double>>& terms, const Rows& x) {
        specfn::SymMatrix xm = sym_from_rows(x);
        specfn::SymPolyE poly;
        poly.d = xm.dim();
        poly.terms = terms;
        return specfn::lift_polynomial(poly.to_power_sums(), xm);
      },
      py::arg("terms"), py::arg("x"),
      "Evaluate a symmetric polynomial given as [(exponents over e_1..e_d, coeff)] at X "
      "through its power sums.");

  m.def(
      "check_symmetry",
      [](const std::string& expr, int d, int trials, std::uint64_t seed) {
        switch (specfn::check_symmetry(specfn::parse(expr), d, trials, seed)) {
          case specfn::Symmetry::symmetric: return "symmetric";
          case specfn::Symmetry::asymmetric: return "asymmetric";
          default: return "indeterminate";
        }
      },
      py::arg("expr"), py::arg("d"), py::arg("trials") = 50, py::arg("seed") = 1);

  m.def(
      "radial_dirderiv",
      [](const std::string& expr, const std::vector<double>& x, const std::vector<double>& xi,
         int n) {
        specfn::RadialProfile prof(specfn::parse(expr));
        return specfn::radial_dirderiv(prof, x, xi, n);
      },
      py::arg("expr"), py::arg("x"), py::arg("xi"), py::arg("n"),
      "n-th directional derivative of F(x) = f(|x|) for an even profile f of r[1].");

  m.def(
      "fd_dirderiv",
      [](const std::string& expr, const Rows& x, const Rows& xi, int n) {
        specfn::DiagExpr f = specfn::parse(expr);
        return specfn::fd_dirderiv(
            [&](const specfn::SymMatrix& y) { return specfn::eval_F(f, y); }, sym_from_rows(x),
            sym_from_rows(xi), n);
      },
      py::arg("expr"), py::arg("x"), py::arg("xi"), py::arg("n"),
      "Finite-difference oracle for dirderiv.");

  m.def(
      "run_suite",
      [](const std::string& suite, std::uint64_t seed, int trials) {
        return specfn::report_to_json(specfn::run_suite(suite, seed, trials)).dump();
      },
      py::arg("suite"), py::arg("seed") = 20031006, py::arg("trials") = 40,
      "Run a verification suite; returns the report as a JSON string.");

  m.attr("__version__") = "0.1.0";
}
