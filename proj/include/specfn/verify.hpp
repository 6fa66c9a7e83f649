#pragma once

#include <functional>
#include <string>
#include <vector>

#include "specfn/engine.hpp"
#include "specfn/matrix.hpp"

namespace specfn {

/// Central finite differences along a direction with Richardson
/// extrapolation. h = 0 picks an order-scaled default step.
struct FDConfig {
  double h = 0.0;
  int richardson_levels = 2;

  double step_for(int n, const SymMatrix& x) const;
};

/// n-th central difference of t -> F(X + t xi) at t = 0, n <= 4.
double fd_dirderiv(const std::function<double(const SymMatrix&)>& f_eval,
                   const SymMatrix& x, const SymMatrix& xi, int n,
                   const FDConfig& cfg = {});

struct CaseRecord {
  std::string f_src;
  std::string x_desc;
  std::string xi_desc;
  int n = 0;
  double formula_value = 0.0;
  double oracle_value = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct DerivReport {
  std::string suite;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<CaseRecord> records;
  double max_rel_err = 0.0;
  double pass_rate = 1.0;

  bool all_pass() const { return pass_rate == 1.0; }
  void finalize();
};

/// Named property suites: gradient, hessian, order3, coalescence,
/// invariance, radial, newton, dualpath. Deterministic given (seed, trials).
DerivReport run_suite(const std::string& suite, std::uint64_t seed, int trials);

const std::vector<std::string>& suite_names();

/// |a - b| / max(1, |b|).
double rel_err(double a, double b);

}  // namespace specfn
