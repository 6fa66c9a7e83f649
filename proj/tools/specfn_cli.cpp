#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specfn/engine.hpp"
#include "specfn/io.hpp"
#include "specfn/newton.hpp"
#include "specfn/verify.hpp"

using nlohmann::json;

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> out;
  for (const std::string& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw specfn::InputError("--param expects name=value, got '" + kv + "'");
    try {
      out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw specfn::InputError("--param value is not a number in '" + kv + "'");
    }
  }
  return out;
}

std::uint64_t resolve_seed(std::uint64_t cli_seed, bool seed_given) {
  if (seed_given) return cli_seed;
  if (const char* env = std::getenv("SPECFN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw specfn::InputError("SPECFN_SEED is not an integer");
    }
  }
  return 20031006;  // default run seed
}

json rows_json(const specfn::SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json diagnostics_json(const specfn::EngineDiagnostics& diag) {
  json pairs = json::array();
  json modes = json::array();
  for (const specfn::PairModeRecord& pm : diag.pair_modes) {
    modes.push_back(json{{"i", pm.i + 1},
                         {"j", pm.j + 1},
                         {"gap", pm.gap},
                         {"mode", pm.midpoint ? "midpoint-integral" : "quotient"}});
    if (pm.midpoint) pairs.push_back(json::array({pm.i + 1, pm.j + 1}));
  }
  json out{{"eigenvalues", diag.eigenvalues},
           {"eigenvalue_gaps", diag.gaps},
           {"coalescent_pairs", std::move(pairs)},
           {"mode_used", std::move(modes)}};
  if (diag.fd_consistency_rel_err)
    out["fd_consistency_rel_err"] = *diag.fd_consistency_rel_err;
  return out;
}

// Gap/mode diagnostics without running a derivative.
specfn::EngineDiagnostics probe_diagnostics(const specfn::Spectrum& s,
                                            const specfn::EngineConfig& cfg) {
  specfn::EngineDiagnostics diag;
  diag.eigenvalues = s.r;
  const int d = s.dim();
  double maxabs = 0.0;
  for (double v : s.r) maxabs = std::max(maxabs, std::abs(v));
  for (int i = 0; i + 1 < d; ++i)
    diag.gaps.push_back(std::abs(s.r[static_cast<std::size_t>(i)] -
                                 s.r[static_cast<std::size_t>(i) + 1]));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double gap = std::abs(s.r[static_cast<std::size_t>(i)] -
                                  s.r[static_cast<std::size_t>(j)]);
      diag.pair_modes.push_back(
          {i, j, gap, gap <= cfg.coalescence_tol * (1.0 + maxabs)});
    }
  return diag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specfn: spectral functions of symmetric matrices and their directional derivatives"};
  app.require_subcommand(1);

  std::string expr, matrix_path, direction_path, poly_path, suite = "all";
  int order = 1;
  std::vector<std::string> raw_params;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tol = 1e-6;
  bool tol_given = false;
  int quad_nodes = 32;
  int trials = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_f, bool needs_m) {
    auto* fo = cmd->add_option("-f,--function", expr, "symmetric function expression");
    auto* mo = cmd->add_option("-m,--matrix", matrix_path, "matrix JSON path");
    if (needs_f) fo->required();
    if (needs_m) mo->required();
    cmd->add_option("--param", raw_params, "parameter binding name=value")->take_all();
    cmd->add_option("--seed", seed, "random seed")->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--tol", tol, "coalescence tolerance")->each([&](const std::string&) { tol_given = true; });
    cmd->add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes");
  };

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate F(X) = f(eigenvalues)");
  add_common(c_eval, true, true);
  CLI::App* c_grad = app.add_subcommand("grad", "gradient of F at X");
  add_common(c_grad, true, true);
  CLI::App* c_hess = app.add_subcommand("hess", "Hessian action H[xi]");
  add_common(c_hess, true, true);
  c_hess->add_option("-d,--direction", direction_path, "direction JSON path")->required();
  CLI::App* c_dir = app.add_subcommand("dirderiv", "n-th directional derivative");
  add_common(c_dir, true, true);
  c_dir->add_option("-d,--direction", direction_path, "direction JSON path")->required();
  c_dir->add_option("-n,--order", order, "derivative order")->required();
  CLI::App* c_lift = app.add_subcommand("lift", "evaluate a symmetric polynomial via power sums");
  add_common(c_lift, false, true);
  c_lift->add_option("--poly", poly_path, "symmetric polynomial JSON (e-basis)")->required();
  CLI::App* c_spec = app.add_subcommand("spectrum", "eigenvalues and eigenflag");
  add_common(c_spec, false, true);
  CLI::App* c_check = app.add_subcommand("check", "run verification suites");
  c_check->add_option("--suite", suite, "suite name or 'all'");
  c_check->add_option("--trials", trials, "cases per suite (0 = default)");
  c_check->add_option("--seed", seed, "random seed")->each([&](const std::string&) { seed_given = true; });
  c_check->add_option("--tol", tol, "unused; accepted for symmetry");
  c_check->add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", "input"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }

  try {
    const std::map<std::string, double> params = parse_params(raw_params);
    specfn::EngineConfig cfg;
    if (tol_given) cfg.coalescence_tol = tol;
    cfg.quad_nodes = quad_nodes;
    const std::uint64_t run_seed = resolve_seed(seed, seed_given);

    json out;

    if (c_eval->parsed() || c_grad->parsed() || c_hess->parsed() || c_dir->parsed()) {
      specfn::SymMatrix x = specfn::load_matrix(matrix_path);
      specfn::DiagExpr f = specfn::parse(expr);
      json inputs{{"function", expr}, {"matrix", matrix_path}};
      if (!raw_params.empty()) inputs["params"] = params;

      if (c_eval->parsed()) {
        const double value = specfn::eval_F(f, x, params, cfg);
        specfn::EngineDiagnostics diag = probe_diagnostics(specfn::jacobi_eigh(x), cfg);
        out = json{{"command", "eval"},
                   {"inputs", inputs},
                   {"value", value},
                   {"diagnostics", diagnostics_json(diag)}};
      } else if (c_grad->parsed()) {
        specfn::SymMatrix g = specfn::gradient(f, x, params, cfg);
        specfn::EngineDiagnostics diag = probe_diagnostics(specfn::jacobi_eigh(x), cfg);
        out = json{{"command", "grad"},
                   {"inputs", inputs},
                   {"value", rows_json(g)},
                   {"diagnostics", diagnostics_json(diag)}};
      } else if (c_hess->parsed()) {
        specfn::SymMatrix xi = specfn::load_matrix(direction_path);
        inputs["direction"] = direction_path;
        specfn::SymMatrix h = specfn::hessian_apply(f, x, xi, params, cfg);
        specfn::EngineDiagnostics diag = probe_diagnostics(specfn::jacobi_eigh(x), cfg);
        out = json{{"command", "hess"},
                   {"inputs", inputs},
                   {"value", rows_json(h)},
                   {"diagnostics", diagnostics_json(diag)}};
      } else {
        specfn::SymMatrix xi = specfn::load_matrix(direction_path);
        inputs["direction"] = direction_path;
        inputs["n"] = order;
        specfn::EngineDiagnostics diag;
        const double value = specfn::dirderiv(f, x, xi, order, params, cfg, &diag);
        out = json{{"command", "dirderiv"},
                   {"inputs", inputs},
                   {"value", value},
                   {"diagnostics", diagnostics_json(diag)}};
      }
    } else if (c_lift->parsed()) {
      specfn::SymMatrix x = specfn::load_matrix(matrix_path);
      specfn::SymPolyE poly = specfn::load_sympoly(poly_path);
      if (poly.d != x.dim())
        throw specfn::InputError("polynomial is over e_1..e_" + std::to_string(poly.d) +
                                 " but the matrix has dimension " + std::to_string(x.dim()));
      specfn::PolyPS ps = poly.to_power_sums();
      const double value = specfn::lift_polynomial(ps, x);
      out = json{{"command", "lift"},
                 {"inputs", {{"poly", poly_path}, {"matrix", matrix_path}}},
                 {"value", value}};
    } else if (c_spec->parsed()) {
      specfn::SymMatrix x = specfn::load_matrix(matrix_path);
      specfn::Spectrum s = specfn::jacobi_eigh(x);
      json projections = json::array();
      for (const specfn::SymMatrix& pi : s.flag.projections) projections.push_back(rows_json(pi));
      specfn::EngineDiagnostics diag = probe_diagnostics(s, cfg);
      out = json{{"command", "spectrum"},
                 {"inputs", {{"matrix", matrix_path}}},
                 {"value", {{"eigenvalues", s.r}, {"projections", std::move(projections)}}},
                 {"diagnostics", diagnostics_json(diag)}};
    } else if (c_check->parsed()) {
      std::vector<std::string> wanted;
      if (suite == "all")
        wanted = specfn::suite_names();
      else
        wanted.push_back(suite);
      json reports = json::array();
      bool ok = true;
      for (const std::string& name : wanted) {
        int t = trials;
        if (t <= 0) {
          if (name == "gradient") t = 100;
          else if (name == "hessian") t = 50;
          else if (name == "order3") t = 50;
          else if (name == "dualpath") t = 1000;
          else t = 40;
        }
        specfn::DerivReport rep = specfn::run_suite(name, run_seed, t);
        ok = ok && rep.all_pass();
        reports.push_back(specfn::report_to_json(rep));
      }
      out = json{{"command", "check"}, {"seed", run_seed}, {"reports", std::move(reports)},
                 {"all_pass", ok}};
      std::cout << out.dump(2) << "\n";
      return ok ? 0 : 2;
    }

    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const specfn::InputError& e) {
    std::cerr << json{{"error", "input"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const specfn::DomainError& e) {
    std::cerr << json{{"error", "domain"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const specfn::NumericalError& e) {
    std::cerr << json{{"error", "numerical"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
}
