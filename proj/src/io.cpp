#include "specfn/io.hpp"

#include <cmath>
#include <fstream>

namespace specfn {

using nlohmann::json;

SymMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("rows"))
    throw InputError("matrix JSON must be {\"dim\": d, \"rows\": [[...], ...]}");
  const int d = j.at("dim").get<int>();
  if (d < 1) throw InputError("matrix JSON: dim must be >= 1");
  const auto& rows = j.at("rows");
  if (!rows.is_array() || static_cast<int>(rows.size()) != d)
    throw InputError("matrix JSON: rows must be a " + std::to_string(d) + "-row array");

  Matrix m(d);
  for (int i = 0; i < d; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw InputError("matrix JSON: row " + std::to_string(i) + " must have " +
                       std::to_string(d) + " entries");
    for (int k = 0; k < d; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }

  double asym = 0.0;
  for (int i = 0; i < d; ++i)
    for (int k = i + 1; k < d; ++k) asym = std::max(asym, std::abs(m(i, k) - m(k, i)));
  if (asym > 1e-12 * (1.0 + m.max_abs()))
    throw InputError("matrix JSON: input is not symmetric (max asymmetry " +
                     std::to_string(asym) + ")");
  return SymMatrix::from_matrix(m);
}

SymMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("bad JSON in '" + path + "': " + e.what());
  }
  return matrix_from_json(j);
}

json matrix_to_json(const SymMatrix& x) {
  json rows = json::array();
  for (int i = 0; i < x.dim(); ++i) {
    json row = json::array();
    for (int k = 0; k < x.dim(); ++k) row.push_back(x(i, k));
    rows.push_back(std::move(row));
  }
  return json{{"dim", x.dim()}, {"rows", std::move(rows)}};
}

SymPolyE sympoly_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw InputError("sympoly JSON must be a non-empty array of {coeff, exponents}");
  SymPolyE poly;
  poly.d = static_cast<int>(j.at(0).at("exponents").size());
  if (poly.d < 1) throw InputError("sympoly JSON: empty exponent vector");
  for (const auto& term : j) {
    if (!term.contains("coeff") || !term.contains("exponents"))
      throw InputError("sympoly JSON: each term needs coeff and exponents");
    std::vector<int> exps = term.at("exponents").get<std::vector<int>>();
    if (static_cast<int>(exps.size()) != poly.d)
      throw InputError("sympoly JSON: inconsistent exponent lengths");
    for (int e : exps)
      if (e < 0) throw InputError("sympoly JSON: exponents must be >= 0");
    poly.terms.emplace_back(std::move(exps), term.at("coeff").get<double>());
  }
  return poly;
}

SymPolyE load_sympoly(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open polynomial file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("bad JSON in '" + path + "': " + e.what());
  }
  return sympoly_from_json(j);
}

json report_to_json(const DerivReport& rep) {
  json records = json::array();
  for (const CaseRecord& c : rep.records) {
    records.push_back(json{{"f", c.f_src},
                           {"x", c.x_desc},
                           {"xi", c.xi_desc},
                           {"n", c.n},
                           {"formula_value", c.formula_value},
                           {"oracle_value", c.oracle_value},
                           {"rel_err", c.rel_err},
                           {"tol", c.tol},
                           {"pass", c.pass}});
  }
  return json{{"suite", rep.suite},
              {"records", std::move(records)},
              {"summary",
               {{"max_rel_err", rep.max_rel_err},
                {"pass_rate", rep.pass_rate},
                {"seed", rep.seed},
                {"trials", rep.trials},
                {"cases", rep.records.size()}}}};
}

}  // namespace specfn
