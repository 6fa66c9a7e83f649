#pragma once

#include <string>

#include "specfn/matrix.hpp"
#include "specfn/newton.hpp"
#include "specfn/verify.hpp"

#include <json.hpp>

namespace specfn {

/// Matrix JSON: {"dim": d, "rows": [[...], ...]}. Rejects asymmetry above
/// 1e-12 * (1 + max|X|), then symmetrizes exactly.
SymMatrix matrix_from_json(const nlohmann::json& j);
SymMatrix load_matrix(const std::string& path);
nlohmann::json matrix_to_json(const SymMatrix& x);

/// SymPoly JSON: [{"coeff": c, "exponents": [e1..ed]}, ...] over e_1..e_d.
SymPolyE sympoly_from_json(const nlohmann::json& j);
SymPolyE load_sympoly(const std::string& path);

nlohmann::json report_to_json(const DerivReport& rep);

}  // namespace specfn
