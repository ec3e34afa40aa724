#pragma once

// JSON rendering of result types. Field order is fixed so that output is
// byte-stable.

#include "bkdv/classify.hpp"
#include "bkdv/equivalence.hpp"
#include "bkdv/reduction.hpp"

#include <json.hpp>

namespace bkdv {

using Json = nlohmann::ordered_json;

/// 1-based position of the row in the classification table.
int case_number(CaseId id);
/// True if the equation is in the canonical form of its row.
bool is_canonical(const ClassificationResult &res);

Json to_json(const VectorField &q);
Json to_json(const Equation &eq);
Json to_json(const GaugedEquation &eq);
Json to_json(const EquivTransformation &g);
Json to_json(const GaugeResult &g);
Json to_json(const ClassificationResult &res);
Json to_json(const ReductionResult &res);
/// Per-residual zero tests and the overall verdict.
Json symmetry_report(const VectorField &q, const GaugedEquation &eq);

} // namespace bkdv
