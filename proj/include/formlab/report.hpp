#pragma once

#include <string>

#include "json.hpp"

#include "formlab/circle.hpp"
#include "formlab/count.hpp"
#include "formlab/fpvariety.hpp"
#include "formlab/invariants.hpp"
#include "formlab/weyl.hpp"

namespace formlab {

using OJson = nlohmann::ordered_json;

OJson json_of(const CountResult& r);
OJson json_of(const GEstimate& g);
OJson json_of(const ExpSumResult& s);
OJson json_of(const PsiMatrix& psi);
OJson json_of(const DichotomyOutcome& o);
OJson json_of(const DichotomyReport& r);
OJson json_of(const FpDimensionEstimate& e);
OJson json_of(const UInvariantResult& u);
OJson json_of(const InvariantReport& r);
OJson json_of(const SingularSeriesTruncation& s);
OJson json_of(const SingularIntegralTruncation& s);
OJson json_of(const PredictReport& r);

// Report envelope: {tool, format, command, config, result, provenance}.
// Exact quantities are serialized as decimal strings; floats stay numbers.
OJson make_report(const std::string& command, OJson config, OJson result, OJson provenance);

// Structural validation of the envelope: required keys, a known command, a
// non-empty provenance block.
bool validate_report(const OJson& report, std::string* why = nullptr);

}  // namespace formlab
