#pragma once

// JSON bindings: config parsing (field specs, regions, closed sets) and
// report serialization.  Reports use ordered_json so key order, and therefore
// the serialized bytes, are deterministic.  Non-finite doubles are clamped to
// +-1e308 (JSON has no inf) and report eigenvalues are rounded to 12
// significant digits.

#include <string>

#include "json.hpp"
#include "pllab/distance_fields.hpp"
#include "pllab/flow.hpp"
#include "pllab/minset.hpp"
#include "pllab/pl_certify.hpp"
#include "pllab/region.hpp"
#include "pllab/scalar_field.hpp"

namespace pllab {

using json = nlohmann::ordered_json;

double clamp_finite(double v);
double round_sig12(double v);

json json_of(const Vector& v);
json json_of(const Matrix& m);
Vector vector_from_json(const json& j, const std::string& what);
Matrix matrix_from_json(const json& j, const std::string& what);

json json_of(const Region& r);
Region region_from_json(const json& j);

json json_of(const ClosedSetRep& s);
ClosedSetRep set_from_json(const json& j);

// {"catalogue": name, "params": {...}} or {"expr": text, "dim": n}.
// graph_residual accepts {"g": {"builtin": "sin"}} and nested field specs.
// Throws ConfigParseError / UnknownCatalogueName / InvalidParams.
ScalarField field_from_spec(const json& spec);

json json_of(const ScalarField& f);  // metadata only, not the oracles

json json_of(const Trajectory& t);   // summary: terminal, lengths, stop info
json json_of(const DecayReport& r);
json json_of(const LengthReport& r);
json json_of(const RetractionReport& r);
json json_of(const PLReport& r);
json json_of(const GrowthReport& r);
json json_of(const HessianGapReport& r);
json json_of(const ConstantRankReport& r);
json json_of(const KernelChartReport& r);
json json_of(const CriticalSetModel& m);
json json_of(const FlowFormulaReport& r);
json json_of(const RayInvarianceReport& r);
json json_of(const SeparationReport& r);
json json_of(const RegularityReport& r);

}  // namespace pllab
