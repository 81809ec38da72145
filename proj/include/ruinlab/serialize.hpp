#pragma once

#include <iosfwd>

#include <json.hpp>

#include "ruinlab/model.hpp"
#include "ruinlab/montecarlo.hpp"
#include "ruinlab/oracle.hpp"
#include "ruinlab/series.hpp"
#include "ruinlab/transform.hpp"

// JSON and CSV renderings of the result types. Exact integers are written as
// decimal strings; absent optionals are written as null so the key set of
// every object is fixed.

namespace ruinlab {

using Json = nlohmann::ordered_json;

Json to_json(const TrialModel& model);
Json to_json(const RuinSpec& ruin);
Json to_json(const SeriesReport& report);
/// The per-step ruin-time distribution is left out; see write_ruin_time_csv.
Json to_json(const AbsorptionResult& result);
Json to_json(const SimResult& result);
Json to_json(const TransformResult& result);
Json to_json(const RebalancedRuinInputs& inputs);
Json to_json(const MethodRow& row);
Json to_json(const MethodComparison& comparison);

/// Shortest round-trip decimal, independent of the global locale.
std::string format_double(double value);

/// N,count,probability,cumulative
void write_series_csv(std::ostream& out, const SeriesReport& report);
/// step,probability_mass (only steps with nonzero mass)
void write_ruin_time_csv(std::ostream& out, const AbsorptionResult& result);
/// step,count
void write_histogram_csv(std::ostream& out, const SimResult& result);
/// table,method,value,valid,deviation,standard_error,note
void write_comparison_csv(std::ostream& out, const MethodComparison& comparison);

}  // namespace ruinlab
