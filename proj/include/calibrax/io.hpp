#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "calibrax/bench.hpp"
#include "calibrax/calibrators.hpp"
#include "calibrax/estimator.hpp"
#include "calibrax/prior_curve.hpp"

namespace calibrax {

using Json = nlohmann::ordered_json;

// Curve file: {"alpha", "beta", "c", "diagnostics": {...}}.
Json curve_to_json(const CurveFit& fit);
Json curve_to_json(const PriorCurveParams& params);
PriorCurveParams curve_from_json(const Json& j);
PriorCurveParams load_curve(const std::filesystem::path& path);

// Spec file: {"name", "curve": {...}, "confidence": {"a1", "a2"}} where the
// curve is either {"inverse_link", "intercept", "slope", "predictor_link"}
// or {"constant"}.
Json spec_to_json(const TrueDistributionSpec& spec);
TrueDistributionSpec spec_from_json(const Json& j);

// A built-in name (D1..D5) or a path to a spec file.
TrueDistributionSpec resolve_spec(const std::string& name_or_path);

// Kind-tagged calibration map.
Json map_to_json(const CalibrationMap& map);
CalibrationMap map_from_json(const Json& j);

Json report_to_json(const BenchmarkReport& report);

// One row per trial: kind, spec, n, run, seed, metric/arm, value.
std::string per_trial_csv(const BenchmarkReport& report);

// Serialized with a trailing newline.
std::string dump(const Json& j);

}  // namespace calibrax
