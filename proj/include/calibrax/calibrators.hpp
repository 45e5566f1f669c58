#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "calibrax/data.hpp"
#include "calibrax/estimator.hpp"
#include "calibrax/prior_curve.hpp"

namespace calibrax {

struct TpmMap {
  PriorCurveParams params;
};

// Piecewise-constant map. thresholds[k] separates bin k from bin k + 1;
// a confidence equal to a threshold belongs to the upper bin.
struct HistogramMap {
  std::vector<double> thresholds;
  std::vector<double> values;
};

// Divides logits by the temperature before the softmax.
struct TemperatureMap {
  double temperature = 1.0;
  bool diverged = false;
};

// sigmoid(w * logit(s) + b)
struct PlattMap {
  double w = 1.0;
  double b = 0.0;
  bool separable = false;
};

// Non-decreasing step function: value[k] applies from starts[k] up to the
// next start. Below starts[0] the first value applies.
struct IsotonicMap {
  std::vector<double> starts;
  std::vector<double> values;
};

enum class MapKind { kTpm, kHistogram, kTemperature, kPlatt, kIsotonic };

std::string map_kind_name(MapKind kind);
MapKind parse_map_kind(const std::string& name);

class CalibrationMap {
 public:
  using Variant =
      std::variant<TpmMap, HistogramMap, TemperatureMap, PlattMap, IsotonicMap>;

  template <typename Map>
    requires std::is_constructible_v<Variant, Map>
  CalibrationMap(Map m) : map_(std::move(m)) {}  // NOLINT

  MapKind kind() const;
  const Variant& variant() const noexcept { return map_; }

  // Calibrated confidence for a confidence score. Not available for
  // temperature maps, which need the full logit vector.
  double operator()(double confidence) const;

  // Calibrated top-class confidence for a logit vector (temperature only).
  double apply_logits(std::span<const double> logits) const;

 private:
  Variant map_;
};

CalibrationMap fit_tpm(const Dataset& dataset,
                       const EstimatorConfig& config = {});
CalibrationMap fit_histogram_binning(const Dataset& dataset, std::size_t bins);
CalibrationMap fit_temperature(std::span<const LogitRecord> records);
CalibrationMap fit_platt(const Dataset& dataset);
CalibrationMap fit_isotonic(const Dataset& dataset);

// Replaces confidences with map outputs; hits are preserved.
Dataset apply_map(const CalibrationMap& map, const Dataset& dataset);
Dataset apply_map(const CalibrationMap& map,
                  std::span<const LogitRecord> records);

}  // namespace calibrax
