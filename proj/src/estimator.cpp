#include "calibrax/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "calibrax/error.hpp"

namespace calibrax {

void validate(const EstimatorConfig& config) {
  if (config.max_iterations < 1)
    throw Error(ErrorCode::kDomain, "max_iterations must be >= 1");
  if (!(config.tolerance > 0.0))
    throw Error(ErrorCode::kDomain, "tolerance must be > 0");
  if (config.restarts < 0)
    throw Error(ErrorCode::kDomain, "restarts must be >= 0");
}

BinnedObjective::BinnedObjective(const Dataset& dataset,
                                 std::span<const BinningScheme> schemes) {
  if (schemes.empty())
    throw Error(ErrorCode::kDomain, "objective: empty scheme set");
  const double scheme_weight = 1.0 / static_cast<double>(schemes.size());
  for (const auto& scheme : schemes) {
    for (const auto& st : bin_stats(dataset, scheme)) {
      log_s_.push_back(std::log(st.mean_confidence));
      log_1ms_.push_back(std::log1p(-st.mean_confidence));
      target_.push_back(st.accuracy());
      weight_.push_back(scheme_weight * st.weight);
    }
  }
}

double BinnedObjective::operator()(const PriorCurveParams& params) const {
  const auto p = clamp_monotone(params);
  double total = 0.0;
  for (std::size_t k = 0; k < weight_.size(); ++k) {
    const double r = g_from_logs(p, log_s_[k], log_1ms_[k]) - target_[k];
    total += weight_[k] * std::exp(r * r);
  }
  return total;
}

double objective(const Dataset& dataset,
                 std::span<const BinningScheme> schemes,
                 const PriorCurveParams& params) {
  return BinnedObjective(dataset, schemes)(params);
}

PriorCurveParams clamp_monotone(const PriorCurveParams& params) {
  return {std::max(0.0, params.alpha), std::max(0.0, params.beta), params.c};
}

namespace {

bool no_curve_information(const Dataset& dataset) {
  const auto& first = dataset[0];
  return std::all_of(dataset.begin(), dataset.end(), [&](const auto& s) {
    return s.hit == first.hit && s.confidence == first.confidence;
  });
}

}  // namespace

CurveFit estimate_curve(const Dataset& dataset, const EstimatorConfig& config) {
  validate(config);
  if (dataset.empty())
    throw Error(ErrorCode::kDegenerate, "no curve information: empty dataset");
  if (no_curve_information(dataset))
    throw Error(ErrorCode::kDegenerate,
                "no curve information: all samples identical");

  CurveFit fit;
  if (config.scheme_counts.empty()) {
    const auto space = scheme_space(dataset.size());
    fit.scheme_counts = space.bin_counts;
    fit.fallback_schemes = space.fallback;
  } else {
    fit.scheme_counts = config.scheme_counts;
  }

  const auto order = sorted_order(dataset);
  std::vector<BinningScheme> schemes;
  schemes.reserve(fit.scheme_counts.size());
  for (std::size_t b : fit.scheme_counts)
    schemes.push_back(equal_mass_bins(order, b));
  const BinnedObjective objective_fn(dataset, schemes);

  const Objective f = [&](std::span<const double> x) {
    return objective_fn({x[0], x[1], x[2]});
  };
  const NelderMeadOptions nm{config.max_iterations, config.tolerance, 0.1};

  std::vector<double> best_x{config.init.alpha, config.init.beta,
                              config.init.c};
  double best_value = f(best_x);
  if (!std::isfinite(best_value))
    throw Error(ErrorCode::kDomain, "objective not finite at initial point");

  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    auto start = best_x;
    if (attempt > 0) start[(attempt - 1) % 3] += 0.5;
    if (!std::isfinite(f(start))) continue;
    const auto run = nelder_mead(f, start, nm);
    fit.iterations += run.iterations;
    fit.evaluations += run.evaluations;
    if (run.value < best_value) {
      best_value = run.value;
      best_x = run.x;
    }
  }

  fit.params = clamp_monotone({best_x[0], best_x[1], best_x[2]});
  fit.objective = objective_fn(fit.params);
  return fit;
}

}  // namespace calibrax
