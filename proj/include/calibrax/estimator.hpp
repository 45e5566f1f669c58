#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "calibrax/binning.hpp"
#include "calibrax/data.hpp"
#include "calibrax/nelder_mead.hpp"
#include "calibrax/prior_curve.hpp"

namespace calibrax {

struct EstimatorConfig {
  // Equal-mass bin counts forming the scheme space; empty means
  // scheme_space(N).
  std::vector<std::size_t> scheme_counts;
  PriorCurveParams init{1.0, 1.0, 0.0};
  int max_iterations = 2000;
  double tolerance = 1e-8;
  int restarts = 2;
};

void validate(const EstimatorConfig& config);

// The Bayesian-averaged binned objective
//
//   sum_B P(B) sum_b P(b) * exp((g(S_b) - Npos_b / N_b)^2)
//
// with uniform P(B) and P(b) = |b| / N. Bin statistics are flattened once;
// each evaluation only recomputes g at the cached bin means. Negative alpha
// and beta are clamped to zero before evaluating g.
class BinnedObjective {
 public:
  BinnedObjective(const Dataset& dataset,
                  std::span<const BinningScheme> schemes);

  double operator()(const PriorCurveParams& params) const;

  std::size_t term_count() const { return weight_.size(); }

 private:
  std::vector<double> log_s_;
  std::vector<double> log_1ms_;
  std::vector<double> target_;
  std::vector<double> weight_;  // P(B) * P(b)
};

double objective(const Dataset& dataset,
                 std::span<const BinningScheme> schemes,
                 const PriorCurveParams& params);

// Projects parameters onto the monotone region alpha, beta >= 0.
PriorCurveParams clamp_monotone(const PriorCurveParams& params);

struct CurveFit {
  PriorCurveParams params;
  double objective = 0.0;
  int iterations = 0;  // summed over all restarts
  int evaluations = 0;
  std::vector<std::size_t> scheme_counts;
  bool fallback_schemes = false;
};

// Fits the prior curve family to (confidence, hit) data by minimizing the
// binned objective with Nelder-Mead, restarting from perturbed copies of the
// best point found so far.
CurveFit estimate_curve(const Dataset& dataset,
                        const EstimatorConfig& config = {});

}  // namespace calibrax
