#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "calibrax/binning.hpp"
#include "calibrax/data.hpp"
#include "calibrax/error.hpp"
#include "calibrax/estimator.hpp"
#include "calibrax/prior_curve.hpp"

namespace calibrax {

struct MetricConfig {
  std::size_t bins = 15;
  int p = 1;
  BinningKind binning = BinningKind::kEqualMass;
  std::size_t quadrature_points = 20000;
};

void validate(const MetricConfig& config);

// Composite midpoint rule on `points` uniform cells. Never touches lo or
// hi, so integrable endpoint singularities (beta densities with a shape
// below one) are fine.
template <typename F>
double integrate(F&& f, double lo, double hi, std::size_t points) {
  if (!(lo < hi) || points == 0)
    throw Error(ErrorCode::kDomain, "integrate: need lo < hi and points > 0");
  const double h = (hi - lo) / static_cast<double>(points);
  double sum = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(lo + (static_cast<double>(i) + 0.5) * h);
    if (!std::isfinite(v))
      throw Error(ErrorCode::kDomain, "integrate: non-finite integrand");
    sum += v;
  }
  return sum * h;
}

using Curve = std::function<double(double)>;

// (integral of |curve(s) - s|^p xi(s) ds)^(1/p) for a beta density xi.
double calibration_error_integral(const Curve& curve, const BetaParams& xi,
                                  int p, std::size_t points);

struct TceBpmResult {
  double value = 0.0;
  CurveFit fit;
  BetaParams xi;
};

// Estimated true calibration error: fitted prior curve against a
// moment-fitted beta confidence density.
TceBpmResult tce_bpm_detail(const Dataset& dataset,
                            const EstimatorConfig& est_config = {},
                            const MetricConfig& metric_config = {});
double tce_bpm(const Dataset& dataset, const EstimatorConfig& est_config = {},
               const MetricConfig& metric_config = {});

// Exact TCE of a known distribution.
double tce_exact(const TrueDistributionSpec& spec, int p = 1,
                 std::size_t points = 20000);

double ece_bin(const Dataset& dataset, const MetricConfig& config = {});

// Jackknife-debiased squared ECE, floored at zero, square-rooted. Uses the
// configured binning; every bin needs at least two samples.
double ece_debiased(const Dataset& dataset, const MetricConfig& config = {});

struct SweepResult {
  double value = 0.0;
  std::size_t bins = 1;
};

// Equal-mass ECE at the largest bin count reached by sweeping B = 1, 2, ...
// while per-bin accuracies stay non-decreasing.
SweepResult ece_sweep_detail(const Dataset& dataset, int p = 1);
double ece_sweep(const Dataset& dataset, int p = 1);

// max_k |(1/N) sum_{i<=k} (h_i - s_i)| over the confidence-sorted prefix.
double ks_error(const Dataset& dataset);

// (1/1000) * sum_{i=0}^{1000} |a(i/1000) - b(i/1000)|. The 1001 terms over
// a 1000 divisor are intentional.
double ead(const Curve& a, const Curve& b);

}  // namespace calibrax
