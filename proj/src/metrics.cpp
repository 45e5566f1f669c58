#include "calibrax/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace calibrax {

namespace {

double lp_root(double sum, int p) {
  return p == 1 ? sum : std::pow(sum, 1.0 / p);
}

double lp_term(double diff, int p) {
  const double a = std::abs(diff);
  return p == 1 ? a : std::pow(a, p);
}

BinningScheme make_scheme(const Dataset& dataset, const MetricConfig& config) {
  if (config.bins > dataset.size())
    throw Error(ErrorCode::kDomain, "more bins than samples");
  return config.binning == BinningKind::kEqualMass
             ? equal_mass_bins(dataset, config.bins)
             : equal_width_bins(dataset, config.bins);
}

void require_nonempty(const Dataset& dataset, const char* what) {
  if (dataset.empty())
    throw Error(ErrorCode::kDomain, std::string(what) + ": empty dataset");
}

double ece_from_stats(const std::vector<BinStats>& stats, int p) {
  double sum = 0.0;
  for (const auto& st : stats)
    sum += st.weight * lp_term(st.accuracy() - st.mean_confidence, p);
  return lp_root(sum, p);
}

}  // namespace

void validate(const MetricConfig& config) {
  if (config.bins < 1) throw Error(ErrorCode::kDomain, "bins must be >= 1");
  if (config.p < 1) throw Error(ErrorCode::kDomain, "p must be >= 1");
  if (config.quadrature_points < 1)
    throw Error(ErrorCode::kDomain, "quadrature points must be >= 1");
}

double calibration_error_integral(const Curve& curve, const BetaParams& xi,
                                  int p, std::size_t points) {
  if (p < 1) throw Error(ErrorCode::kDomain, "p must be >= 1");
  validate(xi);
  // beta_pdf revalidates per call; inline the log-density here instead.
  const double log_norm =
      std::lgamma(xi.a1 + xi.a2) - std::lgamma(xi.a1) - std::lgamma(xi.a2);
  const double sum = integrate(
      [&](double s) {
        const double dens = std::exp(log_norm + (xi.a1 - 1.0) * std::log(s) +
                                     (xi.a2 - 1.0) * std::log1p(-s));
        return lp_term(curve(s) - s, p) * dens;
      },
      0.0, 1.0, points);
  return lp_root(sum, p);
}

TceBpmResult tce_bpm_detail(const Dataset& dataset,
                            const EstimatorConfig& est_config,
                            const MetricConfig& metric_config) {
  validate(metric_config);
  require_nonempty(dataset, "tce_bpm");
  TceBpmResult out;
  // Fit xi first: it fails fast on constant-confidence data.
  out.xi = beta_moment_fit(dataset.confidences());
  out.fit = estimate_curve(dataset, est_config);
  const auto params = out.fit.params;
  out.value = calibration_error_integral(
      [&](double s) { return g_eval(params, s); }, out.xi, metric_config.p,
      metric_config.quadrature_points);
  return out;
}

double tce_bpm(const Dataset& dataset, const EstimatorConfig& est_config,
               const MetricConfig& metric_config) {
  return tce_bpm_detail(dataset, est_config, metric_config).value;
}

double tce_exact(const TrueDistributionSpec& spec, int p, std::size_t points) {
  return calibration_error_integral(
      [&](double s) { return link_eval(spec, s); }, spec.confidence(), p,
      points);
}

double ece_bin(const Dataset& dataset, const MetricConfig& config) {
  validate(config);
  require_nonempty(dataset, "ece_bin");
  return ece_from_stats(bin_stats(dataset, make_scheme(dataset, config)),
                        config.p);
}

double ece_debiased(const Dataset& dataset, const MetricConfig& config) {
  validate(config);
  require_nonempty(dataset, "ece_debiased");
  const auto stats = bin_stats(dataset, make_scheme(dataset, config));
  double sum = 0.0;
  for (const auto& st : stats) {
    if (st.count < 2)
      throw Error(ErrorCode::kDomain,
                  "ece_debiased: every bin needs at least two samples");
    const double acc = st.accuracy();
    const double gap = acc - st.mean_confidence;
    const double bias = acc * (1.0 - acc) / static_cast<double>(st.count - 1);
    sum += st.weight * (gap * gap - bias);
  }
  return std::sqrt(std::max(0.0, sum));
}

SweepResult ece_sweep_detail(const Dataset& dataset, int p) {
  require_nonempty(dataset, "ece_sweep");
  if (p < 1) throw Error(ErrorCode::kDomain, "p must be >= 1");
  const auto order = sorted_order(dataset);
  SweepResult best{ece_from_stats(bin_stats(dataset, equal_mass_bins(order, 1)), p), 1};
  for (std::size_t b = 2; b <= dataset.size(); ++b) {
    const auto stats = bin_stats(dataset, equal_mass_bins(order, b));
    bool monotone = true;
    for (std::size_t k = 1; k < stats.size() && monotone; ++k)
      monotone = stats[k].accuracy() >= stats[k - 1].accuracy();
    if (!monotone) break;
    best = {ece_from_stats(stats, p), b};
  }
  return best;
}

double ece_sweep(const Dataset& dataset, int p) {
  return ece_sweep_detail(dataset, p).value;
}

double ks_error(const Dataset& dataset) {
  require_nonempty(dataset, "ks_error");
  const double n = static_cast<double>(dataset.size());
  double running = 0.0;
  double worst = 0.0;
  for (std::size_t i : sorted_order(dataset)) {
    running += dataset[i].hit - dataset[i].confidence;
    worst = std::max(worst, std::abs(running) / n);
  }
  return worst;
}

double ead(const Curve& a, const Curve& b) {
  double sum = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    const double d = a(s) - b(s);
    if (!std::isfinite(d))
      throw Error(ErrorCode::kDomain, "ead: non-finite curve value");
    sum += std::abs(d);
  }
  return sum / 1000.0;
}

}  // namespace calibrax
