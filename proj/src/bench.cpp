#include "calibrax/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <thread>

#include "calibrax/error.hpp"
#include "calibrax/rng.hpp"
#include "calibrax/simulator.hpp"

namespace calibrax {

namespace {

constexpr double kFailed = std::numeric_limits<double>::quiet_NaN();

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CALIBRAX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs task(i) for i in [0, count). Each task writes only its own slot, so
// the outcome does not depend on scheduling.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task task) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
}

}  // namespace

std::vector<std::string> known_metrics() {
  return {"ece", "debiased", "sweep", "ks", "tcebpm"};
}

std::vector<std::size_t> default_sizes() {
  std::vector<std::size_t> sizes;
  for (std::size_t n = 500; n <= 5000; n += 500) sizes.push_back(n);
  return sizes;
}

void validate(const BenchmarkConfig& config) {
  if (config.specs.empty())
    throw Error(ErrorCode::kDomain, "benchmark: no distributions");
  if (config.sizes.empty())
    throw Error(ErrorCode::kDomain, "benchmark: no sample sizes");
  if (config.runs < 1) throw Error(ErrorCode::kDomain, "benchmark: runs >= 1");
  for (std::size_t n : config.sizes)
    if (n < 1) throw Error(ErrorCode::kDomain, "benchmark: sizes must be >= 1");
  const auto names = known_metrics();
  for (const auto& m : config.metrics)
    if (std::find(names.begin(), names.end(), m) == names.end())
      throw Error(ErrorCode::kUsage, "unknown metric `" + m + "`");
  if (config.histogram_min_bins < 1 ||
      config.histogram_min_bins > config.histogram_max_bins)
    throw Error(ErrorCode::kDomain, "benchmark: bad histogram bin range");
  validate(config.estimator);
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t spec_index,
                         std::size_t size_index, std::size_t run_index) {
  return derive_seed(base, spec_index, size_index, run_index);
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  double sum = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++a.trials;
    } else {
      ++a.failures;
    }
  }
  if (a.trials == 0) {
    a.mean = kFailed;
    a.stddev = kFailed;
    return a;
  }
  a.mean = sum / static_cast<double>(a.trials);
  if (a.trials > 1) {
    double ss = 0.0;
    for (double v : values)
      if (std::isfinite(v)) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(a.trials - 1));
  }
  return a;
}

PairedTest paired_test(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) {
    if (std::isfinite(xs[i]) && std::isfinite(ys[i])) {
      a.push_back(xs[i]);
      b.push_back(ys[i]);
    }
  }
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < a.size(); ++i) nonzero += a[i] != b[i];
  if (nonzero == 0) return {std::nullopt, "all-zero differences"};
  if (nonzero < kWilcoxonMinPairs) return {std::nullopt, "insufficient n"};
  return {wilcoxon_signed_rank(a, b).p_value, ""};
}

double evaluate_metric(const std::string& name, const Dataset& dataset,
                       const BenchmarkConfig& config) {
  MetricConfig mc;
  mc.bins = config.bins;
  mc.p = config.p;
  if (name == "ece") return ece_bin(dataset, mc);
  if (name == "debiased") return ece_debiased(dataset, mc);
  if (name == "sweep") return ece_sweep(dataset, config.p);
  if (name == "ks") return ks_error(dataset);
  if (name == "tcebpm") return tce_bpm(dataset, config.estimator, mc);
  throw Error(ErrorCode::kUsage, "unknown metric `" + name + "`");
}

Curve histogram_mean_curve(const Dataset& dataset, std::size_t min_bins,
                           std::size_t max_bins) {
  auto maps = std::make_shared<std::vector<CalibrationMap>>();
  for (std::size_t b = min_bins; b <= max_bins; ++b)
    maps->push_back(fit_histogram_binning(dataset, b));
  return [maps](double s) {
    double sum = 0.0;
    for (const auto& m : *maps) sum += m(s);
    return sum / static_cast<double>(maps->size());
  };
}

BenchmarkReport run_metric_benchmark(const BenchmarkConfig& config) {
  validate(config);
  BenchmarkReport report;
  report.kind = "metrics";
  report.config = config;

  const std::size_t n_specs = config.specs.size();
  const std::size_t n_sizes = config.sizes.size();
  const std::size_t n_metrics = config.metrics.size();
  const std::size_t runs = config.runs;
  for (const auto& spec : config.specs)
    report.references.push_back({spec.name(), tce_exact(spec, config.p)});

  // values[((spec * sizes + size) * metrics + metric) * runs + run]
  std::vector<double> values(n_specs * n_sizes * n_metrics * runs, kFailed);
  const std::size_t trials = n_specs * n_sizes * runs;
  parallel_for(trials, resolve_threads(config.threads), [&](std::size_t t) {
    const std::size_t run = t % runs;
    const std::size_t size_idx = (t / runs) % n_sizes;
    const std::size_t spec_idx = t / (runs * n_sizes);
    Dataset data;
    try {
      data = simulate({config.specs[spec_idx], config.sizes[size_idx],
                       trial_seed(config.seed, spec_idx, size_idx, run)});
    } catch (const Error&) {
      return;
    }
    for (std::size_t m = 0; m < n_metrics; ++m) {
      double v = kFailed;
      try {
        v = evaluate_metric(config.metrics[m], data, config);
      } catch (const Error&) {
      }
      values[((spec_idx * n_sizes + size_idx) * n_metrics + m) * runs + run] = v;
    }
  });

  for (std::size_t s = 0; s < n_specs; ++s)
    for (std::size_t z = 0; z < n_sizes; ++z)
      for (std::size_t m = 0; m < n_metrics; ++m) {
        MetricCell cell;
        cell.spec = config.specs[s].name();
        cell.n = config.sizes[z];
        cell.metric = config.metrics[m];
        const auto first = values.begin() +
            static_cast<std::ptrdiff_t>(((s * n_sizes + z) * n_metrics + m) * runs);
        cell.values.assign(first, first + static_cast<std::ptrdiff_t>(runs));
        cell.stats = aggregate(cell.values);
        cell.gap = std::abs(cell.stats.mean - report.references[s].tce);
        report.metric_cells.push_back(std::move(cell));
      }
  return report;
}

BenchmarkReport run_ead_benchmark(const BenchmarkConfig& config) {
  validate(config);
  BenchmarkReport report;
  report.kind = "ead";
  report.config = config;

  const std::size_t n_specs = config.specs.size();
  const std::size_t n_sizes = config.sizes.size();
  const std::size_t runs = config.runs;
  for (const auto& spec : config.specs)
    report.references.push_back({spec.name(), tce_exact(spec, config.p)});

  const std::size_t trials = n_specs * n_sizes * runs;
  std::vector<double> ours(trials, kFailed), hist(trials, kFailed);
  parallel_for(trials, resolve_threads(config.threads), [&](std::size_t t) {
    const std::size_t run = t % runs;
    const std::size_t size_idx = (t / runs) % n_sizes;
    const std::size_t spec_idx = t / (runs * n_sizes);
    const auto& spec = config.specs[spec_idx];
    const Curve truth = [&spec](double s) { return link_eval(spec, s); };
    try {
      const auto data = simulate({spec, config.sizes[size_idx],
                                  trial_seed(config.seed, spec_idx, size_idx, run)});
      const auto params = estimate_curve(data, config.estimator).params;
      ours[t] = ead([&](double s) { return g_eval(params, s); }, truth);
      const std::size_t max_bins =
          std::min(config.histogram_max_bins, data.size());
      if (config.histogram_min_bins <= max_bins)
        hist[t] = ead(histogram_mean_curve(data, config.histogram_min_bins,
                                           max_bins),
                      truth);
    } catch (const Error&) {
    }
  });

  for (std::size_t s = 0; s < n_specs; ++s)
    for (std::size_t z = 0; z < n_sizes; ++z) {
      EadCell cell;
      cell.spec = config.specs[s].name();
      cell.n = config.sizes[z];
      const auto off = static_cast<std::ptrdiff_t>((s * n_sizes + z) * runs);
      const auto len = static_cast<std::ptrdiff_t>(runs);
      cell.ours_values.assign(ours.begin() + off, ours.begin() + off + len);
      cell.histogram_values.assign(hist.begin() + off, hist.begin() + off + len);
      cell.ours = aggregate(cell.ours_values);
      cell.histogram = aggregate(cell.histogram_values);
      cell.test = paired_test(cell.ours_values, cell.histogram_values);
      report.ead_cells.push_back(std::move(cell));
    }
  return report;
}

}  // namespace calibrax
