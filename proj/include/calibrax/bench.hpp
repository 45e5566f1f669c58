#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "calibrax/calibrators.hpp"
#include "calibrax/estimator.hpp"
#include "calibrax/metrics.hpp"
#include "calibrax/prior_curve.hpp"
#include "calibrax/wilcoxon.hpp"

namespace calibrax {

inline constexpr int kReportSchemaVersion = 1;

// Metric identifiers accepted by the metric benchmark and the CLI.
std::vector<std::string> known_metrics();

struct BenchmarkConfig {
  std::vector<TrueDistributionSpec> specs;
  std::vector<std::size_t> sizes;
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> metrics = known_metrics();
  std::size_t bins = 15;
  int p = 1;
  EstimatorConfig estimator;
  // Comparison arm of the EAD benchmark: histogram binning averaged over
  // equal-mass schemes with this many bins.
  std::size_t histogram_min_bins = 10;
  std::size_t histogram_max_bins = 50;
  // Worker threads; 0 reads CALIBRAX_THREADS, falling back to the hardware.
  unsigned threads = 0;
};

// 500, 1000, ..., 5000
std::vector<std::size_t> default_sizes();

void validate(const BenchmarkConfig& config);

// Seed of one trial; independent of execution order.
std::uint64_t trial_seed(std::uint64_t base, std::size_t spec_index,
                         std::size_t size_index, std::size_t run_index);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  std::size_t trials = 0;
  std::size_t failures = 0;
};

// Aggregates the finite entries of `values`; NaN marks a failed trial.
Aggregate aggregate(std::span<const double> values);

struct MetricCell {
  std::string spec;
  std::size_t n = 0;
  std::string metric;
  Aggregate stats;
  double gap = 0.0;  // |mean - TCE|
  std::vector<double> values;  // per trial, by run index
};

struct PairedTest {
  std::optional<double> p_value;
  std::string flag;  // empty, "all-zero differences" or "insufficient n"
};

PairedTest paired_test(std::span<const double> xs, std::span<const double> ys);

struct EadCell {
  std::string spec;
  std::size_t n = 0;
  Aggregate ours;
  Aggregate histogram;
  PairedTest test;
  std::vector<double> ours_values;
  std::vector<double> histogram_values;
};

struct SpecReference {
  std::string spec;
  double tce = 0.0;
};

struct BenchmarkReport {
  int schema_version = kReportSchemaVersion;
  std::string kind;  // "metrics" or "ead"
  BenchmarkConfig config;
  std::vector<SpecReference> references;
  std::vector<MetricCell> metric_cells;
  std::vector<EadCell> ead_cells;
};

// Evaluates one named metric on a dataset.
double evaluate_metric(const std::string& name, const Dataset& dataset,
                       const BenchmarkConfig& config);

// Pointwise mean of histogram-binning maps over a range of bin counts.
Curve histogram_mean_curve(const Dataset& dataset, std::size_t min_bins,
                           std::size_t max_bins);

BenchmarkReport run_metric_benchmark(const BenchmarkConfig& config);
BenchmarkReport run_ead_benchmark(const BenchmarkConfig& config);

}  // namespace calibrax
