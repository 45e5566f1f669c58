#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "calibrax/data.hpp"

namespace calibrax {

enum class BinningKind { kEqualMass, kEqualWidth };

// A partition of a dataset's sample indices into bins. `order` lists sample
// indices grouped bin by bin; bin b owns order[offsets[b] .. offsets[b+1]).
// Equal-width schemes also carry their bin_count + 1 edges and may contain
// empty bins.
struct BinningScheme {
  BinningKind kind = BinningKind::kEqualMass;
  std::size_t sample_count = 0;
  std::vector<std::size_t> order;
  std::vector<std::size_t> offsets;
  std::vector<double> edges;

  std::size_t bin_count() const { return offsets.size() - 1; }
  std::size_t bin_size(std::size_t b) const {
    return offsets[b + 1] - offsets[b];
  }
  std::span<const std::size_t> bin(std::size_t b) const {
    return std::span(order).subspan(offsets[b], bin_size(b));
  }
};

struct BinStats {
  double mean_confidence = 0.0;
  std::size_t count = 0;
  std::size_t positives = 0;
  double weight = 0.0;  // count / N

  double accuracy() const {
    return static_cast<double>(positives) / static_cast<double>(count);
  }
};

// Indices sorted by (confidence, original index).
std::vector<std::size_t> sorted_order(const Dataset& dataset);

// Bin b of an equal-mass split of n ranks into `bins` parts gets
// floor(n / bins) items, plus one for the first n mod bins bins.
std::vector<std::size_t> equal_mass_offsets(std::size_t n, std::size_t bins);

BinningScheme equal_mass_bins(const Dataset& dataset, std::size_t bins);
BinningScheme equal_mass_bins(std::span<const std::size_t> sorted,
                              std::size_t bins);
BinningScheme equal_width_bins(const Dataset& dataset, std::size_t bins);

// Per-bin statistics; empty bins (equal-width only) are skipped.
std::vector<BinStats> bin_stats(const Dataset& dataset,
                                const BinningScheme& scheme);

// Bin counts for the Bayesian average over equal-mass schemes: every count
// in [ceil(N/100), floor(N/20)], so that bins hold between 20 and 100
// samples. Below N = 40 a single count max(1, floor(N/20)) is used and
// `fallback` is set.
struct SchemeSpace {
  std::vector<std::size_t> bin_counts;
  double scheme_weight = 0.0;  // uniform P(B)
  bool fallback = false;
};

SchemeSpace scheme_space(std::size_t n);

}  // namespace calibrax
