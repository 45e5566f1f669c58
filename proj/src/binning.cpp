#include "calibrax/binning.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "calibrax/error.hpp"

namespace calibrax {

std::vector<std::size_t> sorted_order(const Dataset& dataset) {
  std::vector<std::size_t> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return dataset[a].confidence < dataset[b].confidence;
  });
  return idx;
}

std::vector<std::size_t> equal_mass_offsets(std::size_t n, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::kDomain, "bin count must be >= 1");
  if (bins > n)
    throw Error(ErrorCode::kDomain, "bin count " + std::to_string(bins) +
                                        " exceeds sample count " +
                                        std::to_string(n));
  const std::size_t base = n / bins;
  const std::size_t extra = n % bins;
  std::vector<std::size_t> offsets(bins + 1, 0);
  for (std::size_t b = 0; b < bins; ++b)
    offsets[b + 1] = offsets[b] + base + (b < extra ? 1 : 0);
  return offsets;
}

BinningScheme equal_mass_bins(std::span<const std::size_t> sorted,
                              std::size_t bins) {
  BinningScheme scheme;
  scheme.kind = BinningKind::kEqualMass;
  scheme.sample_count = sorted.size();
  scheme.offsets = equal_mass_offsets(sorted.size(), bins);
  scheme.order.assign(sorted.begin(), sorted.end());
  return scheme;
}

BinningScheme equal_mass_bins(const Dataset& dataset, std::size_t bins) {
  const auto order = sorted_order(dataset);
  return equal_mass_bins(order, bins);
}

BinningScheme equal_width_bins(const Dataset& dataset, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::kDomain, "bin count must be >= 1");
  BinningScheme scheme;
  scheme.kind = BinningKind::kEqualWidth;
  scheme.sample_count = dataset.size();
  scheme.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b)
    scheme.edges[b] = static_cast<double>(b) / static_cast<double>(bins);

  // Bin k holds [k/B, (k+1)/B); the last bin is closed at 1.
  std::vector<std::vector<std::size_t>> members(bins);
  for (std::size_t i : sorted_order(dataset)) {
    const double s = dataset[i].confidence;
    auto k = static_cast<std::size_t>(s * static_cast<double>(bins));
    members[std::min(k, bins - 1)].push_back(i);
  }
  scheme.offsets.push_back(0);
  for (const auto& m : members) {
    scheme.order.insert(scheme.order.end(), m.begin(), m.end());
    scheme.offsets.push_back(scheme.order.size());
  }
  return scheme;
}

std::vector<BinStats> bin_stats(const Dataset& dataset,
                                const BinningScheme& scheme) {
  if (scheme.sample_count != dataset.size() ||
      scheme.order.size() != dataset.size())
    throw Error(ErrorCode::kDomain,
                "binning scheme was built for a different dataset");
  const double n = static_cast<double>(dataset.size());
  std::vector<BinStats> stats;
  stats.reserve(scheme.bin_count());
  for (std::size_t b = 0; b < scheme.bin_count(); ++b) {
    const auto members = scheme.bin(b);
    if (members.empty()) continue;
    BinStats st;
    double sum = 0.0;
    for (std::size_t i : members) {
      sum += dataset[i].confidence;
      st.positives += static_cast<std::size_t>(dataset[i].hit);
    }
    st.count = members.size();
    st.mean_confidence = sum / static_cast<double>(st.count);
    st.weight = static_cast<double>(st.count) / n;
    stats.push_back(st);
  }
  return stats;
}

SchemeSpace scheme_space(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kDomain, "scheme_space: empty dataset");
  SchemeSpace space;
  const std::size_t lo = (n + 99) / 100;
  const std::size_t hi = n / 20;
  if (n < 40 || lo > hi) {
    space.bin_counts = {std::max<std::size_t>(1, n / 20)};
    space.fallback = true;
  } else {
    for (std::size_t b = lo; b <= hi; ++b) space.bin_counts.push_back(b);
  }
  space.scheme_weight = 1.0 / static_cast<double>(space.bin_counts.size());
  return space;
}

}  // namespace calibrax
