#include "calibrax/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "calibrax/error.hpp"

namespace calibrax {

namespace {

constexpr std::size_t kExactLimit = 12;

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> xs,
                                    std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw Error(ErrorCode::kDomain, "wilcoxon: length mismatch");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] != ys[i]) diffs.push_back(xs[i] - ys[i]);
  if (diffs.empty())
    throw Error(ErrorCode::kDegenerate, "wilcoxon: all differences are zero");
  if (diffs.size() < kWilcoxonMinPairs)
    throw Error(ErrorCode::kDegenerate,
                "wilcoxon: insufficient n (need at least 5 nonzero differences)");

  const std::size_t n = diffs.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });

  // Twice the average rank, so tied ranks stay integral.
  std::vector<long> rank2(n);
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[idx[j + 1]]) == std::abs(diffs[idx[i]]))
      ++j;
    const long twice_avg = static_cast<long>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) rank2[idx[k]] = twice_avg;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  long w2 = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0) w2 += rank2[i];

  WilcoxonResult out;
  out.n = n;
  out.w_plus = static_cast<double>(w2) / 2.0;
  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;

  if (n <= kExactLimit) {
    // Null distribution of 2 * W+ by dynamic programming over ranks.
    const long total2 = std::accumulate(rank2.begin(), rank2.end(), 0L);
    std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
    ways[0] = 1.0;
    for (long r : rank2)
      for (long s = total2; s >= r; --s) ways[s] += ways[s - r];
    const long dev = std::abs(2 * w2 - total2);
    double tail = 0.0;
    for (long s = 0; s <= total2; ++s)
      if (std::abs(2 * s - total2) >= dev) tail += ways[s];
    out.exact = true;
    out.p_value = std::min(1.0, tail / std::ldexp(1.0, static_cast<int>(n)));
    return out;
  }

  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  const double dev = std::abs(out.w_plus - mean);
  const double z = std::max(0.0, dev - 0.5) / std::sqrt(var);
  out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

}  // namespace calibrax
