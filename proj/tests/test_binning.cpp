#include <doctest.h>

#include <cmath>
#include <numeric>

#include "calibrax/binning.hpp"
#include "calibrax/error.hpp"
#include "test_util.hpp"

using namespace calibrax;

namespace {

std::vector<std::size_t> sizes_of(const BinningScheme& s) {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < s.bin_count(); ++b) out.push_back(s.bin_size(b));
  return out;
}

Dataset ramp(std::size_t n) {
  std::vector<CalibrationSample> s;
  for (std::size_t i = 0; i < n; ++i)
    s.push_back({static_cast<double>(n - i) / static_cast<double>(n + 1),
                 static_cast<int>(i % 2)});
  return Dataset(std::move(s));
}

}  // namespace

TEST_CASE("equal_mass_bins sizes") {
  CHECK(sizes_of(equal_mass_bins(ramp(4), 2)) == std::vector<std::size_t>{2, 2});
  CHECK(sizes_of(equal_mass_bins(ramp(10), 3)) ==
        std::vector<std::size_t>{4, 3, 3});
  CHECK_THROWS_AS(equal_mass_bins(ramp(3), 5), Error);
  CHECK_THROWS_AS(equal_mass_bins(ramp(3), 0), Error);
}

TEST_CASE("ties are split by original index") {
  const auto d = calibrax::testing::make_dataset(
      {{0.5, 1}, {0.5, 0}, {0.2, 1}, {0.5, 1}});
  const auto s = equal_mass_bins(d, 2);
  CHECK(std::vector<std::size_t>(s.order.begin(), s.order.end()) ==
        std::vector<std::size_t>{2, 0, 1, 3});
}

TEST_CASE("bin_stats") {
  const auto d = calibrax::testing::make_dataset({{0.6, 0}, {0.7, 1}});
  const auto st = bin_stats(d, equal_mass_bins(d, 1));
  REQUIRE(st.size() == 1);
  CHECK(st[0].mean_confidence == doctest::Approx(0.65));
  CHECK(st[0].count == 2);
  CHECK(st[0].positives == 1);
  CHECK(st[0].weight == 1.0);

  const auto all_hit = calibrax::testing::make_dataset({{0.6, 1}, {0.7, 1}, {0.9, 1}});
  for (const auto& b : bin_stats(all_hit, equal_mass_bins(all_hit, 2)))
    CHECK(b.positives == b.count);

  CHECK_THROWS_AS(bin_stats(all_hit, equal_mass_bins(d, 1)), Error);
}

TEST_CASE("partition, monotone means and weight normalization") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(300);
    const auto d = calibrax::testing::random_small_dataset(rng, n, 97);
    const std::size_t b = 1 + rng.below(n);
    for (const auto& scheme : {equal_mass_bins(d, b), equal_width_bins(d, b)}) {
      std::vector<int> seen(n, 0);
      for (std::size_t k = 0; k < scheme.bin_count(); ++k)
        for (std::size_t i : scheme.bin(k)) ++seen[i];
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

      const auto st = bin_stats(d, scheme);
      double w = 0.0;
      for (const auto& x : st) {
        w += x.weight;
        CHECK(x.positives <= x.count);
      }
      CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
      if (scheme.kind == BinningKind::kEqualMass) {
        const auto sz = sizes_of(scheme);
        const auto [lo, hi] = std::minmax_element(sz.begin(), sz.end());
        CHECK(*hi - *lo <= 1);
        for (std::size_t k = 1; k < st.size(); ++k)
          CHECK(st[k].mean_confidence >= st[k - 1].mean_confidence);
      }
    }
  }
}

TEST_CASE("equal_width_bins edges") {
  const auto d = calibrax::testing::make_dataset(
      {{0.0, 0}, {0.49, 0}, {0.5, 1}, {1.0, 1}});
  const auto s = equal_width_bins(d, 2);
  CHECK(sizes_of(s) == std::vector<std::size_t>{2, 2});
  const auto s4 = equal_width_bins(d, 4);
  CHECK(sizes_of(s4) == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(bin_stats(d, equal_width_bins(d, 10)).size() == 4);  // empties skipped
}

TEST_CASE("scheme_space") {
  auto range = [](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> v(hi - lo + 1);
    std::iota(v.begin(), v.end(), lo);
    return v;
  };
  const auto s2000 = scheme_space(2000);
  CHECK(s2000.bin_counts == range(20, 100));
  CHECK(s2000.bin_counts.size() == 81);
  CHECK(s2000.scheme_weight == doctest::Approx(1.0 / 81));
  CHECK_FALSE(s2000.fallback);
  CHECK(scheme_space(500).bin_counts == range(5, 25));
  CHECK(scheme_space(40).bin_counts == range(1, 2));

  const auto small = scheme_space(39);
  CHECK(small.fallback);
  CHECK(small.bin_counts == std::vector<std::size_t>{1});
  CHECK(scheme_space(5).bin_counts == std::vector<std::size_t>{1});

  for (std::size_t n = 40; n < 20000; n += 37) {
    const auto sp = scheme_space(n);
    const long closed = static_cast<long>(n / 20) -
                        static_cast<long>((n + 99) / 100) + 1;
    CHECK(static_cast<long>(sp.bin_counts.size()) == std::max(0L, closed));
  }
}
