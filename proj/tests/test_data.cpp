#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "calibrax/data.hpp"
#include "calibrax/error.hpp"
#include "test_util.hpp"

using namespace calibrax;
using calibrax::testing::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected calibrax::Error");
  return ErrorCode::kUsage;
}

}  // namespace

TEST_CASE("load_pairs keeps rows in order") {
  TempDir dir;
  write(dir / "a.csv", "confidence,hit\n0.9,1\n0.6,0\n");
  const auto d = load_pairs(dir / "a.csv");
  REQUIRE(d.size() == 2);
  CHECK(d[0] == CalibrationSample{0.9, 1});
  CHECK(d[1] == CalibrationSample{0.6, 0});
}

TEST_CASE("load_pairs errors") {
  TempDir dir;
  write(dir / "empty.csv", "confidence,hit\n");
  CHECK_THROWS_WITH_AS(load_pairs(dir / "empty.csv"), "empty dataset", Error);

  write(dir / "bad.csv", "confidence,hit\n1.2,1\n");
  CHECK_THROWS_WITH_AS(load_pairs(dir / "bad.csv"),
                       doctest::Contains("line 2"), Error);

  write(dir / "hit.csv", "confidence,hit\n0.5,1\n0.5,2\n");
  CHECK_THROWS_WITH_AS(load_pairs(dir / "hit.csv"),
                       doctest::Contains("line 3"), Error);

  write(dir / "hdr.csv", "conf,hit\n0.5,1\n");
  CHECK(code_of([&] { load_pairs(dir / "hdr.csv"); }) == ErrorCode::kParse);

  CHECK(code_of([&] { load_pairs(dir / "missing.csv"); }) == ErrorCode::kIo);
}

TEST_CASE("confidence slack is clamped, larger violations rejected") {
  const auto d = calibrax::testing::make_dataset({{1.0 + 1e-13, 1}, {-1e-13, 0}});
  CHECK(d[0].confidence == 1.0);
  CHECK(d[1].confidence == 0.0);
  CHECK_THROWS_AS(calibrax::testing::make_dataset({{1.0 + 1e-9, 1}}), Error);
}

TEST_CASE("ingest_logits softmax confidence and hit") {
  const double e2 = std::exp(2.0), e1 = std::exp(1.0);
  const double expected = e2 / (e2 + e1 + 1.0);
  CHECK(expected == doctest::Approx(0.6652).epsilon(1e-4));

  std::vector<LogitRecord> recs{{{2, 1, 0}, 0}, {{2, 1, 0}, 1}, {{5, 5}, 0}};
  const auto d = ingest_logits(recs);
  CHECK(d[0].confidence == doctest::Approx(expected).epsilon(1e-15));
  CHECK(d[0].hit == 1);
  CHECK(d[1].confidence == doctest::Approx(expected).epsilon(1e-15));
  CHECK(d[1].hit == 0);
  CHECK(d[2].confidence == 0.5);
  CHECK(d[2].hit == 1);  // tie goes to the lowest index

  // Max subtraction keeps huge logits finite.
  std::vector<LogitRecord> big{{{1000, 999}, 0}};
  CHECK(ingest_logits(big)[0].confidence ==
        doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("ingest_logits errors") {
  CHECK_THROWS_AS(ingest_logits({}), Error);
  std::vector<LogitRecord> nan{{{1.0, std::nan("")}, 0}};
  CHECK_THROWS_AS(ingest_logits(nan), Error);
  std::vector<LogitRecord> bad_label{{{1.0, 2.0}, 2}};
  CHECK_THROWS_AS(ingest_logits(bad_label), Error);
}

TEST_CASE("parse_logits reads JSON lines") {
  const auto recs = parse_logits(
      "{\"logits\": [2, 1, 0], \"label\": 0}\n\n{\"logits\": [0.5, 1.5], "
      "\"label\": 1}\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].logits[1] == 1.5);
  CHECK(recs[1].label == 1);
  CHECK_THROWS_WITH_AS(parse_logits("{\"logits\": [1,2]}\n"),
                       doctest::Contains("line 1"), Error);
}

TEST_CASE("ingested logits: round trip, range, accuracy") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng.below(8);
    std::vector<LogitRecord> recs;
    std::size_t correct = 0;
    for (int i = 0; i < 200; ++i) {
      LogitRecord r;
      for (std::size_t j = 0; j < k; ++j) r.logits.push_back(3.0 * rng.normal());
      r.label = static_cast<int>(rng.below(k));
      // Independent argmax pass.
      std::size_t arg = 0;
      for (std::size_t j = 1; j < k; ++j)
        if (r.logits[j] > r.logits[arg]) arg = j;
      correct += arg == static_cast<std::size_t>(r.label);
      recs.push_back(std::move(r));
    }
    const auto d = ingest_logits(recs);
    CHECK(d.hit_count() == correct);
    for (const auto& s : d) {
      CHECK(s.confidence >= 1.0 / static_cast<double>(k) - 1e-15);
      CHECK(s.confidence <= 1.0);
    }
    CHECK(parse_pairs(format_pairs(d)) == d);
  }
}

TEST_CASE("split is seeded, disjoint and complete") {
  std::vector<CalibrationSample> s;
  for (int i = 0; i < 10; ++i) s.push_back({i / 10.0, i % 2});
  const Dataset d(s);
  const auto [a, b] = split(d, 0.5, 7);
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);
  std::multiset<double> all;
  for (const auto& x : a) all.insert(x.confidence);
  for (const auto& x : b) all.insert(x.confidence);
  std::multiset<double> expected;
  for (const auto& x : d) expected.insert(x.confidence);
  CHECK(all == expected);

  const auto [a2, b2] = split(d, 0.5, 7);
  CHECK(format_pairs(a2) == format_pairs(a));
  CHECK(format_pairs(b2) == format_pairs(b));

  const auto [a3, b3] = split(d, 0.5, 8);
  CHECK(format_pairs(a3) != format_pairs(a));

  const auto two = calibrax::testing::make_dataset({{0.1, 0}, {0.2, 1}});
  CHECK_THROWS_AS(split(two, 0.9, 1), Error);
}
