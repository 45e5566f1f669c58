#include <doctest.h>

#include <cmath>

#include "calibrax/data.hpp"
#include "calibrax/metrics.hpp"
#include "calibrax/simulator.hpp"

using namespace calibrax;

TEST_CASE("constant curve 1 gives all hits") {
  const auto d = simulate({constant_spec(1.0, {2, 2}), 1000, 5});
  CHECK(d.hit_count() == 1000);
  const auto z = simulate({constant_spec(0.0, {2, 2}), 1000, 5});
  CHECK(z.hit_count() == 0);
}

TEST_CASE("D1 hit rate matches the expected curve value") {
  const auto spec = builtin_spec("D1");
  const std::size_t n = 100000;
  const auto d = simulate({spec, n, 3});
  // E[curve(S)] and E[curve(S)(1 - curve(S))] under xi by quadrature. The
  // substitution u = (1 - s)^a2 on the upper half removes the density's
  // endpoint singularity.
  const auto [a1, a2] = spec.confidence();
  const double log_norm = std::lgamma(a1 + a2) - std::lgamma(a1) - std::lgamma(a2);
  auto moments = [&](auto f) {
    const int points = 200000;
    double lower = 0.0, upper = 0.0;
    const double h = 0.5 / points;
    for (int i = 0; i < points; ++i) {
      const double s = (i + 0.5) * h;
      lower += f(s) * std::exp(log_norm + (a1 - 1) * std::log(s) +
                               (a2 - 1) * std::log1p(-s));
    }
    const double top = std::pow(0.5, a2);
    const double hu = top / points;
    for (int i = 0; i < points; ++i) {
      const double u = (i + 0.5) * hu;
      const double s = 1.0 - std::pow(u, 1.0 / a2);
      upper += f(s) * std::exp(log_norm + (a1 - 1) * std::log(s)) / a2;
    }
    return lower * h + upper * hu;
  };
  const double mean = moments([&](double s) { return link_eval(spec, s); });
  const double var = moments([&](double s) {
    const double p = link_eval(spec, s);
    return p * (1 - p);
  });
  const double rate = static_cast<double>(d.hit_count()) / n;
  // Total variance of a hit is mean (1 - mean) >= the averaged var; use it.
  CHECK(std::abs(rate - mean) <= 3.0 * std::sqrt(mean * (1 - mean) / n));
  CHECK(var <= mean * (1 - mean));
}

TEST_CASE("simulate is deterministic and seed sensitive") {
  const SimulationRequest req{builtin_spec("D2"), 500, 42};
  CHECK(format_pairs(simulate(req)) == format_pairs(simulate(req)));
  const SimulationRequest other{builtin_spec("D2"), 500, 43};
  CHECK_FALSE(simulate(req) == simulate(other));
}

TEST_CASE("confidence marginal matches the beta moments") {
  const BetaParams xi{1.12, 0.11};
  const auto d = simulate({builtin_spec("D3"), 100000, 8});
  double m = 0, m2 = 0;
  for (const auto& s : d) {
    m += s.confidence;
    m2 += s.confidence * s.confidence;
  }
  const double n = static_cast<double>(d.size());
  m /= n;
  const double v = m2 / n - m * m;
  const double mu = beta_mean(xi), var = beta_variance(xi);
  CHECK(std::abs(m - mu) <= 4.0 * std::sqrt(var / n));
  // Var of the sample variance ~ (mu4 - var^2) / n; bound mu4 <= var.
  CHECK(std::abs(v - var) <= 4.0 * std::sqrt(var / n));
}

TEST_CASE("hit rate within confidence bands follows the curve") {
  const auto spec = builtin_spec("D3");
  const auto d = simulate({spec, 200000, 19});
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double hits = 0, count = 0, curve_sum = 0;
    for (const auto& s : d) {
      if (s.confidence >= q && s.confidence < q + 0.02) {
        hits += s.hit;
        count += 1;
        curve_sum += link_eval(spec, s.confidence);
      }
    }
    REQUIRE(count > 100);
    const double expect = curve_sum / count;
    CHECK(std::abs(hits / count - expect) <=
          3.0 * std::sqrt(expect * (1 - expect) / count));
  }
}

TEST_CASE("simulate rejects n = 0") {
  CHECK_THROWS(simulate({builtin_spec("D1"), 0, 1}));
}
