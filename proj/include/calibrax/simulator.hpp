#pragma once

#include <cstddef>
#include <cstdint>

#include "calibrax/data.hpp"
#include "calibrax/prior_curve.hpp"

namespace calibrax {

struct SimulationRequest {
  TrueDistributionSpec spec;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

// Draws n samples from the binomial process behind `spec`: for each sample
// a confidence from the beta distribution, then a hit with probability
// curve(confidence). One generator is consumed in that fixed order.
Dataset simulate(const SimulationRequest& request);

}  // namespace calibrax
