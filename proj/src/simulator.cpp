#include "calibrax/simulator.hpp"

#include <vector>

#include "calibrax/error.hpp"
#include "calibrax/rng.hpp"

namespace calibrax {

Dataset simulate(const SimulationRequest& request) {
  if (request.n < 1) throw Error(ErrorCode::kDomain, "simulate: n must be >= 1");
  Rng rng(request.seed);
  std::vector<CalibrationSample> samples;
  samples.reserve(request.n);
  for (std::size_t i = 0; i < request.n; ++i) {
    const double s = beta_sample(request.spec.confidence(), rng);
    const double p = link_eval(request.spec, s);
    samples.push_back({s, rng.bernoulli(p)});
  }
  return Dataset(std::move(samples));
}

}  // namespace calibrax
