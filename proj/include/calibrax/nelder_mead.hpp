#pragma once

#include <functional>
#include <span>
#include <vector>

namespace calibrax {

struct NelderMeadOptions {
  int max_iterations = 2000;
  // Stop once max f - min f over the simplex drops below this and the
  // simplex has collapsed to x_tolerance * max(1, |x_best|) (max norm). The
  // size check keeps a symmetric simplex straddling the minimum, whose
  // vertices tie in value, from passing as converged.
  double tolerance = 1e-8;
  // Initial simplex edge along coordinate i: step * max(1, |x0_i|).
  double initial_step = 0.1;
  double x_tolerance = 1e-6;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Downhill simplex with the standard coefficients (reflection 1, expansion
// 2, contraction 0.5, shrink 0.5). Non-finite objective values rank as +inf.
// Throws if f(x0) is not finite.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace calibrax
