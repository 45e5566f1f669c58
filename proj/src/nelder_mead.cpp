#include "calibrax/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "calibrax/error.hpp"

namespace calibrax {

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
  if (x0.empty()) throw Error(ErrorCode::kDomain, "nelder_mead: empty x0");
  if (options.max_iterations < 1 || !(options.tolerance > 0.0) ||
      !(options.x_tolerance > 0.0))
    throw Error(ErrorCode::kDomain, "nelder_mead: invalid options");

  const std::size_t n = x0.size();
  int evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  values[0] = eval(x0);
  if (!std::isfinite(values[0]))
    throw Error(ErrorCode::kDomain, "nelder_mead: objective not finite at x0");
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += options.initial_step * std::max(1.0, std::abs(x0[i]));
    values[i + 1] = eval(simplex[i + 1]);
  }

  std::vector<std::size_t> rank(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto affine = [&](double t, const std::vector<double>& from,
                    std::vector<double>& out) {
    // out = centroid + t * (from - centroid)
    for (std::size_t j = 0; j < n; ++j)
      out[j] = centroid[j] + t * (from[j] - centroid[j]);
  };

  NelderMeadResult result;
  int iter = 0;
  for (;; ++iter) {
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    const std::size_t best = rank.front();
    const std::size_t worst = rank.back();
    const std::size_t second_worst = rank[n - 1];
    const double spread = values[worst] - values[best];
    double size = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(simplex[best][j]));
      for (std::size_t k = 0; k < n + 1; ++k)
        size = std::max(size, std::abs(simplex[k][j] - simplex[best][j]));
    }
    if (spread < options.tolerance && size <= options.x_tolerance * scale) {
      result.converged = true;
      break;
    }
    if (iter >= options.max_iterations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n + 1; ++k) {
      if (k == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[k][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    affine(-1.0, simplex[worst], trial);  // reflection
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      affine(-2.0, simplex[worst], trial2);  // expansion
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    if (f_reflect < values[worst]) {
      affine(-0.5, simplex[worst], trial2);  // outside contraction
      const double f_contract = eval(trial2);
      if (f_contract <= f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_contract;
        continue;
      }
    } else {
      affine(0.5, simplex[worst], trial2);  // inside contraction
      const double f_contract = eval(trial2);
      if (f_contract < values[worst]) {
        simplex[worst] = trial2;
        values[worst] = f_contract;
        continue;
      }
    }
    // Shrink toward the best vertex.
    for (std::size_t k = 0; k < n + 1; ++k) {
      if (k == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        simplex[k][j] = simplex[best][j] + 0.5 * (simplex[k][j] - simplex[best][j]);
      values[k] = eval(simplex[k]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  result.iterations = iter;
  result.evaluations = evaluations;
  return result;
}

}  // namespace calibrax
