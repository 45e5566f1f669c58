#pragma once

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "calibrax/rng.hpp"

namespace calibrax {

// Parameters of the three-parameter curve family
//
//   g(s; alpha, beta, c) = 1 / (1 + s^-alpha * (1 - s)^beta * e^c)
//
// which is the Bayes posterior P(H=1 | s) when the class-conditional
// confidence densities are both beta. alpha, beta >= 0 keeps g
// non-decreasing; (1, 1, 0) is the identity.
struct PriorCurveParams {
  double alpha = 1.0;
  double beta = 1.0;
  double c = 0.0;

  friend bool operator==(const PriorCurveParams&,
                         const PriorCurveParams&) = default;
};

// Evaluates g. Endpoints use the limits: g(0) = 0 when alpha > 0, g(1) = 1
// when beta > 0, otherwise 1 / (1 + e^c).
double g_eval(const PriorCurveParams& params, double s);

// Same as g_eval given precomputed log(s) and log(1 - s). Zero exponents
// contribute nothing even when the matching log is -inf.
inline double g_from_logs(const PriorCurveParams& p, double log_s,
                          double log_1ms) {
  double t = p.c;
  if (p.alpha != 0.0) t -= p.alpha * log_s;
  if (p.beta != 0.0) t += p.beta * log_1ms;
  return 1.0 / (1.0 + std::exp(t));
}

// Shape parameters of a beta density on (0, 1).
struct BetaParams {
  double a1 = 1.0;
  double a2 = 1.0;

  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

void validate(const BetaParams& params);

double beta_pdf(const BetaParams& params, double s);
double beta_mean(const BetaParams& params);
double beta_variance(const BetaParams& params);

// a1 = m^2 (1 - m) / v - m, a2 = a1 (1 - m) / m
BetaParams beta_from_moments(double mean, double variance);

// Method-of-moments fit using the population (divide-by-N) variance.
BetaParams beta_moment_fit(std::span<const double> values);

// Marsaglia-Tsang gamma variate with unit scale. Shapes below one are
// boosted: Gamma(a) = Gamma(a + 1) * U^(1/a).
double gamma_sample(double shape, Rng& rng);

// Beta variate via X / (X + Y) with X ~ Gamma(a1), Y ~ Gamma(a2), computed
// in log space so very small shapes do not underflow. The result is kept
// inside the open interval (0, 1).
double beta_sample(const BetaParams& params, Rng& rng);

enum class Link { kLogit, kLog, kLogflip };

std::string link_name(Link link);
Link parse_link(const std::string& name);

// Forward links map (0,1) onto the real line (or a half-line); the
// endpoints produce +-inf.
double link_forward(Link link, double x);
double link_inverse(Link link, double y);

// inverse_link(intercept + slope * predictor_link(s))
struct GlmCurve {
  Link inverse_link = Link::kLogit;
  double intercept = 0.0;
  double slope = 1.0;
  Link predictor_link = Link::kLogit;
};

// Flat calibration curve; a testing aid.
struct ConstantCurve {
  double value = 0.5;
};

// A known calibration curve together with a beta confidence distribution.
// Always built through make_spec / builtin_spec, which check on a 1001-point
// grid that the curve maps [0, 1] into [0, 1].
class TrueDistributionSpec {
 public:
  using Curve = std::variant<GlmCurve, ConstantCurve>;

  const std::string& name() const noexcept { return name_; }
  const Curve& curve() const noexcept { return curve_; }
  const BetaParams& confidence() const noexcept { return confidence_; }

  friend TrueDistributionSpec make_spec(std::string name, Curve curve,
                                        BetaParams confidence);

 private:
  TrueDistributionSpec(std::string name, Curve curve, BetaParams confidence)
      : name_(std::move(name)), curve_(curve), confidence_(confidence) {}

  std::string name_;
  Curve curve_;
  BetaParams confidence_;
};

TrueDistributionSpec make_spec(std::string name,
                               TrueDistributionSpec::Curve curve,
                               BetaParams confidence);

// D1..D5 benchmark distributions.
TrueDistributionSpec builtin_spec(const std::string& name);
std::vector<std::string> builtin_spec_names();

// Identity curve (logit link, intercept 0, slope 1) with the given xi.
TrueDistributionSpec identity_spec(BetaParams confidence);
TrueDistributionSpec constant_spec(double value, BetaParams confidence);

// True calibration curve value at s.
double link_eval(const TrueDistributionSpec& spec, double s);

}  // namespace calibrax
