#include "calibrax/prior_curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "calibrax/error.hpp"

namespace calibrax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGridSlack = 1e-12;
constexpr int kGridPoints = 1001;

double curve_value(const TrueDistributionSpec::Curve& curve, double s) {
  if (const auto* k = std::get_if<ConstantCurve>(&curve)) return k->value;
  const auto& glm = std::get<GlmCurve>(curve);
  // link^-1(link(s)) is s; skip the round trip so identity curves are exact.
  if (glm.intercept == 0.0 && glm.slope == 1.0 &&
      glm.inverse_link == glm.predictor_link)
    return s;
  const double x = link_forward(glm.predictor_link, s);
  // 0 * inf is taken as 0: a zero slope ignores the predictor entirely.
  const double eta =
      glm.intercept + (glm.slope == 0.0 ? 0.0 : glm.slope * x);
  return link_inverse(glm.inverse_link, eta);
}

}  // namespace

double g_eval(const PriorCurveParams& params, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw Error(ErrorCode::kDomain, "g_eval: s outside [0,1]");
  // The identity member of the family, exact rather than up to rounding.
  if (params == PriorCurveParams{1.0, 1.0, 0.0}) return s;
  return g_from_logs(params, std::log(s), std::log1p(-s));
}

void validate(const BetaParams& p) {
  if (!(std::isfinite(p.a1) && std::isfinite(p.a2) && p.a1 > 0 && p.a2 > 0))
    throw Error(ErrorCode::kDomain, "beta parameters must be positive");
}

double beta_pdf(const BetaParams& p, double s) {
  validate(p);
  if (!(s >= 0.0 && s <= 1.0))
    throw Error(ErrorCode::kDomain, "beta_pdf: s outside [0,1]");
  if ((s == 0.0 && p.a1 < 1.0) || (s == 1.0 && p.a2 < 1.0))
    throw Error(ErrorCode::kDomain, "beta_pdf: density diverges at endpoint");
  const double log_norm =
      std::lgamma(p.a1 + p.a2) - std::lgamma(p.a1) - std::lgamma(p.a2);
  double log_kernel = log_norm;
  if (p.a1 != 1.0) log_kernel += (p.a1 - 1.0) * std::log(s);
  if (p.a2 != 1.0) log_kernel += (p.a2 - 1.0) * std::log1p(-s);
  return std::exp(log_kernel);
}

double beta_mean(const BetaParams& p) { return p.a1 / (p.a1 + p.a2); }

double beta_variance(const BetaParams& p) {
  const double t = p.a1 + p.a2;
  return p.a1 * p.a2 / (t * t * (t + 1.0));
}

BetaParams beta_moment_fit(std::span<const double> values) {
  if (values.size() < 2)
    throw Error(ErrorCode::kDegenerate,
                "moment fit degenerate: need at least two values");
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  // Rounding in the mean can leave a tiny positive variance for identical
  // values; catch that case exactly.
  if (std::all_of(values.begin(), values.end(),
                  [&](double v) { return v == values.front(); }))
    throw Error(ErrorCode::kDegenerate, "moment fit degenerate: zero variance");
  double var = 0.0;
  for (double v : values) var += (v - m) * (v - m);
  var /= static_cast<double>(values.size());
  return beta_from_moments(m, var);
}

BetaParams beta_from_moments(double m, double var) {
  if (!(var > 0.0) || !(m > 0.0 && m < 1.0))
    throw Error(ErrorCode::kDegenerate,
                "moment fit degenerate: zero variance or mean at a bound");
  const double a1 = m * m * (1.0 - m) / var - m;
  const double a2 = a1 * (1.0 - m) / m;
  if (!(a1 > 0.0 && a2 > 0.0) || !std::isfinite(a1) || !std::isfinite(a2))
    throw Error(ErrorCode::kDegenerate,
                "moment fit degenerate: non-positive shape");
  return {a1, a2};
}

namespace {

// log of a Gamma(shape, 1) variate. Working in logs lets the shape < 1
// boost (multiplying by U^(1/a)) go far below the smallest double.
double log_gamma_sample(double shape, Rng& rng) {
  double log_boost = 0.0;
  if (shape < 1.0) {
    log_boost = std::log(rng.uniform_open()) / shape;
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return std::log(d) + std::log(v) + log_boost;
  }
}

}  // namespace

double gamma_sample(double shape, Rng& rng) {
  if (!(shape > 0.0 && std::isfinite(shape)))
    throw Error(ErrorCode::kDomain, "gamma shape must be positive");
  return std::exp(log_gamma_sample(shape, rng));
}

double beta_sample(const BetaParams& params, Rng& rng) {
  validate(params);
  const double lx = log_gamma_sample(params.a1, rng);
  const double ly = log_gamma_sample(params.a2, rng);
  // X / (X + Y) = 1 / (1 + exp(ly - lx))
  const double s = 1.0 / (1.0 + std::exp(ly - lx));
  constexpr double kTop = 1.0 - 0x1.0p-53;
  constexpr double kBottom = std::numeric_limits<double>::min();
  return std::clamp(s, kBottom, kTop);
}

std::string link_name(Link link) {
  switch (link) {
    case Link::kLogit:
      return "logit";
    case Link::kLog:
      return "log";
    case Link::kLogflip:
      return "logflip";
  }
  return "?";
}

Link parse_link(const std::string& name) {
  if (name == "logit") return Link::kLogit;
  if (name == "log") return Link::kLog;
  if (name == "logflip") return Link::kLogflip;
  throw Error(ErrorCode::kParse, "unknown link `" + name + "`");
}

double link_forward(Link link, double x) {
  switch (link) {
    case Link::kLogit:
      if (x <= 0.0) return -kInf;
      if (x >= 1.0) return kInf;
      return std::log(x) - std::log1p(-x);
    case Link::kLog:
      return std::log(x);
    case Link::kLogflip:
      return std::log1p(-x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double link_inverse(Link link, double y) {
  switch (link) {
    case Link::kLogit:
      return y >= 0.0 ? 1.0 / (1.0 + std::exp(-y))
                      : std::exp(y) / (1.0 + std::exp(y));
    case Link::kLog:
      return std::exp(y);
    case Link::kLogflip:
      return -std::expm1(y);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

TrueDistributionSpec make_spec(std::string name,
                               TrueDistributionSpec::Curve curve,
                               BetaParams confidence) {
  validate(confidence);
  if (const auto* k = std::get_if<ConstantCurve>(&curve)) {
    if (!(k->value >= 0.0 && k->value <= 1.0))
      throw Error(ErrorCode::kDomain, "constant curve outside [0,1]");
  } else {
    const auto& glm = std::get<GlmCurve>(curve);
    if (!std::isfinite(glm.intercept) || !std::isfinite(glm.slope))
      throw Error(ErrorCode::kDomain, "GLM coefficients must be finite");
  }
  for (int i = 0; i < kGridPoints; ++i) {
    const double s = static_cast<double>(i) / (kGridPoints - 1);
    const double v = curve_value(curve, s);
    if (!(v >= -kGridSlack && v <= 1.0 + kGridSlack))
      throw Error(ErrorCode::kDomain,
                  "spec `" + name + "`: curve leaves [0,1] at s=" +
                      std::to_string(s));
  }
  return TrueDistributionSpec(std::move(name), curve, confidence);
}

double link_eval(const TrueDistributionSpec& spec, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw Error(ErrorCode::kDomain, "link_eval: s outside [0,1]");
  return std::clamp(curve_value(spec.curve(), s), 0.0, 1.0);
}

TrueDistributionSpec builtin_spec(const std::string& name) {
  using L = Link;
  if (name == "D1")
    return make_spec(name, GlmCurve{L::kLogit, -0.88, 0.49, L::kLogit},
                     {2.77, 0.04});
  if (name == "D2")
    return make_spec(name, GlmCurve{L::kLogflip, -0.12, 0.58, L::kLogflip},
                     {2.17, 0.03});
  if (name == "D3")
    return make_spec(name, GlmCurve{L::kLog, -0.03, 1.27, L::kLog},
                     {1.12, 0.11});
  if (name == "D4")
    return make_spec(name, GlmCurve{L::kLogit, -0.77, -0.80, L::kLogflip},
                     {1.13, 0.20});
  if (name == "D5")
    return make_spec(name, GlmCurve{L::kLogit, -0.97, 0.34, L::kLogit},
                     {1.19, 0.22});
  throw Error(ErrorCode::kDomain, "unknown built-in distribution `" + name +
                                      "` (expected D1..D5)");
}

std::vector<std::string> builtin_spec_names() {
  return {"D1", "D2", "D3", "D4", "D5"};
}

TrueDistributionSpec identity_spec(BetaParams confidence) {
  return make_spec("identity", GlmCurve{Link::kLogit, 0.0, 1.0, Link::kLogit},
                   confidence);
}

TrueDistributionSpec constant_spec(double value, BetaParams confidence) {
  return make_spec("constant", ConstantCurve{value}, confidence);
}

}  // namespace calibrax
