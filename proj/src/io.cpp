#include "calibrax/io.hpp"

#include <cmath>
#include <cstdio>
#include <type_traits>

#include "calibrax/data.hpp"
#include "calibrax/error.hpp"

namespace calibrax {

namespace {

Json number_or_null(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json aggregate_to_json(const Aggregate& a) {
  return {{"mean", number_or_null(a.mean)},
          {"std", number_or_null(a.stddev)},
          {"trials", a.trials},
          {"failures", a.failures}};
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::kParse, std::string("missing key `") + key + "`");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kParse, std::string("bad value for `") + key + "`");
  }
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, what + ": " + e.what());
  }
}

}  // namespace

Json curve_to_json(const PriorCurveParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"c", p.c}};
}

Json curve_to_json(const CurveFit& fit) {
  Json j = curve_to_json(fit.params);
  j["diagnostics"] = {{"objective", fit.objective},
                      {"iterations", fit.iterations},
                      {"evaluations", fit.evaluations},
                      {"scheme_counts", fit.scheme_counts},
                      {"fallback_schemes", fit.fallback_schemes}};
  return j;
}

PriorCurveParams curve_from_json(const Json& j) {
  PriorCurveParams p{required<double>(j, "alpha"), required<double>(j, "beta"),
                     required<double>(j, "c")};
  if (!(std::isfinite(p.alpha) && std::isfinite(p.beta) && std::isfinite(p.c)) ||
      p.alpha < 0.0 || p.beta < 0.0)
    throw Error(ErrorCode::kParse,
                "curve parameters must be finite with alpha, beta >= 0");
  return p;
}

PriorCurveParams load_curve(const std::filesystem::path& path) {
  return curve_from_json(parse_json(read_file(path), path.string()));
}

Json spec_to_json(const TrueDistributionSpec& spec) {
  Json curve;
  if (const auto* k = std::get_if<ConstantCurve>(&spec.curve())) {
    curve = {{"constant", k->value}};
  } else {
    const auto& g = std::get<GlmCurve>(spec.curve());
    curve = {{"inverse_link", link_name(g.inverse_link)},
             {"intercept", g.intercept},
             {"slope", g.slope},
             {"predictor_link", link_name(g.predictor_link)}};
  }
  return {{"name", spec.name()},
          {"curve", curve},
          {"confidence",
           {{"a1", spec.confidence().a1}, {"a2", spec.confidence().a2}}}};
}

TrueDistributionSpec spec_from_json(const Json& j) {
  const auto name = j.contains("name") ? required<std::string>(j, "name")
                                       : std::string("custom");
  const auto& curve = j.contains("curve") ? j.at("curve") : Json();
  const auto& conf = j.contains("confidence") ? j.at("confidence") : Json();
  const BetaParams xi{required<double>(conf, "a1"), required<double>(conf, "a2")};
  if (curve.is_object() && curve.contains("constant"))
    return make_spec(name, ConstantCurve{required<double>(curve, "constant")}, xi);
  return make_spec(name,
                   GlmCurve{parse_link(required<std::string>(curve, "inverse_link")),
                            required<double>(curve, "intercept"),
                            required<double>(curve, "slope"),
                            parse_link(required<std::string>(curve, "predictor_link"))},
                   xi);
}

TrueDistributionSpec resolve_spec(const std::string& name_or_path) {
  for (const auto& n : builtin_spec_names())
    if (n == name_or_path) return builtin_spec(n);
  return spec_from_json(parse_json(read_file(name_or_path), name_or_path));
}

Json map_to_json(const CalibrationMap& map) {
  Json j{{"kind", map_kind_name(map.kind())}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TpmMap>) {
          j["params"] = curve_to_json(m.params);
        } else if constexpr (std::is_same_v<T, HistogramMap>) {
          j["thresholds"] = m.thresholds;
          j["values"] = m.values;
        } else if constexpr (std::is_same_v<T, TemperatureMap>) {
          j["temperature"] = m.temperature;
          j["diverged"] = m.diverged;
        } else if constexpr (std::is_same_v<T, PlattMap>) {
          j["w"] = m.w;
          j["b"] = m.b;
          j["separable"] = m.separable;
        } else {
          j["starts"] = m.starts;
          j["values"] = m.values;
        }
      },
      map.variant());
  return j;
}

CalibrationMap map_from_json(const Json& j) {
  switch (parse_map_kind(required<std::string>(j, "kind"))) {
    case MapKind::kTpm:
      return TpmMap{curve_from_json(j.at("params"))};
    case MapKind::kHistogram: {
      HistogramMap m{required<std::vector<double>>(j, "thresholds"),
                     required<std::vector<double>>(j, "values")};
      if (m.values.size() != m.thresholds.size() + 1)
        throw Error(ErrorCode::kParse, "histogram map: size mismatch");
      return m;
    }
    case MapKind::kTemperature: {
      const double t = required<double>(j, "temperature");
      if (!(t > 0.0)) throw Error(ErrorCode::kParse, "temperature must be > 0");
      return TemperatureMap{t, j.value("diverged", false)};
    }
    case MapKind::kPlatt:
      return PlattMap{required<double>(j, "w"), required<double>(j, "b"),
                      j.value("separable", false)};
    case MapKind::kIsotonic: {
      IsotonicMap m{required<std::vector<double>>(j, "starts"),
                    required<std::vector<double>>(j, "values")};
      if (m.values.empty() || m.values.size() != m.starts.size())
        throw Error(ErrorCode::kParse, "isotonic map: size mismatch");
      return m;
    }
  }
  throw Error(ErrorCode::kParse, "unknown map kind");
}

Json report_to_json(const BenchmarkReport& report) {
  const auto& c = report.config;
  Json specs = Json::array();
  for (const auto& s : c.specs) specs.push_back(spec_to_json(s));
  Json config{{"specs", specs},
              {"sizes", c.sizes},
              {"runs", c.runs},
              {"seed", c.seed},
              {"metrics", c.metrics},
              {"bins", c.bins},
              {"p", c.p},
              {"binning", "equal-mass"},
              {"estimator",
               {{"scheme_counts", c.estimator.scheme_counts.empty()
                                      ? Json("auto")
                                      : Json(c.estimator.scheme_counts)},
                {"init", curve_to_json(c.estimator.init)},
                {"max_iterations", c.estimator.max_iterations},
                {"tolerance", c.estimator.tolerance},
                {"restarts", c.estimator.restarts}}},
              {"histogram_bins", {c.histogram_min_bins, c.histogram_max_bins}},
              {"seed_derivation", "splitmix64(base, spec, size, run)"}};

  Json refs = Json::object();
  for (const auto& r : report.references) refs[r.spec] = r.tce;

  Json j{{"schema_version", report.schema_version},
         {"kind", report.kind},
         {"config", config},
         {"tce_reference", refs}};
  Json cells = Json::array();
  if (report.kind == "metrics") {
    for (const auto& m : report.metric_cells) {
      Json cell{{"spec", m.spec}, {"n", m.n}, {"metric", m.metric}};
      cell.update(aggregate_to_json(m.stats));
      cell["gap"] = number_or_null(m.gap);
      cells.push_back(cell);
    }
  } else {
    for (const auto& e : report.ead_cells) {
      Json cell{{"spec", e.spec},
                {"n", e.n},
                {"ours", aggregate_to_json(e.ours)},
                {"histogram", aggregate_to_json(e.histogram)},
                {"p_value", e.test.p_value ? Json(*e.test.p_value) : Json(nullptr)}};
      if (!e.test.flag.empty()) cell["p_flag"] = e.test.flag;
      cells.push_back(cell);
    }
  }
  j["cells"] = cells;
  return j;
}

std::string per_trial_csv(const BenchmarkReport& report) {
  std::string out = "kind,spec,n,run,seed,series,value\n";
  char buf[64];
  auto fmt = [&](double v) -> std::string {
    if (!std::isfinite(v)) return "nan";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  auto spec_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < report.config.specs.size(); ++i)
      if (report.config.specs[i].name() == name) return i;
    return std::size_t{0};
  };
  auto size_index = [&](std::size_t n) {
    for (std::size_t i = 0; i < report.config.sizes.size(); ++i)
      if (report.config.sizes[i] == n) return i;
    return std::size_t{0};
  };
  auto row = [&](const std::string& spec, std::size_t n, std::size_t run,
                 const std::string& series, double v) {
    const auto seed =
        trial_seed(report.config.seed, spec_index(spec), size_index(n), run);
    out += report.kind + "," + spec + "," + std::to_string(n) + "," +
           std::to_string(run) + "," + std::to_string(seed) + "," + series +
           "," + fmt(v) + "\n";
  };
  for (const auto& m : report.metric_cells)
    for (std::size_t r = 0; r < m.values.size(); ++r)
      row(m.spec, m.n, r, m.metric, m.values[r]);
  for (const auto& e : report.ead_cells)
    for (std::size_t r = 0; r < e.ours_values.size(); ++r) {
      row(e.spec, e.n, r, "ours", e.ours_values[r]);
      row(e.spec, e.n, r, "histogram", e.histogram_values[r]);
    }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace calibrax
