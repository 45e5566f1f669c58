#include "calibrax/calibrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "calibrax/binning.hpp"
#include "calibrax/error.hpp"
#include "calibrax/nelder_mead.hpp"

namespace calibrax {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kPlattClamp = 1e-12;
constexpr double kPlattPenalty = 1e-6;
constexpr double kMaxLogTemperature = 6.907755278982137;  // ln(1000)

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double platt_feature(double s) {
  const double c = std::clamp(s, kPlattClamp, 1.0 - kPlattClamp);
  return std::log(c) - std::log1p(-c);
}

// Piecewise-constant lookup shared by histogram and isotonic maps.
double step_lookup(const std::vector<double>& thresholds,
                   const std::vector<double>& values, double x) {
  const auto k = static_cast<std::size_t>(
      std::upper_bound(thresholds.begin(), thresholds.end(), x) -
      thresholds.begin());
  return values[k];
}

}  // namespace

std::string map_kind_name(MapKind kind) {
  switch (kind) {
    case MapKind::kTpm:
      return "tpm";
    case MapKind::kHistogram:
      return "hb";
    case MapKind::kTemperature:
      return "temp";
    case MapKind::kPlatt:
      return "platt";
    case MapKind::kIsotonic:
      return "isotonic";
  }
  return "?";
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "tpm") return MapKind::kTpm;
  if (name == "hb" || name == "histogram") return MapKind::kHistogram;
  if (name == "temp" || name == "temperature") return MapKind::kTemperature;
  if (name == "platt") return MapKind::kPlatt;
  if (name == "isotonic") return MapKind::kIsotonic;
  throw Error(ErrorCode::kUsage, "unknown calibration method `" + name + "`");
}

MapKind CalibrationMap::kind() const {
  return static_cast<MapKind>(map_.index());
}

double CalibrationMap::operator()(double s) const {
  return std::visit(
      Overloaded{
          [&](const TpmMap& m) { return g_eval(m.params, std::clamp(s, 0.0, 1.0)); },
          [&](const HistogramMap& m) {
            return step_lookup(m.thresholds, m.values, s);
          },
          [&](const TemperatureMap&) -> double {
            throw Error(ErrorCode::kUsage,
                        "temperature scaling needs logits, not confidences");
          },
          [&](const PlattMap& m) {
            return sigmoid(m.w * platt_feature(s) + m.b);
          },
          [&](const IsotonicMap& m) {
            const auto it =
                std::upper_bound(m.starts.begin(), m.starts.end(), s);
            const auto k = it == m.starts.begin()
                               ? std::size_t{0}
                               : static_cast<std::size_t>(it - m.starts.begin()) - 1;
            return m.values[k];
          }},
      map_);
}

double CalibrationMap::apply_logits(std::span<const double> logits) const {
  const auto* t = std::get_if<TemperatureMap>(&map_);
  if (!t)
    throw Error(ErrorCode::kUsage,
                map_kind_name(kind()) + " map applies to confidences");
  return top_class(logits, t->temperature).probability;
}

CalibrationMap fit_tpm(const Dataset& dataset, const EstimatorConfig& config) {
  return TpmMap{estimate_curve(dataset, config).params};
}

CalibrationMap fit_histogram_binning(const Dataset& dataset, std::size_t bins) {
  const auto scheme = equal_mass_bins(dataset, bins);
  HistogramMap m;
  for (std::size_t b = 0; b < scheme.bin_count(); ++b) {
    const auto members = scheme.bin(b);
    std::size_t pos = 0;
    for (std::size_t i : members) pos += static_cast<std::size_t>(dataset[i].hit);
    m.values.push_back(static_cast<double>(pos) /
                       static_cast<double>(members.size()));
    if (b + 1 < scheme.bin_count()) {
      const double upper = dataset[members.back()].confidence;
      const double lower = dataset[scheme.bin(b + 1).front()].confidence;
      m.thresholds.push_back(0.5 * (upper + lower));
    }
  }
  return m;
}

CalibrationMap fit_temperature(std::span<const LogitRecord> records) {
  if (records.size() < 2)
    throw Error(ErrorCode::kDegenerate,
                "temperature scaling needs at least two records");
  for (const auto& r : records) {
    if (r.logits.size() < 2 || r.label < 0 ||
        static_cast<std::size_t>(r.label) >= r.logits.size())
      throw Error(ErrorCode::kDomain, "invalid logit record");
    for (double z : r.logits)
      if (!std::isfinite(z)) throw Error(ErrorCode::kDomain, "non-finite logit");
  }

  auto clamp_log_t = [](double v) {
    return std::clamp(v, -kMaxLogTemperature, kMaxLogTemperature);
  };
  const Objective nll = [&](std::span<const double> x) {
    const double inv_t = std::exp(-clamp_log_t(x[0]));
    double total = 0.0;
    for (const auto& r : records) {
      double top = -std::numeric_limits<double>::infinity();
      for (double z : r.logits) top = std::max(top, z * inv_t);
      double denom = 0.0;
      for (double z : r.logits) denom += std::exp(z * inv_t - top);
      total += top + std::log(denom) - r.logits[r.label] * inv_t;
    }
    return total / static_cast<double>(records.size());
  };
  const auto run = nelder_mead(nll, {0.0}, {2000, 1e-12, 0.5});
  double log_t = clamp_log_t(run.x[0]);
  double best = nll(std::span<const double>(&log_t, 1));
  // Separable or all-wrong data has no finite optimum: the likelihood keeps
  // improving toward a cap, where the simplex may stall on a flat tail.
  bool diverged = std::abs(log_t) >= kMaxLogTemperature - 1e-9;
  for (double cap : {-kMaxLogTemperature, kMaxLogTemperature}) {
    const double v = nll(std::span<const double>(&cap, 1));
    // Ties count: once the likelihood underflows to its bound the flat
    // tail is part of the divergence.
    if (v <= best && log_t != cap) {
      best = v;
      log_t = cap;
      diverged = true;
    }
  }
  return TemperatureMap{std::exp(log_t), diverged};
}

CalibrationMap fit_platt(const Dataset& dataset) {
  const std::size_t pos = dataset.hit_count();
  if (pos == 0 || pos == dataset.size())
    throw Error(ErrorCode::kDegenerate, "platt: need both hits and misses");

  std::vector<double> feature;
  feature.reserve(dataset.size());
  double max_miss = -std::numeric_limits<double>::infinity();
  double min_hit = std::numeric_limits<double>::infinity();
  for (const auto& s : dataset) {
    feature.push_back(platt_feature(s.confidence));
    if (s.hit) min_hit = std::min(min_hit, feature.back());
    else max_miss = std::max(max_miss, feature.back());
  }

  const Objective nll = [&](std::span<const double> x) {
    double total = 0.0;
    for (std::size_t i = 0; i < feature.size(); ++i) {
      const double z = x[0] * feature[i] + x[1];
      // -log sigmoid(z) = softplus(-z); -log(1 - sigmoid(z)) = softplus(z)
      total += dataset[i].hit ? softplus(-z) : softplus(z);
    }
    return total / static_cast<double>(feature.size()) +
           kPlattPenalty * (x[0] * x[0] + x[1] * x[1]);
  };
  const auto run = nelder_mead(nll, {1.0, 0.0}, {4000, 1e-12, 0.1});
  return PlattMap{run.x[0], run.x[1], max_miss < min_hit};
}

CalibrationMap fit_isotonic(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorCode::kDomain, "isotonic: empty dataset");
  struct Block {
    double start;
    double sum;
    double weight;
    double mean() const { return sum / weight; }
  };
  // Equal confidences form one initial block so ties always share a value.
  std::vector<Block> groups;
  for (std::size_t i : sorted_order(dataset)) {
    const auto& s = dataset[i];
    if (!groups.empty() && groups.back().start == s.confidence) {
      groups.back().sum += s.hit;
      groups.back().weight += 1.0;
    } else {
      groups.push_back({s.confidence, static_cast<double>(s.hit), 1.0});
    }
  }
  std::vector<Block> blocks;
  for (const auto& g : groups) {
    blocks.push_back(g);
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const auto last = blocks.back();
      blocks.pop_back();
      blocks.back().sum += last.sum;
      blocks.back().weight += last.weight;
    }
  }
  IsotonicMap m;
  for (const auto& b : blocks) {
    m.starts.push_back(b.start);
    m.values.push_back(b.mean());
  }
  return m;
}

Dataset apply_map(const CalibrationMap& map, const Dataset& dataset) {
  std::vector<CalibrationSample> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset) out.push_back({map(s.confidence), s.hit});
  return Dataset(std::move(out));
}

Dataset apply_map(const CalibrationMap& map,
                  std::span<const LogitRecord> records) {
  if (map.kind() != MapKind::kTemperature) {
    // Confidence maps compose with the plain softmax confidence.
    return apply_map(map, ingest_logits(records));
  }
  if (records.empty()) throw Error(ErrorCode::kDomain, "no logit records");
  const auto& t = std::get<TemperatureMap>(map.variant());
  std::vector<CalibrationSample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.label < 0 || static_cast<std::size_t>(r.label) >= r.logits.size())
      throw Error(ErrorCode::kDomain, "label out of range");
    const auto top = top_class(r.logits, t.temperature);
    out.push_back({top.probability,
                   top.index == static_cast<std::size_t>(r.label) ? 1 : 0});
  }
  return Dataset(std::move(out));
}

}  // namespace calibrax
