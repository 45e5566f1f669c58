#include "calibrax/data.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "calibrax/error.hpp"
#include "calibrax/rng.hpp"

namespace calibrax {

namespace {

double checked_confidence(double c) {
  if (!std::isfinite(c) || c < -kConfidenceSlack || c > 1.0 + kConfidenceSlack)
    throw Error(ErrorCode::kDomain,
                "confidence " + std::to_string(c) + " outside [0,1]");
  return std::clamp(c, 0.0, 1.0);
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  // strtod accepts the full decimal/exponent grammar; make sure it consumed
  // the whole field.
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && errno != ERANGE;
}

}  // namespace

Dataset::Dataset(std::vector<CalibrationSample> samples)
    : samples_(std::move(samples)) {
  for (auto& s : samples_) {
    s.confidence = checked_confidence(s.confidence);
    if (s.hit != 0 && s.hit != 1)
      throw Error(ErrorCode::kDomain,
                  "hit must be 0 or 1, got " + std::to_string(s.hit));
  }
}

std::vector<double> Dataset::confidences() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.confidence);
  return out;
}

std::size_t Dataset::hit_count() const {
  std::size_t n = 0;
  for (const auto& s : samples_) n += static_cast<std::size_t>(s.hit);
  return n;
}

Dataset parse_pairs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line))
    throw Error(ErrorCode::kParse, "missing header `confidence,hit`");
  ++line_no;
  if (!line.empty() && line.front() == '\xEF') line.erase(0, 3);  // UTF-8 BOM
  if (trim(line) != "confidence,hit")
    throw Error(ErrorCode::kParse,
                "line 1: expected header `confidence,hit`");

  std::vector<CalibrationSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) !=
                                               std::string_view::npos)
      throw Error(ErrorCode::kParse, where + "expected two fields");
    double conf = 0.0;
    if (!parse_double(row.substr(0, comma), conf))
      throw Error(ErrorCode::kParse, where + "bad confidence");
    const auto hit_field = trim(row.substr(comma + 1));
    if (hit_field != "0" && hit_field != "1")
      throw Error(ErrorCode::kParse, where + "hit must be 0 or 1");
    if (!std::isfinite(conf) || conf < -kConfidenceSlack ||
        conf > 1.0 + kConfidenceSlack)
      throw Error(ErrorCode::kParse, where + "confidence outside [0,1]");
    samples.push_back({conf, hit_field == "1" ? 1 : 0});
  }
  if (samples.empty()) throw Error(ErrorCode::kParse, "empty dataset");
  return Dataset(std::move(samples));
}

Dataset load_pairs(const std::filesystem::path& path) {
  return parse_pairs(read_file(path));
}

std::string format_pairs(const Dataset& dataset) {
  std::string out = "confidence,hit\n";
  char buf[64];
  for (const auto& s : dataset) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g,%d\n", s.confidence,
                                s.hit);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

void save_pairs(const Dataset& dataset, const std::filesystem::path& path) {
  write_file_atomic(path, format_pairs(dataset));
}

std::vector<LogitRecord> parse_logits(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<LogitRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, where + e.what());
    }
    if (!obj.is_object() || !obj.contains("logits") || !obj.contains("label") ||
        !obj["logits"].is_array() || !obj["label"].is_number_integer())
      throw Error(ErrorCode::kParse,
                  where + "expected {\"logits\": [...], \"label\": int}");
    LogitRecord rec;
    for (const auto& v : obj["logits"]) {
      if (!v.is_number())
        throw Error(ErrorCode::kParse, where + "non-numeric logit");
      rec.logits.push_back(v.get<double>());
    }
    rec.label = obj["label"].get<int>();
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<LogitRecord> load_logits(const std::filesystem::path& path) {
  return parse_logits(read_file(path));
}

TopClass top_class(std::span<const double> logits, double temperature) {
  if (logits.size() < 2)
    throw Error(ErrorCode::kDomain, "need at least two logits");
  std::size_t arg = 0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (!std::isfinite(logits[k]))
      throw Error(ErrorCode::kDomain, "non-finite logit");
    if (logits[k] > logits[arg]) arg = k;
  }
  const double top = logits[arg] / temperature;
  double denom = 0.0;
  for (double z : logits) denom += std::exp(z / temperature - top);
  return {arg, 1.0 / denom};
}

Dataset ingest_logits(std::span<const LogitRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kDomain, "no logit records");
  std::vector<CalibrationSample> samples;
  samples.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.label < 0 || static_cast<std::size_t>(r.label) >= r.logits.size())
      throw Error(ErrorCode::kDomain,
                  "record " + std::to_string(i) + ": label out of range");
    const auto top = top_class(r.logits);
    samples.push_back(
        {top.probability,
         top.index == static_cast<std::size_t>(r.label) ? 1 : 0});
  }
  return Dataset(std::move(samples));
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorCode::kDomain, "split fraction must be in (0,1)");
  const auto first = static_cast<std::size_t>(std::llround(fraction * n));
  if (n < 2 || first == 0 || first == n)
    throw Error(ErrorCode::kDomain, "split would leave an empty part");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(i + 1)]);

  std::vector<CalibrationSample> a, b;
  a.reserve(first);
  b.reserve(n - first);
  for (std::size_t i = 0; i < n; ++i)
    (i < first ? a : b).push_back(dataset[order[i]]);
  return {Dataset(std::move(a)), Dataset(std::move(b))};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush())
      throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename onto " + path.string());
  }
}

}  // namespace calibrax
