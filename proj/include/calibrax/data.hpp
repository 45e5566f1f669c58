#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace calibrax {

// One observation: the top-class confidence and whether the prediction hit.
struct CalibrationSample {
  double confidence = 0.0;
  int hit = 0;

  friend bool operator==(const CalibrationSample&,
                         const CalibrationSample&) = default;
};

// Confidences this far outside [0, 1] are treated as float noise and clamped.
inline constexpr double kConfidenceSlack = 1e-12;

// Immutable, insertion-ordered collection of samples. Construction validates
// every sample; confidences within kConfidenceSlack of [0, 1] are clamped.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<CalibrationSample> samples);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  const CalibrationSample& operator[](std::size_t i) const {
    return samples_[i];
  }
  std::span<const CalibrationSample> samples() const noexcept {
    return samples_;
  }
  auto begin() const noexcept { return samples_.begin(); }
  auto end() const noexcept { return samples_.end(); }

  std::vector<double> confidences() const;
  std::size_t hit_count() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<CalibrationSample> samples_;
};

// Raw classifier output for one example.
struct LogitRecord {
  std::vector<double> logits;
  int label = 0;
};

// Pairs CSV: header `confidence,hit`, one sample per row.
Dataset load_pairs(const std::filesystem::path& path);
Dataset parse_pairs(const std::string& text);
std::string format_pairs(const Dataset& dataset);
void save_pairs(const Dataset& dataset, const std::filesystem::path& path);

// Logits JSONL: one {"logits": [...], "label": k} object per line.
std::vector<LogitRecord> load_logits(const std::filesystem::path& path);
std::vector<LogitRecord> parse_logits(const std::string& text);

struct TopClass {
  std::size_t index = 0;   // argmax, lowest index on ties
  double probability = 0;  // max softmax probability
};

// Max-subtracted softmax of `logits` scaled by 1/temperature.
TopClass top_class(std::span<const double> logits, double temperature = 1.0);

Dataset ingest_logits(std::span<const LogitRecord> records);

// Seeded shuffle then split into (round(fraction*N), rest).
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  std::uint64_t seed);

// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace calibrax
