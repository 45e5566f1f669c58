#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "calibrax/data.hpp"
#include "calibrax/rng.hpp"

namespace calibrax::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("calibrax_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Dataset make_dataset(
    std::initializer_list<std::pair<double, int>> pairs) {
  std::vector<CalibrationSample> s;
  for (const auto& [c, h] : pairs) s.push_back({c, h});
  return Dataset(std::move(s));
}

// Small random dataset whose confidences come from a coarse grid, so ties
// are common.
inline Dataset random_small_dataset(Rng& rng, std::size_t n, int grid = 10) {
  std::vector<CalibrationSample> s;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(rng.below(grid + 1)) / grid;
    s.push_back({c, static_cast<int>(rng.below(2))});
  }
  return Dataset(std::move(s));
}

}  // namespace calibrax::testing
