#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/reward.hpp"

namespace trajirl::support {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("trajirl_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// One channel per entry, cell_index order, scaled by FeatureMap.
inline FeatureMap features_of(const GridSpec& spec, const std::vector<std::vector<double>>& channels) {
  return FeatureMap(spec.width(), spec.height(), channels);
}

/// Constant channel plus a deterministic ramp plus a checker pattern.
inline FeatureMap three_channel_features(const GridSpec& spec) {
  std::vector<double> ramp(spec.cells()), checker(spec.cells());
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      ramp[spec.cell_index(x, y)] = 0.3 * x + 0.7 * y + 0.1 * x * y;
      checker[spec.cell_index(x, y)] = ((x + 2 * y) % 3) * 0.5;
    }
  }
  return FeatureMap(spec.width(), spec.height(), {constant_channel(spec), ramp, checker});
}

}  // namespace trajirl::support
