#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/reward.hpp"
#include "trajirl/trajectory.hpp"

namespace trajirl::io {

namespace fs = std::filesystem;

/// Reads `traj_id,t,x,y` rows; rows with empty x and y are gap rows. Rows
/// of one trajectory must be contiguous with non-decreasing t. Throws
/// ParseError (with line number) and IoError.
std::vector<Trajectory> read_trajectories(const fs::path& path);
std::vector<Trajectory> parse_trajectories(const std::string& text);

void write_trajectories(const fs::path& path, std::span<const Trajectory> trajectories);
std::string format_trajectories(std::span<const Trajectory> trajectories);

/// Flat `key = value` file; `#` starts a comment. Later keys win.
class KeyValues {
 public:
  static KeyValues read(const fs::path& path);
  static KeyValues parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void merge(const KeyValues& overrides);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const noexcept { return values_; }
  std::string format() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Grid keys: origin_x, origin_y, cell_size (or cell_size_x / cell_size_y),
/// width, height and optional horizon.
GridSpec grid_from_config(const KeyValues& kv);
void grid_to_config(const GridSpec& spec, KeyValues& kv);

/// Raw feature channels from either a flat `x,y,f1,...,fk` CSV (with
/// header) or one `height` x `width` matrix CSV per channel, row r holding
/// y = r. Values are returned unscaled, cell_index order.
struct RasterChannels {
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;
};
RasterChannels read_feature_csv(const fs::path& path, const GridSpec& spec);
void write_feature_csv(const fs::path& path, const GridSpec& spec, const RasterChannels& raster);

/// Feature map per config: optional constant channel (feature_constant,
/// default on), distance to feature_anchor_x/_y (feature_distance, default
/// on; anchor defaults to the centre cell) and the channels of
/// feature_file, resolved against base_dir.
FeatureMap features_from_config(const KeyValues& kv, const GridSpec& spec,
                                const fs::path& base_dir);

/// One value per cell as a `height` x `width` matrix, row r holding y = r.
void write_grid_csv(const fs::path& path, const GridSpec& spec, std::span<const double> values);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

/// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace trajirl::io
