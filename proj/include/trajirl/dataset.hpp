#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/io.hpp"
#include "trajirl/reward.hpp"
#include "trajirl/trajectory.hpp"

namespace trajirl {

struct Dataset {
  std::vector<Trajectory> train;
  std::vector<Trajectory> test;
};

/// Reads a trajectory CSV and checks every trajectory: at least two rows
/// (TooShort) and every known fix inside the grid (OutOfBounds naming the
/// trajectory). With n_test set, a seeded shuffle picks the test
/// trajectories; both parts keep file order. Without it everything is
/// training data.
Dataset load_dataset(const std::filesystem::path& path, const GridSpec& spec,
                     std::optional<std::size_t> n_test = std::nullopt, std::uint64_t seed = 0);

void check_trajectories(const std::vector<Trajectory>& trajectories, const GridSpec& spec);

/// Projected grid paths of fully observed trajectories. Paths that collapse
/// to a single cell are dropped.
std::vector<std::vector<State>> project_all(const std::vector<Trajectory>& trajectories,
                                            const GridSpec& spec,
                                            const ProjectionOptions& options = {});

struct GapMaskEntry {
  std::string traj_id;
  std::size_t start = 0;
  std::size_t length = 0;
  friend bool operator==(const GapMaskEntry&, const GapMaskEntry&) = default;
};

/// Blanks rows [start, start + length). Throws TooShort unless the
/// segment leaves both endpoints in place.
Trajectory mask_segment(const Trajectory& trajectory, std::size_t start, std::size_t length);

struct MaskPlan {
  /// Fraction of each trajectory's rows to remove (rounded), unless
  /// `length` fixes the count.
  double fraction = 0.3;
  std::optional<std::size_t> length;
  std::uint64_t seed = 0;
};

struct MaskedSet {
  std::vector<Trajectory> trajectories;
  std::vector<GapMaskEntry> mask;
};

/// One contiguous interior gap per trajectory at a seeded position.
MaskedSet mask_gaps(const std::vector<Trajectory>& trajectories, const MaskPlan& plan);

std::string format_mask(const std::vector<GapMaskEntry>& mask);

/// n evenly spaced interior points of the segment a-b. Throws
/// InvalidArgument for n < 1.
std::vector<Point2> linear_interpolation(Point2 a, Point2 b, int n);

/// Fills every gap row on the straight line between its anchors.
Trajectory fill_linear(const Trajectory& trajectory);

struct LabeledTrack {
  std::string label;
  std::vector<Point2> points;
};

/// SVG with one polyline per track (known points only) and a legend.
/// Colours follow a fixed order. Throws InvalidArgument for no tracks.
std::string render_plot(const std::vector<LabeledTrack>& tracks, const std::string& title = {});
void emit_plot(const std::vector<LabeledTrack>& tracks, const std::filesystem::path& path,
               const std::string& title = {});

struct SynthConfig {
  GridSpec spec = GridSpec::unit(32, 32);
  std::size_t n_train = 43;
  std::size_t n_test = 10;
  std::uint64_t seed = 1;
  /// Gaussian obstacles in the "terrain" channel.
  int blobs = 7;
  /// Weights for (constant, distance, terrain).
  std::vector<double> true_theta{-0.3, -0.05, -4.0};
  /// Minimum Chebyshev distance between start and goal; 0 picks half the
  /// larger grid side.
  int min_separation = 0;
  double p = 2.0;
  /// Step cost proportional to the step's length (true) or divided by it.
  bool scale_by_length = true;
};

struct SynthDataset {
  GridSpec spec;
  io::RasterChannels raster;
  FeatureMap features;
  Theta true_theta;
  std::vector<Trajectory> train;
  std::vector<Trajectory> test;
  io::KeyValues config;
};

/// Plans toward random goals under the true weights (hard-max backup, step
/// length from the p norm) and samples policy rollouts from random starts. Self-transitions
/// are dropped, so consecutive rows are 8-adjacent distinct cells.
SynthDataset synthesize_dataset(const SynthConfig& config);

/// train.csv, test.csv, features.csv and config.txt under dir.
void write_dataset(const SynthDataset& dataset, const std::filesystem::path& dir);

}  // namespace trajirl
