#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajirl/generator.hpp"
#include "trajirl/io.hpp"
#include "trajirl/irl.hpp"
#include "trajirl/metrics.hpp"
#include "trajirl/planner.hpp"
#include "trajirl/trajectory.hpp"

namespace trajirl {

enum class Method {
  linear,          // straight-line fill, no learning
  planar,          // 2D grid
  time_augmented,  // 3D grid, horizon from the gap or demonstration
};

struct Variant {
  Method method = Method::planar;
  DistanceNorm norm;
  std::optional<GaussianKernel> kernel;
  Backup backup = Backup::hard_max;
  PolicyRule rule = PolicyRule::q_only;

  static Variant linear();
  /// Softmax-correction backup, exp(Q - V) policy, no distance modifier.
  static Variant baseline_2d();
  static Variant baseline_3d();
  /// Hard max, exp(Q) policy, l_p distance modifier, optional blur.
  static Variant proposed(double p, bool conv, int radius = 1, double sigma = 1.0);

  std::string label() const;
};

/// Everything the CLI pipeline reads from a config file and flags.
struct ExperimentConfig {
  Variant variant = Variant::proposed(2.0, false);
  double learning_rate = 0.01;
  int max_epochs = 100;
  double grad_tol = 1e-4;
  double tol = 1e-6;
  int max_iters = 0;
  GenerationSettings generation;
  double gap_fraction = 0.3;
  std::optional<std::size_t> gap_length;
  std::uint64_t seed = 0;
  /// MHD in raw coordinates instead of cell units.
  bool raw_units = false;
  /// MHD over whole trajectories instead of the gap segment.
  bool whole_trajectory = false;

  /// Keys: method (linear | 2d | 3d | proposed), p, conv, kernel_radius,
  /// kernel_sigma, backup, policy, learning_rate, max_epochs, grad_tol, tol,
  /// max_iters, mode (det | sto), retries, budget_factor, seed,
  /// gap_fraction, gap_length, mhd_units (cells | raw), mhd_segment
  /// (gap | whole). Preset values of a method are overridden by explicit
  /// backup, policy and p keys.
  static ExperimentConfig from(const io::KeyValues& kv);
};

PlannerConfig planner_config(const ExperimentConfig& config);
TrainConfig train_config(const ExperimentConfig& config);

/// Learns weights for the configured variant from fully observed
/// trajectories. Linear has nothing to learn and returns an empty report.
std::pair<Theta, TrainReport> train_variant(const GridSpec& spec, const FeatureMap& features,
                                            const std::vector<Trajectory>& trajectories,
                                            const ExperimentConfig& config);

struct InterpolationResult {
  Trajectory trajectory;
  /// Gaps filled by a generated path that did not reach the closing anchor
  /// and was bridged.
  int unreached = 0;
};

/// Fills every gap of one trajectory. Each gap is planned toward its
/// closing anchor (on a horizon of the gap's step count in 3D) and filled
/// by the configured rollout; gaps whose rollout misses the anchor are
/// bridged to it with a grid line. `index` selects the random stream.
InterpolationResult interpolate_trajectory(const Trajectory& trajectory, const GridSpec& spec,
                                           const FeatureMap& features, const Theta& theta,
                                           const ExperimentConfig& config, std::size_t index);

std::vector<InterpolationResult> interpolate_all(const std::vector<Trajectory>& trajectories,
                                                 const GridSpec& spec, const FeatureMap& features,
                                                 const Theta& theta,
                                                 const ExperimentConfig& config);

/// Points with t in [first, last], optionally converted to cell units.
std::vector<Point2> segment_points(const Trajectory& trajectory, std::int64_t first,
                                   std::int64_t last, const GridSpec& spec, bool raw_units);

/// MHD between ground truth and predictions, matched by trajectory id.
/// The segment compared is the time range of each masked gap including
/// its anchors, or the whole trajectory.
MhdSummary evaluate_predictions(const std::vector<Trajectory>& ground_truth,
                                const std::vector<Trajectory>& masked,
                                const std::vector<Trajectory>& predicted, const GridSpec& spec,
                                bool raw_units, bool whole_trajectory);

std::string format_theta(const Theta& theta);
Theta parse_theta(const std::string& text);
/// Per-epoch gradient norm, unconverged passes and weights.
std::string format_report(const TrainReport& report);
/// Per-epoch wall times, kept apart from the reproducible report.
std::string format_timing(const TrainReport& report);

struct BenchOptions {
  int width = 64;
  int height = 64;
  int horizon = 16;
  int repetitions = 5;
  /// Training demonstrations per gradient evaluation in the update timing.
  int demos = 4;
  std::uint64_t seed = 0;
  bool traces = false;
};

struct BenchRow {
  std::string method;
  Variant variant;
  double mhd_det = std::nan("");
  double mhd_sto = std::nan("");
  double vi_pass_seconds = 0.0;
  double vi_sweep_seconds = 0.0;
  int sweeps = 0;
  double vi_ratio = 0.0;
  double update_seconds = 0.0;
  double update_ratio = 0.0;
  std::vector<double> sweep_trace;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// Table-shaped CSV: method, mhd_det, mhd_sto, vi_time, ratio,
  /// update_time, ratio.
  std::string table_csv() const;
  /// Per-sweep and per-pass timings with sweep counts.
  std::string detail_csv() const;
  std::string trace_csv() const;
};

/// Times one backward pass and one gradient evaluation per variant on a
/// uniform random feature map, median of `repetitions` runs after a
/// warm-up. Variants run one after another. Ratios are relative to the
/// proposed p=2 row without blur.
BenchResult run_benchmark(const BenchOptions& options, std::vector<Variant> variants = {});

/// 2D baseline, 3D baseline, proposed p in {2, 3} with and without blur.
std::vector<Variant> table_variants();

}  // namespace trajirl
