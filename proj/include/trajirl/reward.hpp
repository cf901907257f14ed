#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajirl/grid_world.hpp"

namespace trajirl {

/// Per-cell feature vectors f(s), every component in [0, 1].
class FeatureMap {
 public:
  /// Channels are width*height arrays in cell_index order. Each channel is
  /// min-max scaled to [0, 1]; a constant channel maps to clamp(value, 0, 1).
  FeatureMap(int width, int height, const std::vector<std::vector<double>>& channels,
             std::vector<std::string> names = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t cells() const noexcept { return cells_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::span<const double> at(std::size_t cell) const noexcept {
    return {values_.data() + cell * n_features_, n_features_};
  }
  double value(std::size_t cell, std::size_t k) const noexcept {
    return values_[cell * n_features_ + k];
  }
  std::vector<double> channel(std::size_t k) const;

  /// Concatenation of the channels of two maps over the same grid.
  FeatureMap join(const FeatureMap& other) const;

 private:
  // values already scaled, cell-major
  FeatureMap(int width, int height, std::size_t n_features, std::vector<double> scaled,
             std::vector<std::string> names);

  int width_;
  int height_;
  std::size_t cells_;
  std::size_t n_features_;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

/// Constant channel (all ones).
std::vector<double> constant_channel(const GridSpec& spec);
/// Euclidean distance from each cell centre to the anchor cell, in cells.
std::vector<double> distance_channel(const GridSpec& spec, State anchor);

/// Reward weights; every component finite and strictly negative.
class Theta {
 public:
  explicit Theta(std::vector<double> weights);
  static Theta filled(std::size_t n, double value) {
    return Theta(std::vector<double>(n, value));
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  friend bool operator==(const Theta&, const Theta&) = default;

 private:
  std::vector<double> weights_;
};

/// L_p step-length normalization; empty means a state-only reward. With
/// scale_by_length the reward is multiplied by the step length instead, so
/// cost grows with distance travelled.
struct DistanceNorm {
  std::optional<double> p;
  bool scale_by_length = false;

  static DistanceNorm none() { return {}; }
  static DistanceNorm lp(double p);
  static DistanceNorm path_length(double p);

  double apply(double r, const State& s, const State& s_next) const;
};

/// theta . f(s). Throws DimensionMismatch.
double state_reward(std::size_t cell, const Theta& theta, const FeatureMap& features);
double state_reward(const State& s, const Theta& theta, const FeatureMap& features);

/// (|dx|^p + |dy|^p)^(1/p) in the plane; 1 for a self-transition.
double dist_p(const State& s, const State& s_next, double p);

/// r(s) / dist_p(s, s_next) when a norm is set, r(s) otherwise.
double transition_reward(const State& s, const State& s_next, const Theta& theta,
                         const FeatureMap& features, const DistanceNorm& norm);

/// Transition rewards for every (planar cell, action) pair, cell-major.
std::vector<double> transition_reward_table(const TransitionModel& transitions,
                                            const Theta& theta,
                                            const FeatureMap& features,
                                            const DistanceNorm& norm);

}  // namespace trajirl
