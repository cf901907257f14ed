#include "trajirl/reward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "trajirl/error.hpp"

namespace trajirl {

FeatureMap::FeatureMap(int width, int height,
                       const std::vector<std::vector<double>>& channels,
                       std::vector<std::string> names)
    : width_(width),
      height_(height),
      cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)),
      n_features_(channels.size()),
      names_(std::move(names)) {
  if (width < 1 || height < 1) throw InvalidArgument("feature map needs a positive extent");
  if (channels.empty()) throw InvalidArgument("feature map needs at least one channel");
  if (names_.empty()) {
    for (std::size_t k = 0; k < channels.size(); ++k) names_.push_back("f" + std::to_string(k));
  }
  if (names_.size() != channels.size()) {
    throw DimensionMismatch("feature names and channels differ in count");
  }
  values_.resize(cells_ * n_features_);
  for (std::size_t k = 0; k < n_features_; ++k) {
    const auto& ch = channels[k];
    if (ch.size() != cells_) {
      throw DimensionMismatch("feature channel " + names_[k] + " has " +
                              std::to_string(ch.size()) + " cells, expected " +
                              std::to_string(cells_));
    }
    if (!std::all_of(ch.begin(), ch.end(), [](double v) { return std::isfinite(v); })) {
      throw NonFinite("feature channel " + names_[k] + " has a non-finite value");
    }
    const auto [lo, hi] = std::minmax_element(ch.begin(), ch.end());
    const double range = *hi - *lo;
    for (std::size_t c = 0; c < cells_; ++c) {
      values_[c * n_features_ + k] =
          range > 0.0 ? (ch[c] - *lo) / range : std::clamp(*lo, 0.0, 1.0);
    }
  }
}

FeatureMap::FeatureMap(int width, int height, std::size_t n_features,
                       std::vector<double> scaled, std::vector<std::string> names)
    : width_(width),
      height_(height),
      cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)),
      n_features_(n_features),
      values_(std::move(scaled)),
      names_(std::move(names)) {}

std::vector<double> FeatureMap::channel(std::size_t k) const {
  std::vector<double> out(cells_);
  for (std::size_t c = 0; c < cells_; ++c) out[c] = value(c, k);
  return out;
}

FeatureMap FeatureMap::join(const FeatureMap& other) const {
  if (other.width_ != width_ || other.height_ != height_) {
    throw DimensionMismatch("feature maps cover different grids");
  }
  std::vector<std::vector<double>> channels;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n_features_; ++k) {
    channels.push_back(channel(k));
    names.push_back(names_[k]);
  }
  for (std::size_t k = 0; k < other.n_features_; ++k) {
    channels.push_back(other.channel(k));
    names.push_back(other.names_[k]);
  }
  std::vector<double> values(cells_ * channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    for (std::size_t c = 0; c < cells_; ++c) values[c * channels.size() + k] = channels[k][c];
  }
  return FeatureMap(width_, height_, channels.size(), std::move(values), std::move(names));
}

std::vector<double> constant_channel(const GridSpec& spec) {
  return std::vector<double>(spec.cells(), 1.0);
}

std::vector<double> distance_channel(const GridSpec& spec, State anchor) {
  std::vector<double> out(spec.cells());
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      out[spec.cell_index(x, y)] = std::hypot(x - anchor.x, y - anchor.y);
    }
  }
  return out;
}

Theta::Theta(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgument("theta needs at least one weight");
  for (double w : weights_) {
    if (!std::isfinite(w)) throw NonFinite("theta component is not finite");
    if (!(w < 0.0)) throw InvalidArgument("theta components must be strictly negative");
  }
}

DistanceNorm DistanceNorm::lp(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("L_p norm needs finite p >= 1");
  return DistanceNorm{p, false};
}

DistanceNorm DistanceNorm::path_length(double p) {
  DistanceNorm n = lp(p);
  n.scale_by_length = true;
  return n;
}

double DistanceNorm::apply(double r, const State& s, const State& s_next) const {
  if (!p) return r;
  const double d = dist_p(s, s_next, *p);
  return scale_by_length ? r * d : r / d;
}

double state_reward(std::size_t cell, const Theta& theta, const FeatureMap& features) {
  if (theta.size() != features.n_features()) {
    throw DimensionMismatch("theta has " + std::to_string(theta.size()) +
                            " weights for " + std::to_string(features.n_features()) +
                            " features");
  }
  const auto f = features.at(cell);
  double r = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) r += theta[k] * f[k];
  return r;
}

double state_reward(const State& s, const Theta& theta, const FeatureMap& features) {
  if (s.x < 0 || s.y < 0 || s.x >= features.width() || s.y >= features.height()) {
    throw OutOfBounds("state outside feature map");
  }
  const std::size_t cell = static_cast<std::size_t>(s.y) *
                               static_cast<std::size_t>(features.width()) +
                           static_cast<std::size_t>(s.x);
  return state_reward(cell, theta, features);
}

double dist_p(const State& s, const State& s_next, double p) {
  const int dx = std::abs(s_next.x - s.x);
  const int dy = std::abs(s_next.y - s.y);
  if (dx == 0 && dy == 0) return 1.0;
  if (dx == 0 || dy == 0) return static_cast<double>(dx + dy);
  return std::pow(std::pow(dx, p) + std::pow(dy, p), 1.0 / p);
}

double transition_reward(const State& s, const State& s_next, const Theta& theta,
                         const FeatureMap& features, const DistanceNorm& norm) {
  const double r = state_reward(s, theta, features);
  return norm.apply(r, s, s_next);
}

std::vector<double> transition_reward_table(const TransitionModel& transitions,
                                            const Theta& theta,
                                            const FeatureMap& features,
                                            const DistanceNorm& norm) {
  const GridSpec& spec = transitions.spec();
  if (features.width() != spec.width() || features.height() != spec.height()) {
    throw DimensionMismatch("feature map does not match the grid");
  }
  std::vector<double> table(spec.cells() * kNumActions);
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      const std::size_t c = spec.cell_index(x, y);
      const State s{x, y, 0};
      const double r = state_reward(c, theta, features);
      for (int a = 0; a < kNumActions; ++a) {
        const State next = transitions.blocked(c, a)
                               ? s
                               : State{x + kActions[a].dx, y + kActions[a].dy, 0};
        table[c * kNumActions + a] = norm.apply(r, s, next);
      }
    }
  }
  return table;
}

}  // namespace trajirl
