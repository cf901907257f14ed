#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace trajirl {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Grid cell, optionally carrying a time layer. In planar mode z is always 0.
struct State {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const State&, const State&) = default;
};

struct Action {
  int dx = 0;
  int dy = 0;
};

inline constexpr int kNumActions = 8;

/// Fixed action order N, NE, E, SE, S, SW, W, NW (north is +y). Argmax ties
/// resolve to the earliest entry.
inline constexpr std::array<Action, kNumActions> kActions{{
    {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

/// Discretized world. A horizon makes the state space time-augmented: every
/// action advances z by one and the state count is width*height*horizon.
class GridSpec {
 public:
  GridSpec(Point2 origin, Point2 cell_size, int width, int height,
           std::optional<int> horizon = std::nullopt);

  /// Unit cells at the origin; convenient for tests and synthetic maps.
  static GridSpec unit(int width, int height,
                       std::optional<int> horizon = std::nullopt) {
    return GridSpec({0.0, 0.0}, {1.0, 1.0}, width, height, horizon);
  }

  Point2 origin() const noexcept { return origin_; }
  Point2 cell_size() const noexcept { return cell_size_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::optional<int> horizon() const noexcept { return horizon_; }
  bool time_augmented() const noexcept { return horizon_.has_value(); }

  int layers() const noexcept { return horizon_.value_or(1); }
  std::size_t cells() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t num_states() const noexcept {
    return cells() * static_cast<std::size_t>(layers());
  }

  bool contains(const State& s) const noexcept;
  bool contains_cell(int x, int y) const noexcept {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  std::size_t cell_index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  std::size_t index(const State& s) const noexcept {
    return static_cast<std::size_t>(s.z) * cells() + cell_index(s.x, s.y);
  }
  State state(std::size_t index) const noexcept;

  /// Same map with the time axis replaced (or removed).
  GridSpec with_horizon(std::optional<int> horizon) const {
    return GridSpec(origin_, cell_size_, width_, height_, horizon);
  }

 private:
  Point2 origin_;
  Point2 cell_size_;
  int width_;
  int height_;
  std::optional<int> horizon_;
};

/// Deterministic transitions over the planar cells, tabulated once so the
/// sweep kernels only do table lookups. Moves that would leave the grid
/// stay in place.
class TransitionModel {
 public:
  explicit TransitionModel(const GridSpec& spec);

  const GridSpec& spec() const noexcept { return spec_; }
  /// Successor cell of planar cell c under action a.
  std::int32_t next_cell(std::size_t c, int a) const noexcept {
    return next_[c * kNumActions + static_cast<std::size_t>(a)];
  }
  bool blocked(std::size_t c, int a) const noexcept {
    return blocked_[c * kNumActions + static_cast<std::size_t>(a)] != 0;
  }
  std::span<const std::int32_t> table() const noexcept { return next_; }

 private:
  GridSpec spec_;
  std::vector<std::int32_t> next_;
  std::vector<std::uint8_t> blocked_;
};

/// Cell containing the point. Throws OutOfBounds outside the half-open
/// bounding box [origin, origin + size*cell_size).
State discretize(Point2 point, const GridSpec& spec);

Point2 cell_center(const State& s, const GridSpec& spec);

/// s + a, or s itself when the move leaves the grid. In time-augmented mode
/// z advances by one; throws HorizonExceeded when s is on the last layer.
State successor(const State& s, const Action& a, const GridSpec& spec);

int chebyshev(const State& a, const State& b) noexcept;

/// Cells crossed by the segment p0-p1 (coordinates in cell units), in
/// traversal order, consecutive cells at Chebyshev distance 1. An exact
/// corner crossing takes one diagonal step.
std::vector<std::pair<int, int>> supercover(Point2 p0, Point2 p1);

struct ProjectionOptions {
  /// Maximum number of cells inserted between two consecutive fixes;
  /// unlimited when empty.
  std::optional<int> max_bridge_cells;
};

/// Grid path of a polyline: each fix discretized, gaps between fixes filled
/// by supercover rasterization, consecutive duplicates collapsed.
std::vector<State> project_trajectory(std::span<const Point2> points,
                                      const GridSpec& spec,
                                      const ProjectionOptions& options = {});

}  // namespace trajirl
