#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajirl/grid_world.hpp"

namespace trajirl {

/// One row of a recorded track; a missing position marks a gap row.
struct TrackPoint {
  std::int64_t t = 0;
  std::optional<Point2> pos;
  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

struct Trajectory {
  std::string id;
  std::vector<TrackPoint> points;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Missing rows [begin, end) of a trajectory; the anchors are begin-1 and end.
struct Gap {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const noexcept { return end - begin; }
  friend bool operator==(const Gap&, const Gap&) = default;
};

/// Maximal runs of gap rows. Throws TooShort when a run touches either end.
std::vector<Gap> find_gaps(const Trajectory& trajectory);

/// Positions of the non-gap rows, in order.
std::vector<Point2> known_positions(const Trajectory& trajectory);

/// Trajectory built from grid states at cell centres, t = t0, t0+1, ...
Trajectory trajectory_from_states(std::string id, const std::vector<State>& states,
                                  const GridSpec& spec, std::int64_t t0 = 0);

}  // namespace trajirl
