#include "trajirl/trajectory.hpp"

#include "trajirl/error.hpp"

namespace trajirl {

std::vector<Gap> find_gaps(const Trajectory& trajectory) {
  std::vector<Gap> gaps;
  const auto& pts = trajectory.points;
  std::size_t i = 0;
  while (i < pts.size()) {
    if (pts[i].pos) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < pts.size() && !pts[j].pos) ++j;
    if (i == 0 || j == pts.size()) {
      throw TooShort("trajectory " + trajectory.id + " has a gap at an endpoint");
    }
    gaps.push_back({i, j});
    i = j;
  }
  return gaps;
}

std::vector<Point2> known_positions(const Trajectory& trajectory) {
  std::vector<Point2> out;
  out.reserve(trajectory.points.size());
  for (const auto& p : trajectory.points) {
    if (p.pos) out.push_back(*p.pos);
  }
  return out;
}

Trajectory trajectory_from_states(std::string id, const std::vector<State>& states,
                                  const GridSpec& spec, std::int64_t t0) {
  Trajectory out{std::move(id), {}};
  out.points.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    out.points.push_back({t0 + static_cast<std::int64_t>(k), cell_center(states[k], spec)});
  }
  return out;
}

}  // namespace trajirl
