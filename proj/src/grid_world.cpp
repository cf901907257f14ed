#include "trajirl/grid_world.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "trajirl/error.hpp"

namespace trajirl {

GridSpec::GridSpec(Point2 origin, Point2 cell_size, int width, int height,
                   std::optional<int> horizon)
    : origin_(origin),
      cell_size_(cell_size),
      width_(width),
      height_(height),
      horizon_(horizon) {
  if (width < 1 || height < 1 || static_cast<long>(width) * height < 2) {
    throw InvalidArgument("grid must have positive extent and at least two cells");
  }
  if (!(cell_size.x > 0.0) || !(cell_size.y > 0.0) ||
      !std::isfinite(cell_size.x) || !std::isfinite(cell_size.y)) {
    throw InvalidArgument("cell size must be positive and finite");
  }
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    throw InvalidArgument("origin must be finite");
  }
  if (horizon && *horizon < 1) {
    throw InvalidArgument("horizon must be at least 1");
  }
}

bool GridSpec::contains(const State& s) const noexcept {
  return contains_cell(s.x, s.y) && s.z >= 0 && s.z < layers();
}

State GridSpec::state(std::size_t index) const noexcept {
  const std::size_t layer = index / cells();
  const std::size_t c = index % cells();
  return {static_cast<int>(c % static_cast<std::size_t>(width_)),
          static_cast<int>(c / static_cast<std::size_t>(width_)),
          static_cast<int>(layer)};
}

TransitionModel::TransitionModel(const GridSpec& spec)
    : spec_(spec),
      next_(spec.cells() * kNumActions),
      blocked_(spec.cells() * kNumActions) {
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      const std::size_t c = spec.cell_index(x, y);
      for (int a = 0; a < kNumActions; ++a) {
        const int nx = x + kActions[a].dx;
        const int ny = y + kActions[a].dy;
        const bool off = !spec.contains_cell(nx, ny);
        next_[c * kNumActions + a] = static_cast<std::int32_t>(
            off ? c : spec.cell_index(nx, ny));
        blocked_[c * kNumActions + a] = off ? 1 : 0;
      }
    }
  }
}

State discretize(Point2 point, const GridSpec& spec) {
  const double fx = (point.x - spec.origin().x) / spec.cell_size().x;
  const double fy = (point.y - spec.origin().y) / spec.cell_size().y;
  if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= spec.width() || fy >= spec.height()) {
    throw OutOfBounds("point (" + std::to_string(point.x) + ", " +
                      std::to_string(point.y) + ") outside grid");
  }
  // floor can round up to the bound for values just below it
  const int x = std::min(static_cast<int>(std::floor(fx)), spec.width() - 1);
  const int y = std::min(static_cast<int>(std::floor(fy)), spec.height() - 1);
  return {x, y, 0};
}

Point2 cell_center(const State& s, const GridSpec& spec) {
  return {spec.origin().x + (s.x + 0.5) * spec.cell_size().x,
          spec.origin().y + (s.y + 0.5) * spec.cell_size().y};
}

State successor(const State& s, const Action& a, const GridSpec& spec) {
  State next = s;
  if (spec.time_augmented()) {
    if (s.z + 1 >= *spec.horizon()) {
      throw HorizonExceeded("no successor on the last time layer");
    }
    next.z = s.z + 1;
  }
  if (spec.contains_cell(s.x + a.dx, s.y + a.dy)) {
    next.x = s.x + a.dx;
    next.y = s.y + a.dy;
  }
  return next;
}

int chebyshev(const State& a, const State& b) noexcept {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

std::vector<std::pair<int, int>> supercover(Point2 p0, Point2 p1) {
  int x = static_cast<int>(std::floor(p0.x));
  int y = static_cast<int>(std::floor(p0.y));
  const int x_end = static_cast<int>(std::floor(p1.x));
  const int y_end = static_cast<int>(std::floor(p1.y));
  std::vector<std::pair<int, int>> out{{x, y}};

  const double dx = p1.x - p0.x;
  const double dy = p1.y - p0.y;
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  // parametric distance (t in [0,1]) to the next vertical / horizontal boundary
  const double delta_x = step_x != 0 ? 1.0 / std::abs(dx) : inf;
  const double delta_y = step_y != 0 ? 1.0 / std::abs(dy) : inf;
  double t_x = step_x > 0 ? (x + 1 - p0.x) / dx
               : step_x < 0 ? (p0.x - x) / -dx
                            : inf;
  double t_y = step_y > 0 ? (y + 1 - p0.y) / dy
               : step_y < 0 ? (p0.y - y) / -dy
                            : inf;
  constexpr double kCornerEps = 1e-12;

  while (x != x_end || y != y_end) {
    const bool x_done = x == x_end;
    const bool y_done = y == y_end;
    if (x_done) {
      y += step_y;
      t_y += delta_y;
    } else if (y_done) {
      x += step_x;
      t_x += delta_x;
    } else if (std::abs(t_x - t_y) <= kCornerEps * std::max(1.0, t_x)) {
      x += step_x;
      y += step_y;
      t_x += delta_x;
      t_y += delta_y;
    } else if (t_x < t_y) {
      x += step_x;
      t_x += delta_x;
    } else {
      y += step_y;
      t_y += delta_y;
    }
    out.emplace_back(x, y);
  }
  return out;
}

std::vector<State> project_trajectory(std::span<const Point2> points,
                                      const GridSpec& spec,
                                      const ProjectionOptions& options) {
  std::vector<State> path;
  if (points.empty()) return path;

  auto to_cell_units = [&](Point2 p) {
    return Point2{(p.x - spec.origin().x) / spec.cell_size().x,
                  (p.y - spec.origin().y) / spec.cell_size().y};
  };
  auto push = [&](State s) {
    if (path.empty() || !(path.back() == s)) path.push_back(s);
  };

  State prev = discretize(points[0], spec);
  push(prev);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const State cur = discretize(points[i], spec);
    if (chebyshev(prev, cur) > 1) {
      const auto cells = supercover(to_cell_units(points[i - 1]), to_cell_units(points[i]));
      const int bridged = static_cast<int>(cells.size()) - 2;
      if (options.max_bridge_cells && bridged > *options.max_bridge_cells) {
        throw NonAdjacentJump("fix " + std::to_string(i) + " is " +
                              std::to_string(chebyshev(prev, cur)) +
                              " cells from its predecessor");
      }
      for (std::size_t k = 1; k + 1 < cells.size(); ++k) {
        push({cells[k].first, cells[k].second, 0});
      }
    }
    push(cur);
    prev = cur;
  }
  return path;
}

}  // namespace trajirl
