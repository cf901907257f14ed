#include "trajirl/generator.hpp"

#include <string>

#include "trajirl/error.hpp"
#include "trajirl/rng.hpp"

namespace trajirl {

namespace {

void validate(const Policy& policy, const GapQuery& query, const GridSpec& spec) {
  if (policy.probs.size() != spec.num_states() * kNumActions) {
    throw DimensionMismatch("policy does not match the grid");
  }
  if (!spec.contains_cell(query.start.x, query.start.y) ||
      !spec.contains_cell(query.goal.x, query.goal.y)) {
    throw OutOfBounds("query endpoints outside grid");
  }
  if (query.max_steps < chebyshev(query.start, query.goal)) {
    throw InvalidArgument("step budget shorter than the distance to the goal");
  }
  if (query.retries < 1) throw InvalidArgument("retries must be at least 1");
}

int argmax(std::span<const double> row) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(best)]) best = a;
  }
  return best;
}

int sample(std::span<const double> row, CounterRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = 0;
  for (int a = 0; a < kNumActions; ++a) {
    const double p = row[static_cast<std::size_t>(a)];
    if (p > 0.0) last_positive = a;
    acc += p;
    if (u < acc) return a;
  }
  return last_positive;
}

bool same_cell(const State& a, const State& b) { return a.x == b.x && a.y == b.y; }

}  // namespace

GeneratedPath rollout_deterministic(const Policy& policy, const GapQuery& query,
                                    const GridSpec& spec) {
  validate(policy, query, spec);
  GeneratedPath out{{}, false, 1};
  State s = query.start;

  if (spec.time_augmented()) {
    const int last = *spec.horizon() - 1;
    s.z = std::clamp(s.z, 0, last);
    out.states.push_back(s);
    for (int step = 0; s.z < last && step < query.max_steps; ++step) {
      s = successor(s, kActions[argmax(policy.row(s))], spec);
      out.states.push_back(s);
    }
    out.reached_goal = s.z == last && same_cell(s, query.goal);
    return out;
  }

  s.z = 0;
  std::vector<std::uint8_t> seen(spec.cells(), 0);
  out.states.push_back(s);
  seen[spec.cell_index(s.x, s.y)] = 1;
  for (int step = 0; step < query.max_steps && !same_cell(s, query.goal); ++step) {
    const State next = successor(s, kActions[argmax(policy.row(s))], spec);
    auto& mark = seen[spec.cell_index(next.x, next.y)];
    if (mark) return out;  // loop: reached_goal stays false
    mark = 1;
    s = next;
    out.states.push_back(s);
  }
  out.reached_goal = same_cell(s, query.goal);
  return out;
}

GeneratedPath rollout_stochastic(const Policy& policy, const GapQuery& query,
                                 const GridSpec& spec) {
  if (spec.time_augmented()) {
    throw InvalidConfig("stochastic generation is not available on time-augmented grids");
  }
  validate(policy, query, spec);
  GeneratedPath best;
  int best_distance = std::numeric_limits<int>::max();
  for (int attempt = 0; attempt < query.retries; ++attempt) {
    CounterRng rng(query.seed, static_cast<std::uint64_t>(attempt));
    GeneratedPath path{{State{query.start.x, query.start.y, 0}}, false, attempt + 1};
    State s = path.states.front();
    for (int step = 0; step < query.max_steps && !same_cell(s, query.goal); ++step) {
      s = successor(s, kActions[sample(policy.row(s), rng)], spec);
      path.states.push_back(s);
    }
    if (same_cell(s, query.goal)) {
      path.reached_goal = true;
      return path;
    }
    const int distance = chebyshev(s, query.goal);
    if (distance < best_distance) {
      best_distance = distance;
      best = std::move(path);
    }
  }
  best.attempts_used = query.retries;
  return best;
}

GeneratedPath rollout(const Policy& policy, const GapQuery& query, const GridSpec& spec) {
  return query.mode == GenerationMode::deterministic ? rollout_deterministic(policy, query, spec)
                                                     : rollout_stochastic(policy, query, spec);
}

GapEndpoints gap_endpoints(const Trajectory& trajectory, const Gap& gap, const GridSpec& spec) {
  const auto& pts = trajectory.points;
  if (gap.begin == 0 || gap.end >= pts.size() || gap.end < gap.begin) {
    throw TooShort("gap of " + trajectory.id + " is not interior");
  }
  const TrackPoint& a = pts[gap.begin - 1];
  const TrackPoint& b = pts[gap.end];
  if (!a.pos || !b.pos) throw InvalidArgument("gap anchors of " + trajectory.id + " are missing");
  const GridSpec plane = spec.with_horizon(std::nullopt);
  return {discretize(*a.pos, plane), discretize(*b.pos, plane), b.t - a.t};
}

GeneratedPath generate_gap_path(const Trajectory& trajectory, const Gap& gap, const Policy& policy,
                                const GenerationSettings& settings) {
  const GridSpec& spec = policy.spec;
  const GapEndpoints ends = gap_endpoints(trajectory, gap, spec);
  if (ends.steps < 1) throw InvalidArgument("gap anchors of " + trajectory.id + " share a time");
  GapQuery query{ends.from, ends.to, 0, settings.mode, settings.retries, settings.seed};
  if (spec.time_augmented()) {
    if (*spec.horizon() != ends.steps + 1) {
      throw InvalidConfig("time-augmented policy horizon must equal the gap steps plus one");
    }
    query.max_steps = static_cast<int>(ends.steps);
    query.goal.z = *spec.horizon() - 1;
  } else {
    query.max_steps = std::max(static_cast<int>(settings.budget_factor * ends.steps),
                               chebyshev(ends.from, ends.to));
  }
  return rollout(policy, query, spec);
}

Trajectory splice_gap(const Trajectory& trajectory, const Gap& gap, const GeneratedPath& path,
                      const GridSpec& spec) {
  if (gap.length() == 0) return trajectory;
  const GridSpec plane = spec.with_horizon(std::nullopt);
  const GapEndpoints ends = gap_endpoints(trajectory, gap, plane);
  if (path.states.empty() || !same_cell(path.states.front(), ends.from)) {
    throw InvalidArgument("generated path does not start at the gap anchor");
  }

  std::vector<State> cells(path.states.begin(), path.states.end());
  if (!same_cell(cells.back(), ends.to)) {
    const Point2 p0{cells.back().x + 0.5, cells.back().y + 0.5};
    const Point2 p1{ends.to.x + 0.5, ends.to.y + 0.5};
    const auto bridge = supercover(p0, p1);
    for (std::size_t k = 1; k < bridge.size(); ++k) cells.push_back({bridge[k].first, bridge[k].second, 0});
  }

  const auto& pts = trajectory.points;
  const std::int64_t t_a = pts[gap.begin - 1].t;
  const std::int64_t t_b = pts[gap.end].t;
  const auto moves = static_cast<std::int64_t>(cells.size() - 1);

  Trajectory out{trajectory.id, {}};
  out.points.assign(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(gap.begin));
  for (std::int64_t k = 1; k < moves; ++k) {
    const std::int64_t t = t_a + (k * (t_b - t_a)) / moves;
    out.points.push_back({t, cell_center(cells[static_cast<std::size_t>(k)], plane)});
  }
  out.points.insert(out.points.end(), pts.begin() + static_cast<std::ptrdiff_t>(gap.end), pts.end());
  return out;
}

Trajectory interpolate_gap(const Trajectory& trajectory, const Gap& gap, const Policy& policy,
                           const GenerationSettings& settings) {
  if (gap.length() == 0) return trajectory;
  const GeneratedPath path = generate_gap_path(trajectory, gap, policy, settings);
  if (!path.reached_goal) {
    throw GapUnreachable("no generated path reached the end of the gap in " + trajectory.id);
  }
  return splice_gap(trajectory, gap, path, policy.spec);
}

}  // namespace trajirl
