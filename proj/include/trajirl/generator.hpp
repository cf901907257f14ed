#pragma once

#include <cstdint>
#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/planner.hpp"
#include "trajirl/trajectory.hpp"

namespace trajirl {

enum class GenerationMode { deterministic, stochastic };

struct GapQuery {
  State start;
  State goal;
  int max_steps = 0;
  GenerationMode mode = GenerationMode::deterministic;
  int retries = 1;
  std::uint64_t seed = 0;
};

struct GeneratedPath {
  std::vector<State> states;
  bool reached_goal = false;
  int attempts_used = 0;
};

/// Greedy rollout: repeatedly takes argmax_a pi(a|s), ties to the earliest
/// action in kActions. Stops at the goal, after max_steps moves, or when a
/// planar state repeats. On time-augmented grids it walks until the last
/// layer and succeeds iff it ends on the goal there.
GeneratedPath rollout_deterministic(const Policy& policy, const GapQuery& query,
                                    const GridSpec& spec);

/// Sampled rollout. Attempt k draws from stream k of the query seed; after
/// `retries` failed attempts the one ending closest to the goal (Chebyshev,
/// earliest on ties) is returned with reached_goal = false. Rejected on
/// time-augmented grids, where a sampled path cannot be forced to end on
/// the goal at the final time.
GeneratedPath rollout_stochastic(const Policy& policy, const GapQuery& query,
                                 const GridSpec& spec);

GeneratedPath rollout(const Policy& policy, const GapQuery& query, const GridSpec& spec);

struct GenerationSettings {
  GenerationMode mode = GenerationMode::deterministic;
  int retries = 10;
  std::uint64_t seed = 0;
  /// Planar step budget as a multiple of the gap's step count.
  int budget_factor = 4;
};

/// Grid endpoints and step count of a gap. The grid may be planar or
/// time-augmented; only the planar extent is used here.
struct GapEndpoints {
  State from;
  State to;
  std::int64_t steps = 0;
};
GapEndpoints gap_endpoints(const Trajectory& trajectory, const Gap& gap, const GridSpec& spec);

/// Generates the path across a gap under a policy planned toward the gap's
/// closing anchor. A time-augmented policy must have horizon steps + 1 and
/// the budget is exactly the missing step count; planar budgets are
/// budget_factor times that count.
GeneratedPath generate_gap_path(const Trajectory& trajectory, const Gap& gap, const Policy& policy,
                                const GenerationSettings& settings);

/// Replaces the gap rows by the interior states of `path` (cell centres).
/// Inserted rows get t values spread non-decreasingly over the gap's time
/// range. A path that stops short of the closing anchor is bridged to it
/// with a grid line.
Trajectory splice_gap(const Trajectory& trajectory, const Gap& gap, const GeneratedPath& path,
                      const GridSpec& spec);

/// generate_gap_path followed by splice_gap. Throws GapUnreachable when no
/// attempt reaches the closing anchor. Zero-length gaps return the input.
Trajectory interpolate_gap(const Trajectory& trajectory, const Gap& gap, const Policy& policy,
                           const GenerationSettings& settings);

}  // namespace trajirl
