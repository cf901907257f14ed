#pragma once

// Exhaustive path enumeration over tiny grids. Used only by the tests as an
// independent reference for the planner, the forward pass and the gradient;
// none of it goes through the kernels.

#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/planner.hpp"
#include "trajirl/reward.hpp"

namespace trajirl::oracle {

enum class PathSet {
  /// Action sequences of at most `horizon` moves that stop on first reaching
  /// the goal (planar absorbing goal).
  first_hit_within,
  /// Action sequences of exactly `horizon` moves ending on the goal, which
  /// may be crossed earlier (time-augmented grid with horizon + 1 layers).
  exact_length,
};

struct EnumerationProblem {
  GridSpec spec;  // planar, at most 5x5
  int horizon = 1;
  State start;
  State goal;
  Theta theta;
  FeatureMap features;
  DistanceNorm norm;
  PathSet set = PathSet::first_hit_within;
};

struct EnumeratedPath {
  std::vector<State> states;
  std::vector<int> actions;
  double reward = 0.0;
  double probability = 0.0;
};

inline constexpr double kMaxEnumeratedSequences = 1e6;

/// Every qualifying action sequence with its reward and probability
/// exp(R) / sum exp(R). Throws TooLarge past 8^horizon > 1e6 or 5x5.
std::vector<EnumeratedPath> enumerate_paths(const EnumerationProblem& problem);

/// log sum over enumerated paths of exp(R); -inf when none qualify.
double log_partition(const EnumerationProblem& problem);

/// Mean over demos of log p(demo), where p sums the probabilities of all
/// enumerated action sequences producing the demo's state sequence.
/// Throws DemoInfeasible when a demo is not among them.
double exact_log_likelihood(const EnumerationProblem& problem,
                            const std::vector<std::vector<State>>& demos);

/// Expected summed features of a path (goal state included).
std::vector<double> expected_feature_counts(const EnumerationProblem& problem);

/// Visitation counts by expanding every action sequence of a policy:
/// D(s) = sum_n P(at s after n-1 moves, goal not yet reached). Planar or
/// time-augmented according to the policy's grid.
std::vector<double> brute_force_visitation(const Policy& policy, State start, State goal,
                                           int n_steps);

}  // namespace trajirl::oracle
