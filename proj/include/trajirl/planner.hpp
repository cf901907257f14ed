#pragma once

#include <optional>
#include <span>
#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/kernels.hpp"
#include "trajirl/reward.hpp"

namespace trajirl {

enum class PolicyRule {
  q_minus_v,  // pi(a|s) ~ exp(Q(s,a) - V(s))
  q_only,     // pi(a|s) ~ exp(Q(s,a))
};

/// Sweep schedule for time-augmented grids. full_volume recomputes every
/// layer on each of the N sweeps (the cost profile of the 3D baseline);
/// layered computes each layer once, top down. Both give identical arrays.
enum class TimeSchedule { full_volume, layered };

struct PlannerConfig {
  DistanceNorm norm;
  Backup backup = Backup::hard_max;
  std::optional<GaussianKernel> kernel;
  /// 0 selects 10 * (width + height).
  int max_iters = 0;
  double tol = 1e-6;
  Exec exec = Exec::parallel;
  TimeSchedule schedule = TimeSchedule::full_volume;
  bool record_sweep_times = false;
};

/// Output of the backward pass. Arrays are indexed by GridSpec::index, Q
/// additionally by action (state-major).
struct ValueArtifacts {
  GridSpec spec;
  State goal;
  std::vector<double> q;
  std::vector<double> v;
  int iterations_run = 0;
  bool converged = false;
  std::vector<double> sweep_seconds;

  double value(const State& s) const { return v[spec.index(s)]; }
  double q_value(const State& s, int a) const {
    return q[spec.index(s) * kNumActions + static_cast<std::size_t>(a)];
  }
};

struct Policy {
  GridSpec spec;
  std::vector<double> probs;

  std::span<const double> row(const State& s) const {
    return {probs.data() + spec.index(s) * kNumActions, static_cast<std::size_t>(kNumActions)};
  }
};

/// Value iteration toward an absorbing goal. V starts at -inf; every sweep
/// pins V(goal) = 0, forms Q(s,a) = r(s,s') + V(s'), backs up, optionally
/// blurs V with the kernel and pins the goal again.
///
/// Planar grids sweep until the max-norm change of V is below tol (a cell
/// turning finite counts as an infinite change) or max_iters is reached;
/// converged reports which. Time-augmented grids run exactly `horizon`
/// sweeps with the goal on the last layer, at (goal.x, goal.y, horizon-1).
ValueArtifacts backward_pass(const GridSpec& spec, State goal, const Theta& theta,
                             const FeatureMap& features, const PlannerConfig& config);

/// Row-normalized exponentials of Q. Both rules subtract the row maximum
/// of Q before exponentiating, so the per-row constant V(s) of q_minus_v
/// cancels exactly. Rows with no finite action value are uniform.
Policy make_policy(const ValueArtifacts& artifacts, PolicyRule rule, Exec exec = Exec::parallel);

/// Blur of a planar value field with reflect padding; -inf entries are
/// treated as missing and the kernel mass renormalized over the rest.
std::vector<double> convolve_v(std::span<const double> v, int width, int height,
                               const GaussianKernel& kernel, Exec exec = Exec::parallel);

}  // namespace trajirl
