#pragma once

#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/kernels.hpp"
#include "trajirl/planner.hpp"

namespace trajirl {

/// Expected state visitation counts D(s) from the forward pass.
struct VisitationField {
  GridSpec spec;
  std::vector<double> d;
  /// D^(n) for n = 1..n_steps, after goal absorption; empty unless requested.
  std::vector<std::vector<double>> per_step;
  /// Mass removed at the goal over the pass.
  double absorbed = 0.0;

  /// D summed over time layers (identity on planar grids).
  std::vector<double> planar() const;
};

struct ForwardOptions {
  bool keep_per_step = false;
  Exec exec = Exec::parallel;
};

/// Propagates unit mass from `start` for n_steps distributions
/// D^(1) .. D^(n_steps): each step zeroes the goal (recording the removed
/// mass in `absorbed`), adds the distribution to D and pushes it one move
/// through the policy. On time-augmented grids mass moves one layer per
/// step and the goal is taken on the last layer.
VisitationField forward_pass(const Policy& policy, const GridSpec& spec, State start, State goal,
                             int n_steps, const ForwardOptions& options = {});

}  // namespace trajirl
