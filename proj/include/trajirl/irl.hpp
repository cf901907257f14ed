#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "trajirl/grid_world.hpp"
#include "trajirl/planner.hpp"
#include "trajirl/reward.hpp"

namespace trajirl {

/// Demonstrations projected onto a planar grid. Each path starts at its
/// first state and ends at its goal (last state).
struct TrainingSet {
  GridSpec spec;
  FeatureMap features;
  std::vector<std::vector<State>> paths;

  /// Throws EmptyInput for no paths, TooShort for a path under two states,
  /// DimensionMismatch when the features do not cover the grid.
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int max_epochs = 100;
  double grad_tol = 1e-4;
  PlannerConfig planner;
  PolicyRule rule = PolicyRule::q_only;
  /// Plan each demonstration on a time-augmented grid whose horizon is the
  /// demonstration's length.
  bool time_augmented = false;
  std::optional<Theta> initial_theta;
  /// Parallelism across demonstrations; kernels run serially inside.
  Exec exec = Exec::parallel;
};

struct FeatureExpectation {
  std::vector<double> mean;
  int not_converged = 0;
  double vi_seconds = 0.0;
  long sweeps = 0;
};

struct TrainReport {
  std::vector<std::vector<double>> theta_history;
  std::vector<double> grad_norm_history;
  /// Value-iteration seconds per sweep, averaged over the epoch's passes.
  std::vector<double> vi_seconds_per_sweep;
  /// Value-iteration seconds per backward pass, averaged likewise.
  std::vector<double> vi_seconds_per_pass;
  /// Wall time of one gradient evaluation (all passes of the epoch).
  std::vector<double> update_seconds;
  std::vector<int> not_converged;
  bool converged = false;

  std::size_t epochs() const noexcept { return grad_norm_history.size(); }
};

/// Mean over demonstrations of the summed features of every state visited,
/// goal included.
std::vector<double> empirical_feature_mean(const TrainingSet& ts);

/// Mean over demonstrations of sum_s f(s) D(s) plus the goal's features
/// weighted by the mass absorbed there, so both sides of the gradient
/// count the terminal state. Each demonstration gets its own backward pass
/// toward its goal and a forward pass of its own length.
FeatureExpectation model_feature_expectation(const TrainingSet& ts, const Theta& theta,
                                             const TrainConfig& config);

/// f_bar - f_model.
std::vector<double> gradient(const std::vector<double>& f_bar, const std::vector<double>& f_model);

/// theta_i * exp(lambda * g_i). Throws NonFinite when a component
/// overflows or underflows to zero.
Theta update_theta(const Theta& theta, const std::vector<double>& grad, double learning_rate);

/// Exponentiated-gradient training from theta = -1 (or the configured
/// start) until ||grad||_inf < grad_tol or max_epochs.
///
/// With negative weights, theta * exp(lambda * g) moves each weight against
/// the log-likelihood gradient, so the step is taken with -g: the weight
/// magnitudes (costs) shrink where demonstrations see more of a feature
/// than the model does.
std::pair<Theta, TrainReport> train(const TrainingSet& ts, const TrainConfig& config);

}  // namespace trajirl
