#include "trajirl/irl.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "trajirl/error.hpp"
#include "trajirl/visitation.hpp"

namespace trajirl {

namespace {

using Clock = std::chrono::steady_clock;

struct PathExpectation {
  std::vector<double> features;
  bool converged = true;
  double vi_seconds = 0.0;
  int sweeps = 0;
};

PathExpectation expectation_for_path(const TrainingSet& ts, const std::vector<State>& path,
                                     const Theta& theta, const TrainConfig& config,
                                     Exec kernel_exec) {
  const State start = path.front();
  const State goal = path.back();
  const int length = static_cast<int>(path.size());
  const GridSpec spec =
      config.time_augmented ? ts.spec.with_horizon(length) : ts.spec.with_horizon(std::nullopt);

  PlannerConfig planner = config.planner;
  planner.exec = kernel_exec;
  const auto t0 = Clock::now();
  const ValueArtifacts artifacts = backward_pass(spec, goal, theta, ts.features, planner);
  const double vi_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  const Policy policy = make_policy(artifacts, config.rule, kernel_exec);
  const VisitationField field = forward_pass(policy, spec, start, goal, length, {false, kernel_exec});
  const std::vector<double> d = field.planar();

  const std::size_t nf = ts.features.n_features();
  PathExpectation out{std::vector<double>(nf, 0.0), artifacts.converged, vi_seconds,
                      artifacts.iterations_run};
  for (std::size_t c = 0; c < d.size(); ++c) {
    if (d[c] == 0.0) continue;
    const auto f = ts.features.at(c);
    for (std::size_t k = 0; k < nf; ++k) out.features[k] += f[k] * d[c];
  }
  const auto f_goal = ts.features.at(ts.spec.cell_index(goal.x, goal.y));
  for (std::size_t k = 0; k < nf; ++k) out.features[k] += f_goal[k] * field.absorbed;
  return out;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void TrainingSet::validate() const {
  if (paths.empty()) throw EmptyInput("training set has no trajectories");
  if (features.width() != spec.width() || features.height() != spec.height()) {
    throw DimensionMismatch("feature map does not match the grid");
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].size() < 2) {
      throw TooShort("training trajectory " + std::to_string(i) + " has fewer than two states");
    }
    for (const State& s : paths[i]) {
      if (!spec.contains_cell(s.x, s.y)) {
        throw OutOfBounds("training trajectory " + std::to_string(i) + " leaves the grid");
      }
    }
  }
}

std::vector<double> empirical_feature_mean(const TrainingSet& ts) {
  ts.validate();
  const std::size_t nf = ts.features.n_features();
  std::vector<double> mean(nf, 0.0);
  for (const auto& path : ts.paths) {
    std::vector<double> sum(nf, 0.0);
    for (const State& s : path) {
      const auto f = ts.features.at(ts.spec.cell_index(s.x, s.y));
      for (std::size_t k = 0; k < nf; ++k) sum[k] += f[k];
    }
    for (std::size_t k = 0; k < nf; ++k) mean[k] += sum[k];
  }
  for (double& m : mean) m /= static_cast<double>(ts.paths.size());
  return mean;
}

FeatureExpectation model_feature_expectation(const TrainingSet& ts, const Theta& theta,
                                             const TrainConfig& config) {
  ts.validate();
  if (theta.size() != ts.features.n_features()) {
    throw DimensionMismatch("theta does not match the feature count");
  }
  const auto n = static_cast<std::ptrdiff_t>(ts.paths.size());
  std::vector<PathExpectation> parts(ts.paths.size());

  if (config.exec == Exec::parallel) {
    // errors are rethrown after the loop; exceptions cannot cross the region
    std::vector<std::exception_ptr> errors(ts.paths.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        parts[static_cast<std::size_t>(i)] = expectation_for_path(
            ts, ts.paths[static_cast<std::size_t>(i)], theta, config, Exec::serial);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t i = 0; i < ts.paths.size(); ++i) {
      parts[i] = expectation_for_path(ts, ts.paths[i], theta, config, config.planner.exec);
    }
  }

  FeatureExpectation out{std::vector<double>(ts.features.n_features(), 0.0), 0, 0.0, 0};
  for (const auto& part : parts) {
    for (std::size_t k = 0; k < out.mean.size(); ++k) out.mean[k] += part.features[k];
    out.not_converged += part.converged ? 0 : 1;
    out.vi_seconds += part.vi_seconds;
    out.sweeps += part.sweeps;
  }
  for (double& m : out.mean) m /= static_cast<double>(parts.size());
  return out;
}

std::vector<double> gradient(const std::vector<double>& f_bar, const std::vector<double>& f_model) {
  if (f_bar.size() != f_model.size()) {
    throw DimensionMismatch("feature vectors differ in length");
  }
  std::vector<double> g(f_bar.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = f_bar[k] - f_model[k];
  return g;
}

Theta update_theta(const Theta& theta, const std::vector<double>& grad, double learning_rate) {
  if (grad.size() != theta.size()) throw DimensionMismatch("gradient does not match theta");
  std::vector<double> next(theta.size());
  for (std::size_t k = 0; k < next.size(); ++k) {
    next[k] = theta[k] * std::exp(learning_rate * grad[k]);
    if (!std::isfinite(next[k]) || next[k] == 0.0) {
      throw NonFinite("theta component " + std::to_string(k) +
                      " left the representable range; lower the learning rate");
    }
  }
  return Theta(std::move(next));
}

std::pair<Theta, TrainReport> train(const TrainingSet& ts, const TrainConfig& config) {
  ts.validate();
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (config.max_epochs < 1) throw InvalidArgument("max_epochs must be at least 1");

  Theta theta = config.initial_theta.value_or(Theta::filled(ts.features.n_features(), -1.0));
  const std::vector<double> f_bar = empirical_feature_mean(ts);
  TrainReport report;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto t0 = Clock::now();
    const FeatureExpectation fe = model_feature_expectation(ts, theta, config);
    const std::vector<double> g = gradient(f_bar, fe.mean);
    const double update_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    const double norm = inf_norm(g);
    report.theta_history.push_back(theta.weights());
    report.grad_norm_history.push_back(norm);
    report.vi_seconds_per_sweep.push_back(fe.sweeps > 0 ? fe.vi_seconds / fe.sweeps : 0.0);
    report.vi_seconds_per_pass.push_back(fe.vi_seconds / static_cast<double>(ts.paths.size()));
    report.update_seconds.push_back(update_seconds);
    report.not_converged.push_back(fe.not_converged);
    if (!std::isfinite(norm)) throw NonFinite("gradient is not finite");
    if (norm < config.grad_tol) {
      report.converged = true;
      break;
    }
    std::vector<double> ascent(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) ascent[k] = -g[k];
    theta = update_theta(theta, ascent, config.learning_rate);
  }
  return {theta, report};
}

}  // namespace trajirl
