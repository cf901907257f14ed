#include "trajirl/planner.hpp"

#include <chrono>
#include <cmath>

#include "trajirl/error.hpp"

namespace trajirl {

GaussianKernel GaussianKernel::make(int radius, double sigma) {
  if (radius < 0) throw InvalidArgument("kernel radius must be non-negative");
  if (!(sigma > 0.0)) throw InvalidArgument("kernel sigma must be positive");
  GaussianKernel k;
  k.radius = radius;
  k.sigma = sigma;
  const int side = 2 * radius + 1;
  k.weights.resize(static_cast<std::size_t>(side * side));
  double total = 0.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k.weights[static_cast<std::size_t>((dy + radius) * side + dx + radius)] = w;
      total += w;
    }
  }
  for (double& w : k.weights) w /= total;
  return k;
}

namespace {

using Clock = std::chrono::steady_clock;

double max_change(std::span<const double> before, std::span<const double> after) {
  double change = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const bool fa = std::isfinite(before[i]);
    const bool fb = std::isfinite(after[i]);
    if (fa != fb) return std::numeric_limits<double>::infinity();
    if (fa) change = std::max(change, std::abs(after[i] - before[i]));
  }
  return change;
}

ValueArtifacts plan_planar(const GridSpec& spec, State goal, const TransitionModel& tm,
                           const std::vector<double>& reward, const PlannerConfig& config) {
  const std::size_t cells = spec.cells();
  const std::size_t g = spec.cell_index(goal.x, goal.y);
  const int max_iters =
      config.max_iters > 0 ? config.max_iters : 10 * (spec.width() + spec.height());

  ValueArtifacts out{spec, State{goal.x, goal.y, 0}, std::vector<double>(cells * kNumActions),
                     std::vector<double>(cells, kNegInf), 0, false, {}};
  std::vector<double> next_v(cells);
  std::vector<double> blurred(config.kernel ? cells : 0);

  for (int it = 1; it <= max_iters; ++it) {
    const auto t0 = Clock::now();
    out.v[g] = 0.0;
    kernels::backup_layer(config.exec, {tm.table(), reward, out.v, config.backup, false}, out.q,
                          next_v);
    if (config.kernel) {
      kernels::convolve(config.exec, next_v, spec.width(), spec.height(), *config.kernel,
                        blurred);
      next_v.swap(blurred);
    }
    next_v[g] = 0.0;
    const double change = max_change(out.v, next_v);
    out.v.swap(next_v);
    out.iterations_run = it;
    if (config.record_sweep_times) {
      out.sweep_seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    if (change < config.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

ValueArtifacts plan_time_augmented(const GridSpec& spec, State goal, const TransitionModel& tm,
                                   const std::vector<double>& reward,
                                   const PlannerConfig& config) {
  const int horizon = *spec.horizon();
  const std::size_t cells = spec.cells();
  const std::size_t n_states = spec.num_states();
  const State goal3{goal.x, goal.y, horizon - 1};
  const std::size_t g = spec.index(goal3);

  ValueArtifacts out{spec, goal3, std::vector<double>(n_states * kNumActions),
                     std::vector<double>(n_states, kNegInf), 0, true, {}};
  const std::span<const double> no_successor;

  auto layer_q = [&](std::size_t z) {
    return std::span<double>(out.q).subspan(z * cells * kNumActions, cells * kNumActions);
  };

  if (config.schedule == TimeSchedule::layered) {
    const auto t0 = Clock::now();
    for (int z = horizon - 1; z >= 0; --z) {
      const auto zu = static_cast<std::size_t>(z);
      const bool terminal = z == horizon - 1;
      const std::span<const double> v_next =
          terminal ? no_successor : std::span<const double>(out.v).subspan((zu + 1) * cells, cells);
      kernels::backup_layer(config.exec, {tm.table(), reward, v_next, config.backup, terminal},
                            layer_q(zu), std::span<double>(out.v).subspan(zu * cells, cells));
      if (terminal) out.v[g] = 0.0;
    }
    out.iterations_run = horizon;
    if (config.record_sweep_times) {
      const double total = std::chrono::duration<double>(Clock::now() - t0).count();
      out.sweep_seconds.assign(static_cast<std::size_t>(horizon), total / horizon);
    }
    return out;
  }

  std::vector<double> next_v(n_states);
  for (int n = 1; n <= horizon; ++n) {
    const auto t0 = Clock::now();
    out.v[g] = 0.0;
    for (int z = 0; z < horizon; ++z) {
      const auto zu = static_cast<std::size_t>(z);
      const bool terminal = z == horizon - 1;
      const std::span<const double> v_next =
          terminal ? no_successor : std::span<const double>(out.v).subspan((zu + 1) * cells, cells);
      kernels::backup_layer(config.exec, {tm.table(), reward, v_next, config.backup, terminal},
                            layer_q(zu), std::span<double>(next_v).subspan(zu * cells, cells));
    }
    next_v[g] = 0.0;
    out.v.swap(next_v);
    out.iterations_run = n;
    if (config.record_sweep_times) {
      out.sweep_seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
  }
  return out;
}

}  // namespace

ValueArtifacts backward_pass(const GridSpec& spec, State goal, const Theta& theta,
                             const FeatureMap& features, const PlannerConfig& config) {
  if (!spec.contains_cell(goal.x, goal.y)) throw OutOfBounds("goal outside grid");
  if (config.max_iters < 0) throw InvalidArgument("max_iters must be positive");
  if (!(config.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (spec.time_augmented() && config.kernel) {
    throw InvalidConfig("convolutional value iteration is only defined on planar grids");
  }
  const GridSpec plane = spec.with_horizon(std::nullopt);
  const TransitionModel tm(plane);
  const std::vector<double> reward = transition_reward_table(tm, theta, features, config.norm);
  return spec.time_augmented() ? plan_time_augmented(spec, goal, tm, reward, config)
                               : plan_planar(spec, goal, tm, reward, config);
}

Policy make_policy(const ValueArtifacts& artifacts, PolicyRule rule, Exec exec) {
  Policy policy{artifacts.spec, std::vector<double>(artifacts.q.size())};
  kernels::normalize_rows(exec, {artifacts.q, policy.probs});
  if (rule == PolicyRule::q_minus_v) {
    // exp(Q - V) is undefined where V = -inf; such rows are uniform
    for (std::size_t s = 0; s < artifacts.v.size(); ++s) {
      if (artifacts.v[s] == kNegInf) {
        std::fill_n(policy.probs.begin() + static_cast<std::ptrdiff_t>(s * kNumActions),
                    kNumActions, 1.0 / kNumActions);
      }
    }
  }
  return policy;
}

std::vector<double> convolve_v(std::span<const double> v, int width, int height,
                               const GaussianKernel& kernel, Exec exec) {
  if (v.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionMismatch("value field does not match the grid size");
  }
  std::vector<double> out(v.size());
  kernels::convolve(exec, v, width, height, kernel, out);
  return out;
}

}  // namespace trajirl
