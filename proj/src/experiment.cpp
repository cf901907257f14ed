#include "trajirl/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>

#include "trajirl/dataset.hpp"
#include "trajirl/error.hpp"
#include "trajirl/rng.hpp"

namespace trajirl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t index, std::size_t gap) {
  CounterRng rng(seed, (static_cast<std::uint64_t>(index) << 20) ^ gap);
  return rng.next_u64();
}

Backup parse_backup(const std::string& s) {
  if (s == "softmax_exact") return Backup::softmax_exact;
  if (s == "softmax_paper") return Backup::softmax_paper;
  if (s == "hard_max") return Backup::hard_max;
  throw InvalidConfig("unknown backup '" + s + "'");
}

PolicyRule parse_rule(const std::string& s) {
  if (s == "q_minus_v") return PolicyRule::q_minus_v;
  if (s == "q_only") return PolicyRule::q_only;
  throw InvalidConfig("unknown policy rule '" + s + "'");
}

}  // namespace

Variant Variant::linear() {
  Variant v;
  v.method = Method::linear;
  return v;
}

Variant Variant::baseline_2d() {
  Variant v;
  v.method = Method::planar;
  v.backup = Backup::softmax_paper;
  v.rule = PolicyRule::q_minus_v;
  return v;
}

Variant Variant::baseline_3d() {
  Variant v = baseline_2d();
  v.method = Method::time_augmented;
  return v;
}

Variant Variant::proposed(double p, bool conv, int radius, double sigma) {
  Variant v;
  v.method = Method::planar;
  v.norm = DistanceNorm::lp(p);
  v.backup = Backup::hard_max;
  v.rule = PolicyRule::q_only;
  if (conv) v.kernel = GaussianKernel::make(radius, sigma);
  return v;
}

std::string Variant::label() const {
  switch (method) {
    case Method::linear:
      return "Linear";
    case Method::time_augmented:
      return "3D";
    case Method::planar:
      break;
  }
  if (!norm.p) return "2D";
  return fmt::format("proposed p={} {}", io::format_number(*norm.p),
                     kernel ? "w/ conv" : "w/o conv");
}

ExperimentConfig ExperimentConfig::from(const io::KeyValues& kv) {
  ExperimentConfig c;
  const std::string method = kv.get_or("method", "proposed");
  const bool conv = kv.flag("conv", false);
  const int radius = static_cast<int>(kv.integer("kernel_radius", 1));
  const double sigma = kv.number("kernel_sigma", 1.0);
  if (method == "linear") {
    c.variant = Variant::linear();
  } else if (method == "2d") {
    c.variant = Variant::baseline_2d();
  } else if (method == "3d") {
    c.variant = Variant::baseline_3d();
  } else if (method == "proposed") {
    c.variant = Variant::proposed(kv.number("p", 2.0), conv, radius, sigma);
  } else {
    throw InvalidConfig("unknown method '" + method + "'");
  }
  if (method != "proposed" && conv) {
    if (c.variant.method != Method::planar) throw InvalidConfig("blur needs a planar method");
    c.variant.kernel = GaussianKernel::make(radius, sigma);
  }
  if (method != "proposed" && kv.has("p")) c.variant.norm = DistanceNorm::lp(kv.number("p", 2.0));
  if (const auto b = kv.get("backup")) c.variant.backup = parse_backup(*b);
  if (const auto r = kv.get("policy")) c.variant.rule = parse_rule(*r);

  c.learning_rate = kv.number("learning_rate", c.learning_rate);
  c.max_epochs = static_cast<int>(kv.integer("max_epochs", c.max_epochs));
  c.grad_tol = kv.number("grad_tol", c.grad_tol);
  c.tol = kv.number("tol", c.tol);
  c.max_iters = static_cast<int>(kv.integer("max_iters", c.max_iters));

  const std::string mode = kv.get_or("mode", "det");
  if (mode == "det") {
    c.generation.mode = GenerationMode::deterministic;
  } else if (mode == "sto") {
    c.generation.mode = GenerationMode::stochastic;
  } else {
    throw InvalidConfig("mode must be det or sto");
  }
  c.generation.retries = static_cast<int>(kv.integer("retries", c.generation.retries));
  c.generation.budget_factor =
      static_cast<int>(kv.integer("budget_factor", c.generation.budget_factor));
  c.seed = static_cast<std::uint64_t>(kv.integer("seed", 0));
  c.generation.seed = c.seed;
  c.gap_fraction = kv.number("gap_fraction", c.gap_fraction);
  if (kv.has("gap_length")) c.gap_length = static_cast<std::size_t>(kv.integer("gap_length", 0));

  const std::string units = kv.get_or("mhd_units", "cells");
  if (units != "cells" && units != "raw") throw InvalidConfig("mhd_units must be cells or raw");
  c.raw_units = units == "raw";
  const std::string segment = kv.get_or("mhd_segment", "gap");
  if (segment != "gap" && segment != "whole") throw InvalidConfig("mhd_segment must be gap or whole");
  c.whole_trajectory = segment == "whole";

  if (c.generation.retries < 1) throw InvalidConfig("retries must be at least 1");
  if (c.generation.budget_factor < 1) throw InvalidConfig("budget_factor must be at least 1");
  if (!(c.learning_rate > 0.0)) throw InvalidConfig("learning_rate must be positive");
  if (c.max_epochs < 1) throw InvalidConfig("max_epochs must be at least 1");
  if (c.variant.method == Method::time_augmented && c.generation.mode == GenerationMode::stochastic) {
    throw InvalidConfig("stochastic generation is not available with the 3D method");
  }
  return c;
}

PlannerConfig planner_config(const ExperimentConfig& config) {
  PlannerConfig p;
  p.norm = config.variant.norm;
  p.backup = config.variant.backup;
  p.kernel = config.variant.kernel;
  p.max_iters = config.max_iters;
  p.tol = config.tol;
  p.exec = Exec::parallel;
  p.schedule = TimeSchedule::layered;
  return p;
}

TrainConfig train_config(const ExperimentConfig& config) {
  TrainConfig t;
  t.learning_rate = config.learning_rate;
  t.max_epochs = config.max_epochs;
  t.grad_tol = config.grad_tol;
  t.planner = planner_config(config);
  t.rule = config.variant.rule;
  t.time_augmented = config.variant.method == Method::time_augmented;
  t.exec = Exec::parallel;
  return t;
}

std::pair<Theta, TrainReport> train_variant(const GridSpec& spec, const FeatureMap& features,
                                            const std::vector<Trajectory>& trajectories,
                                            const ExperimentConfig& config) {
  if (config.variant.method == Method::linear) {
    return {Theta::filled(features.n_features(), -1.0), TrainReport{}};
  }
  const GridSpec plane = spec.with_horizon(std::nullopt);
  TrainingSet ts{plane, features, project_all(trajectories, plane)};
  return train(ts, train_config(config));
}

InterpolationResult interpolate_trajectory(const Trajectory& trajectory, const GridSpec& spec,
                                           const FeatureMap& features, const Theta& theta,
                                           const ExperimentConfig& config, std::size_t index) {
  if (config.variant.method == Method::linear) return {fill_linear(trajectory), 0};

  const GridSpec plane = spec.with_horizon(std::nullopt);
  const auto gaps = find_gaps(trajectory);
  InterpolationResult out{trajectory, 0};
  const PlannerConfig planner = [&] {
    PlannerConfig p = planner_config(config);
    p.exec = Exec::serial;
    return p;
  }();

  // last gap first so earlier row indices stay valid
  for (std::size_t g = gaps.size(); g-- > 0;) {
    const Gap& gap = gaps[g];
    const GapEndpoints ends = gap_endpoints(out.trajectory, gap, plane);
    GenerationSettings settings = config.generation;
    settings.seed = stream_seed(config.seed, index, g);

    GeneratedPath path{{ends.from}, false, 0};
    const bool feasible = ends.steps >= chebyshev(ends.from, ends.to) && ends.steps >= 1;
    if (feasible) {
      const GridSpec grid = config.variant.method == Method::time_augmented
                                ? plane.with_horizon(static_cast<int>(ends.steps) + 1)
                                : plane;
      const ValueArtifacts art = backward_pass(grid, ends.to, theta, features, planner);
      const Policy policy = make_policy(art, config.variant.rule, Exec::serial);
      path = generate_gap_path(out.trajectory, gap, policy, settings);
    }
    if (!path.reached_goal) ++out.unreached;
    out.trajectory = splice_gap(out.trajectory, gap, path, plane);
  }
  return out;
}

std::vector<InterpolationResult> interpolate_all(const std::vector<Trajectory>& trajectories,
                                                 const GridSpec& spec, const FeatureMap& features,
                                                 const Theta& theta,
                                                 const ExperimentConfig& config) {
  const auto n = static_cast<std::ptrdiff_t>(trajectories.size());
  std::vector<InterpolationResult> out(trajectories.size());
  std::vector<std::exception_ptr> errors(trajectories.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = interpolate_trajectory(trajectories[k], spec, features, theta, config, k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<Point2> segment_points(const Trajectory& trajectory, std::int64_t first,
                                   std::int64_t last, const GridSpec& spec, bool raw_units) {
  std::vector<Point2> out;
  for (const auto& p : trajectory.points) {
    if (!p.pos || p.t < first || p.t > last) continue;
    if (raw_units) {
      out.push_back(*p.pos);
    } else {
      out.push_back({(p.pos->x - spec.origin().x) / spec.cell_size().x,
                     (p.pos->y - spec.origin().y) / spec.cell_size().y});
    }
  }
  return out;
}

MhdSummary evaluate_predictions(const std::vector<Trajectory>& ground_truth,
                                const std::vector<Trajectory>& masked,
                                const std::vector<Trajectory>& predicted, const GridSpec& spec,
                                bool raw_units, bool whole_trajectory) {
  std::map<std::string, const Trajectory*> gt_by_id, pred_by_id;
  for (const auto& t : ground_truth) gt_by_id[t.id] = &t;
  for (const auto& t : predicted) pred_by_id[t.id] = &t;
  if (masked.size() != predicted.size()) {
    throw LengthMismatch(fmt::format("{} masked trajectories but {} predictions", masked.size(),
                                     predicted.size()));
  }

  std::vector<std::vector<Point2>> gt_segments, pred_segments;
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  for (const auto& m : masked) {
    const auto g = gt_by_id.find(m.id);
    const auto p = pred_by_id.find(m.id);
    if (g == gt_by_id.end() || p == pred_by_id.end()) {
      throw LengthMismatch("trajectory " + m.id + " is missing from ground truth or predictions");
    }
    if (whole_trajectory) {
      gt_segments.push_back(segment_points(*g->second, lo, hi, spec, raw_units));
      pred_segments.push_back(segment_points(*p->second, lo, hi, spec, raw_units));
      continue;
    }
    for (const Gap& gap : find_gaps(m)) {
      const std::int64_t t0 = m.points[gap.begin - 1].t;
      const std::int64_t t1 = m.points[gap.end].t;
      gt_segments.push_back(segment_points(*g->second, t0, t1, spec, raw_units));
      pred_segments.push_back(segment_points(*p->second, t0, t1, spec, raw_units));
    }
  }
  return evaluate_interpolations(gt_segments, pred_segments);
}

std::string format_theta(const Theta& theta) {
  std::string out;
  for (double w : theta.weights()) out += io::format_number(w) + "\n";
  return out;
}

Theta parse_theta(const std::string& text) {
  std::vector<double> w;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      w.push_back(std::stod(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::logic_error&) {
      throw ParseError("theta entry is not a number: '" + line + "'", line_no);
    }
  }
  if (w.empty()) throw ParseError("theta file is empty", 1);
  try {
    return Theta(std::move(w));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 1);
  }
}

std::string format_report(const TrainReport& report) {
  std::string out = "epoch,grad_norm,not_converged,theta\n";
  for (std::size_t e = 0; e < report.epochs(); ++e) {
    std::string theta;
    for (std::size_t k = 0; k < report.theta_history[e].size(); ++k) {
      theta += (k ? ";" : "") + io::format_number(report.theta_history[e][k]);
    }
    out += fmt::format("{},{},{},{}\n", e, io::format_number(report.grad_norm_history[e]),
                       report.not_converged[e], theta);
  }
  return out;
}

std::string format_timing(const TrainReport& report) {
  std::string out = "epoch,vi_seconds_per_sweep,vi_seconds_per_pass,update_seconds\n";
  for (std::size_t e = 0; e < report.epochs(); ++e) {
    out += fmt::format("{},{},{},{}\n", e, io::format_number(report.vi_seconds_per_sweep[e]),
                       io::format_number(report.vi_seconds_per_pass[e]),
                       io::format_number(report.update_seconds[e]));
  }
  return out;
}

std::vector<Variant> table_variants() {
  return {Variant::baseline_2d(),          Variant::baseline_3d(),
          Variant::proposed(2.0, false),   Variant::proposed(2.0, true),
          Variant::proposed(3.0, false),   Variant::proposed(3.0, true)};
}

namespace {

struct Timing {
  double pass = 0.0;
  double sweep = 0.0;
  int sweeps = 0;
  std::vector<double> trace;
};

Timing time_backward(const GridSpec& plane, const FeatureMap& features, const Theta& theta,
                     const Variant& variant, const BenchOptions& options) {
  PlannerConfig cfg;
  cfg.norm = variant.norm;
  cfg.backup = variant.backup;
  cfg.kernel = variant.kernel;
  cfg.schedule = TimeSchedule::full_volume;
  cfg.record_sweep_times = options.traces;
  const State goal{plane.width() / 2, plane.height() / 2, 0};
  const GridSpec grid = variant.method == Method::time_augmented
                            ? plane.with_horizon(options.horizon)
                            : plane;
  const auto t0 = Clock::now();
  const ValueArtifacts art = backward_pass(grid, goal, theta, features, cfg);
  Timing t;
  t.pass = seconds_since(t0);
  t.sweeps = std::max(art.iterations_run, 1);
  t.sweep = t.pass / t.sweeps;
  t.trace = art.sweep_seconds;
  return t;
}

}  // namespace

BenchResult run_benchmark(const BenchOptions& options, std::vector<Variant> variants) {
  if (variants.empty()) variants = table_variants();
  if (options.repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  const GridSpec plane = GridSpec::unit(options.width, options.height);

  CounterRng rng(options.seed, 0);
  std::vector<double> noise(plane.cells());
  for (double& v : noise) v = rng.uniform();
  const FeatureMap features(
      plane.width(), plane.height(),
      {constant_channel(plane), distance_channel(plane, {plane.width() / 2, plane.height() / 2, 0}),
       noise},
      {"constant", "distance", "noise"});
  const Theta theta = Theta::filled(features.n_features(), -1.0);

  // demonstrations of horizon - 1 moves along straight lines
  const int moves = std::max(1, std::min(options.horizon - 1,
                                         std::min(plane.width(), plane.height()) - 1));
  std::vector<std::vector<State>> demos;
  for (int d = 0; d < options.demos; ++d) {
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(plane.width() - moves)));
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(plane.height() - moves)));
    const auto cells = supercover({x0 + 0.5, y0 + 0.5}, {x0 + moves + 0.5, y0 + moves / 2 + 0.5});
    std::vector<State> path;
    for (const auto& [x, y] : cells) path.push_back({x, y, 0});
    demos.push_back(std::move(path));
  }
  const TrainingSet ts{plane, features, demos};

  BenchResult result;
  for (const Variant& variant : variants) {
    BenchRow row;
    row.method = variant.label();
    row.variant = variant;

    TrainConfig tc;
    tc.planner.norm = variant.norm;
    tc.planner.backup = variant.backup;
    tc.planner.kernel = variant.kernel;
    tc.planner.schedule = TimeSchedule::full_volume;
    tc.planner.exec = Exec::parallel;
    tc.exec = Exec::serial;
    tc.rule = variant.rule;
    tc.time_augmented = variant.method == Method::time_augmented;

    time_backward(plane, features, theta, variant, options);  // warm-up
    model_feature_expectation(ts, theta, tc);
    std::vector<double> passes, sweeps, updates;
    for (int r = 0; r < options.repetitions; ++r) {
      Timing t = time_backward(plane, features, theta, variant, options);
      passes.push_back(t.pass);
      sweeps.push_back(t.sweep);
      row.sweeps = t.sweeps;
      if (r == 0) row.sweep_trace = std::move(t.trace);
      const auto t0 = Clock::now();
      model_feature_expectation(ts, theta, tc);
      updates.push_back(seconds_since(t0));
    }
    row.vi_pass_seconds = median(passes);
    row.vi_sweep_seconds = median(sweeps);
    row.update_seconds = median(updates);
    result.rows.push_back(std::move(row));
  }

  const auto base = std::find_if(result.rows.begin(), result.rows.end(), [](const BenchRow& r) {
    return r.variant.method == Method::planar && r.variant.norm.p == 2.0 && !r.variant.kernel;
  });
  const BenchRow& ref = base != result.rows.end() ? *base : result.rows.front();
  const double ref_vi = ref.vi_pass_seconds;
  const double ref_update = ref.update_seconds;
  for (auto& row : result.rows) {
    row.vi_ratio = row.vi_pass_seconds / ref_vi;
    row.update_ratio = row.update_seconds / ref_update;
  }
  return result;
}

namespace {

std::string optional_number(double v) { return std::isnan(v) ? "" : io::format_number(v); }

}  // namespace

std::string BenchResult::table_csv() const {
  std::string out = "method,mhd_det,mhd_sto,vi_time,ratio,update_time,ratio\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.6g},{:.4g},{:.6g},{:.4g}\n", r.method, optional_number(r.mhd_det),
                       optional_number(r.mhd_sto), r.vi_pass_seconds, r.vi_ratio, r.update_seconds,
                       r.update_ratio);
  }
  return out;
}

std::string BenchResult::detail_csv() const {
  std::string out = "method,sweeps,vi_seconds_per_sweep,vi_seconds_per_pass,vi_ratio_per_pass,"
                    "update_seconds,update_ratio\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.6g},{:.6g},{:.4g},{:.6g},{:.4g}\n", r.method, r.sweeps,
                       r.vi_sweep_seconds, r.vi_pass_seconds, r.vi_ratio, r.update_seconds,
                       r.update_ratio);
  }
  return out;
}

std::string BenchResult::trace_csv() const {
  std::string out = "method,sweep,seconds\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.sweep_trace.size(); ++k) {
      out += fmt::format("{},{},{:.6g}\n", r.method, k, r.sweep_trace[k]);
    }
  }
  return out;
}

}  // namespace trajirl
