// One PASS/FAIL line per acceptance criterion. `--only N` runs a single one.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli_pipeline.hpp"
#include "oracle/enumeration.hpp"
#include "support.hpp"
#include "trajirl/dataset.hpp"
#include "trajirl/experiment.hpp"
#include "trajirl/irl.hpp"
#include "trajirl/metrics.hpp"
#include "trajirl/planner.hpp"
#include "trajirl/visitation.hpp"

using namespace trajirl;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Outcome gradient_oracle() {
  const auto t0 = Clock::now();
  const GridSpec spec = GridSpec::unit(4, 4);
  const FeatureMap f = support::three_channel_features(spec);
  const Theta theta({-0.6, -1.3, -0.4});
  // horizon 5: six states per demonstration
  const std::vector<std::vector<State>> demos{
      {{0, 0, 0}, {1, 1, 0}, {2, 1, 0}, {2, 2, 0}, {3, 2, 0}, {3, 2, 0}},
      {{0, 3, 0}, {1, 3, 0}, {1, 2, 0}, {2, 2, 0}, {3, 3, 0}, {3, 2, 0}},
      {{1, 0, 0}, {1, 1, 0}, {2, 1, 0}, {3, 1, 0}, {3, 1, 0}, {3, 2, 0}},
  };
  TrainConfig c;
  c.planner.backup = Backup::softmax_exact;
  c.planner.exec = Exec::serial;
  c.rule = PolicyRule::q_only;
  c.time_augmented = true;
  const TrainingSet ts{spec, f, demos};
  const auto g = gradient(empirical_feature_mean(ts), model_feature_expectation(ts, theta, c).mean);

  auto ll = [&](const std::vector<double>& w) {
    double total = 0.0;
    for (const auto& d : demos) {
      const oracle::EnumerationProblem p{spec, 5, d.front(), d.back(), Theta(w), f,
                                         DistanceNorm::none(), oracle::PathSet::exact_length};
      total += oracle::exact_log_likelihood(p, {d});
    }
    return total / static_cast<double>(demos.size());
  };
  const double h = 1e-5;
  double diff = 0.0, scale = 0.0;
  std::string pairs;
  for (std::size_t k = 0; k < 3; ++k) {
    auto plus = theta.weights(), minus = theta.weights();
    plus[k] += h;
    minus[k] -= h;
    const double fd = (ll(plus) - ll(minus)) / (2 * h);
    diff = std::max(diff, std::abs(g[k] - fd));
    scale = std::max(scale, std::abs(fd));
    pairs += fmt::format(" ({:.6g} vs {:.6g})", g[k], fd);
  }
  // max-norm relative error; the constant channel's component is zero
  const double worst = diff / scale;
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 10.0,
          fmt::format("max relative error {:.3g}, {:.2f} s;{}", worst, secs, pairs)};
}

Outcome soft_value_oracle() {
  const GridSpec plane = GridSpec::unit(4, 4);
  const FeatureMap f = support::three_channel_features(plane);
  const Theta theta({-0.4, -0.9, -0.6});
  const State goal{3, 2, 0};
  double worst = 0.0;

  // planar: six sweeps from -inf cover first-hit paths of at most six moves
  PlannerConfig c;
  c.backup = Backup::softmax_exact;
  c.exec = Exec::serial;
  c.norm = DistanceNorm::lp(2);
  c.max_iters = 6;
  c.tol = 1e-300;
  const auto art = backward_pass(plane, goal, theta, f, c);
  for (std::size_t i = 0; i < plane.cells(); ++i) {
    const State s = plane.state(i);
    if (s == goal) continue;
    const oracle::EnumerationProblem p{plane, 6, s, goal, theta, f, c.norm,
                                       oracle::PathSet::first_hit_within};
    worst = std::max(worst, std::abs(art.v[i] - oracle::log_partition(p)));
  }

  // time-augmented: exactly H-1-z moves to the goal on the last layer
  const int horizon = 6;
  c.schedule = TimeSchedule::layered;
  c.norm = DistanceNorm::none();
  const auto art3 = backward_pass(plane.with_horizon(horizon), goal, theta, f, c);
  bool inf_ok = true;
  for (int z = 0; z < horizon - 1; ++z) {
    for (std::size_t i = 0; i < plane.cells(); ++i) {
      const State s = plane.state(i);
      const oracle::EnumerationProblem p{plane, horizon - 1 - z, s, goal, theta, f, c.norm,
                                         oracle::PathSet::exact_length};
      const double want = oracle::log_partition(p);
      const double got = art3.value({s.x, s.y, z});
      if (std::isinf(want) || std::isinf(got)) {
        inf_ok = inf_ok && want == got;
      } else {
        worst = std::max(worst, std::abs(got - want));
      }
    }
  }
  return {worst <= 1e-6 && inf_ok, fmt::format("max |V - logsumexp| {:.3g}", worst)};
}

Outcome visitation_oracle() {
  std::mt19937 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GridSpec spec = GridSpec::unit(3, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Policy policy{spec, std::vector<double>(spec.num_states() * kNumActions)};
    for (std::size_t s = 0; s < spec.num_states(); ++s) {
      double sum = 0.0;
      for (int a = 0; a < kNumActions; ++a) sum += policy.probs[s * kNumActions + a] = u(gen);
      for (int a = 0; a < kNumActions; ++a) policy.probs[s * kNumActions + a] /= sum;
    }
    const State start{0, trial % 3, 0}, goal{2, (trial + 1) % 3, 0};
    const auto want = oracle::brute_force_visitation(policy, start, goal, 5);
    for (Exec exec : {Exec::serial, Exec::parallel}) {
      const auto got = forward_pass(policy, spec, start, goal, 5, {false, exec});
      for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got.d[i] - want[i]));
    }
  }
  return {worst <= 1e-10, fmt::format("max |D - enumeration| {:.3g}", worst)};
}

Outcome policy_equivalence() {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(-40.0, 0.0);
  std::bernoulli_distribution missing(0.15);
  int equal = 0;
  for (int k = 0; k < 100; ++k) {
    const int w = 3 + k % 5, h = 2 + k % 4;
    ValueArtifacts a{GridSpec::unit(w, h), State{0, 0, 0}, {}, {}, 0, true, {}};
    for (std::size_t s = 0; s < a.spec.num_states(); ++s) {
      for (int j = 0; j < kNumActions; ++j) a.q.push_back(missing(gen) ? kNegInf : u(gen));
      a.v.push_back(backup_value(a.q.data() + s * kNumActions, Backup::softmax_exact));
    }
    const Policy p = make_policy(a, PolicyRule::q_minus_v);
    const Policy q = make_policy(a, PolicyRule::q_only);
    equal += p.probs == q.probs;
  }
  return {equal == 100, fmt::format("{}/100 fixtures identical", equal)};
}

Outcome distance_modifier() {
  const State o{2, 2, 0};
  const double d2 = dist_p(o, {3, 3, 0}, 2.0), d3 = dist_p(o, {1, 1, 0}, 3.0);
  bool ok = std::abs(d2 - std::sqrt(2.0)) <= 1e-12 && std::abs(d3 - std::cbrt(2.0)) <= 1e-12;
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> neg(-10.0, -1e-3);
  const GridSpec spec = GridSpec::unit(5, 5);
  const FeatureMap f = support::features_of(spec, {constant_channel(spec)});
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const Theta theta({neg(gen)});
    for (double p : {1.5, 2.0, 3.0}) {
      const auto norm = DistanceNorm::lp(p);
      for (int a = 0; a < kNumActions; a += 2) {
        const double axis = transition_reward(o, successor(o, kActions[a], spec), theta, f, norm);
        const double diag = transition_reward(o, successor(o, kActions[a + 1], spec), theta, f, norm);
        violations += !(axis < 0.0 && std::abs(diag) < std::abs(axis));
      }
    }
  }
  ok = ok && violations == 0;
  return {ok, fmt::format("dist_2 {:.15g}, dist_3 {:.15g}, {} diagonal violations", d2, d3,
                          violations)};
}

Outcome convolution_degeneracy() {
  // radius 0 against plain VI, every backup, on a non-uniform map
  const GridSpec small = GridSpec::unit(20, 15);
  const FeatureMap f3 = support::three_channel_features(small);
  bool identical = true;
  for (Backup b : {Backup::hard_max, Backup::softmax_paper, Backup::softmax_exact}) {
    for (Exec e : {Exec::serial, Exec::parallel}) {
      PlannerConfig plain;
      plain.backup = b;
      plain.exec = e;
      plain.norm = DistanceNorm::lp(2);
      PlannerConfig blurred = plain;
      blurred.kernel = GaussianKernel::make(0, 1.0);
      const auto x = backward_pass(small, {13, 4, 0}, Theta({-0.3, -0.8, -0.5}), f3, plain);
      const auto y = backward_pass(small, {13, 4, 0}, Theta({-0.3, -0.8, -0.5}), f3, blurred);
      identical = identical && x.v == y.v && x.q == y.q && x.iterations_run == y.iterations_run;
    }
  }

  const GridSpec spec = GridSpec::unit(64, 64);
  const FeatureMap f = support::features_of(spec, {constant_channel(spec)});
  PlannerConfig plain;
  plain.norm = DistanceNorm::lp(2);
  plain.tol = 1e-6;
  plain.max_iters = 5000;
  PlannerConfig blurred = plain;
  blurred.kernel = GaussianKernel::make(1, 1.0);
  const auto x = backward_pass(spec, {32, 32, 0}, Theta({-1.0}), f, plain);
  const auto y = backward_pass(spec, {32, 32, 0}, Theta({-1.0}), f, blurred);
  const bool fewer = y.converged && y.iterations_run < x.iterations_run;
  return {identical && fewer,
          fmt::format("radius 0 bitwise {}, sweeps plain {} (converged {}) vs radius 1 {} (converged {})",
                      identical ? "yes" : "no", x.iterations_run, x.converged, y.iterations_run,
                      y.converged)};
}

Outcome table_ordering() {
  const std::vector<Variant> variants{Variant::baseline_2d(), Variant::baseline_3d(),
                                      Variant::proposed(2, false), Variant::proposed(3, false),
                                      Variant::proposed(2, true), Variant::proposed(3, true)};
  const int seeds = 5;
  double linear = 0.0;
  std::vector<double> det(variants.size(), 0.0), sto(variants.size(), 0.0);
  for (int seed = 1; seed <= seeds; ++seed) {
    SynthConfig sc;
    sc.seed = static_cast<std::uint64_t>(seed);
    const SynthDataset ds = synthesize_dataset(sc);
    const MaskedSet masked = mask_gaps(ds.test, {0.3, std::nullopt, sc.seed});
    auto score = [&](const ExperimentConfig& ec, const Theta& theta) {
      std::vector<Trajectory> pred;
      for (auto& r : interpolate_all(masked.trajectories, ds.spec, ds.features, theta, ec)) {
        pred.push_back(std::move(r.trajectory));
      }
      return evaluate_predictions(ds.test, masked.trajectories, pred, ds.spec, false, false).mean /
             seeds;
    };
    ExperimentConfig lin;
    lin.variant = Variant::linear();
    linear += score(lin, Theta::filled(ds.features.n_features(), -1.0));
    for (std::size_t i = 0; i < variants.size(); ++i) {
      ExperimentConfig ec;
      ec.variant = variants[i];
      ec.seed = sc.seed;
      const Theta theta = train_variant(ds.spec, ds.features, ds.train, ec).first;
      det[i] += score(ec, theta);
      if (variants[i].method == Method::time_augmented) continue;
      ec.generation.mode = GenerationMode::stochastic;
      sto[i] += score(ec, theta);
    }
  }
  bool beats_linear = true, sto_better = true;
  std::string detail = fmt::format("Linear {:.3f}", linear);
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const bool planar = variants[i].method == Method::planar;
    const double best = planar ? std::min(det[i], sto[i]) : det[i];
    beats_linear = beats_linear && best < linear;
    if (planar && variants[i].rule == PolicyRule::q_only && !variants[i].kernel &&
        variants[i].norm.p == 2.0) {
      sto_better = sto[i] <= det[i];
    }
    detail += fmt::format("; {} det {:.3f}", variants[i].label(), det[i]);
    if (planar) detail += fmt::format(" sto {:.3f}", sto[i]);
  }
  detail += fmt::format(" | (a) IRL beats linear: {}, (b) sto <= det: {}", beats_linear ? "yes" : "no",
                        sto_better ? "yes" : "no");
  return {beats_linear && sto_better, detail};
}

Outcome timing_ordering() {
  const auto t0 = Clock::now();
  BenchOptions o;
  o.width = 64;
  o.height = 64;
  o.horizon = 16;
  o.repetitions = 5;
  const BenchResult r = run_benchmark(o);
  const double secs = seconds_since(t0);
  const BenchRow *p2 = nullptr, *d3 = nullptr, *b2 = nullptr;
  for (const auto& row : r.rows) {
    if (row.variant.method == Method::time_augmented) d3 = &row;
    if (row.variant.method == Method::planar && row.variant.backup == Backup::softmax_paper) b2 = &row;
    if (row.variant.backup == Backup::hard_max && row.variant.method == Method::planar &&
        !row.variant.kernel && row.variant.norm.p == 2.0) {
      p2 = &row;
    }
  }
  if (!p2 || !d3 || !b2) return {false, "benchmark rows missing"};
  const double pass_ratio = d3->vi_pass_seconds / p2->vi_pass_seconds;
  const bool ok = pass_ratio >= 5.0 && p2->vi_sweep_seconds <= b2->vi_sweep_seconds && secs < 300.0;
  return {ok, fmt::format("3D/2D per pass {:.1f}x, per sweep hard max {:.3g} s vs softmax {:.3g} s, "
                          "benchmark {:.1f} s",
                          pass_ratio, p2->vi_sweep_seconds, b2->vi_sweep_seconds, secs)};
}

Outcome mhd_properties() {
  const std::vector<Point2> a{{0, 0}, {1, 0}, {2, 0}}, b{{0, 1}, {1, 1}, {2, 1}}, c{{0, 5}};
  bool ok = mhd(a, a) == 0.0 && mhd(a, b) == 1.0 && mhd(std::vector<Point2>{{0, 0}}, c) == 5.0;
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_int_distribution<int> len(1, 30);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Point2> x(static_cast<std::size_t>(len(gen))), y(static_cast<std::size_t>(len(gen)));
    for (auto& p : x) p = {u(gen), u(gen)};
    for (auto& p : y) p = {u(gen), u(gen)};
    bad += !(mhd(x, y) == mhd(y, x) && mhd(x, x) == 0.0 && mhd(x, y) >= 0.0);
  }
  ok = ok && bad == 0;
  return {ok, fmt::format("examples exact, {} property violations in 1000 pairs", bad)};
}

Outcome cli_determinism() {
  support::TempDir first("acc_a"), second("acc_b");
  const auto x = support::run_pipeline(first.path(), 11);
  const auto y = support::run_pipeline(second.path(), 11);
  if (x.empty() || y.empty()) return {false, "pipeline step failed"};
  // paths of the run directory appear in no file, so contents compare directly
  int differing = 0;
  for (const auto& [name, content] : x) differing += !y.count(name) || y.at(name) != content;
  return {differing == 0 && x.size() == y.size(),
          fmt::format("{} files compared, {} differ", x.size(), differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient matches finite differences", gradient_oracle},
      {"soft values match enumeration", soft_value_oracle},
      {"visitation matches enumeration", visitation_oracle},
      {"policy rules agree", policy_equivalence},
      {"distance modifier", distance_modifier},
      {"convolution degeneracy and acceleration", convolution_degeneracy},
      {"synthetic MHD ordering", table_ordering},
      {"timing ordering", timing_ordering},
      {"MHD examples and properties", mhd_properties},
      {"CLI pipeline determinism", cli_determinism},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only != 0 && only != n) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    fmt::print("{} {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first, o.detail);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
