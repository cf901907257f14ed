#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "trajirl/dataset.hpp"
#include "trajirl/error.hpp"
#include "trajirl/experiment.hpp"
#include "trajirl/io.hpp"

namespace fs = std::filesystem;
using namespace trajirl;

namespace {

constexpr int kValidationError = 1;
constexpr int kIoError = 2;

/// Config file plus flag overrides shared by every subcommand.
struct Settings {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;

  io::KeyValues resolve() const {
    io::KeyValues kv;
    if (!config_path.empty()) kv = io::KeyValues::read(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw InvalidConfig("--set expects key=value, got '" + s + "'");
      kv.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [k, v] : flags) kv.set(k, v);
    return kv;
  }

  fs::path base_dir() const {
    return config_path.empty() ? fs::path(".") : fs::path(config_path).parent_path();
  }
};

void add_common(CLI::App* sub, Settings& s) {
  sub->add_option("-c,--config", s.config_path, "key = value config file");
  sub->add_option("--set", s.sets, "override a config key (key=value), repeatable");
}

void add_flag(CLI::App* sub, Settings& s, const std::string& name, const std::string& key,
              const std::string& help) {
  sub->add_option_function<std::string>(
      name, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

void add_variant_flags(CLI::App* sub, Settings& s) {
  add_flag(sub, s, "--method", "method", "linear | 2d | 3d | proposed");
  add_flag(sub, s, "--p", "p", "distance norm exponent (2 or 3)");
  add_flag(sub, s, "--conv", "conv", "Gaussian blur of V: on | off");
  add_flag(sub, s, "--backup", "backup", "softmax_exact | softmax_paper | hard_max");
  add_flag(sub, s, "--policy", "policy", "q_minus_v | q_only");
}

struct Loaded {
  io::KeyValues kv;
  GridSpec spec;
  FeatureMap features;
  ExperimentConfig config;
};

Loaded load(const Settings& s) {
  io::KeyValues kv = s.resolve();
  GridSpec spec = io::grid_from_config(kv);
  FeatureMap features = io::features_from_config(kv, spec, s.base_dir());
  ExperimentConfig config = ExperimentConfig::from(kv);
  return {std::move(kv), spec, std::move(features), std::move(config)};
}

int run_train(const Settings& s, const std::string& data, const std::string& theta_out,
              const std::string& report_out, const std::string& timing_out, long n_test,
              const std::string& test_out) {
  const Loaded l = load(s);
  std::optional<std::size_t> split;
  if (n_test >= 0) split = static_cast<std::size_t>(n_test);
  const Dataset ds = load_dataset(data, l.spec, split, l.config.seed);
  if (!test_out.empty()) io::write_trajectories(test_out, ds.test);

  auto [theta, report] = train_variant(l.spec, l.features, ds.train, l.config);
  io::write_text(theta_out, format_theta(theta));
  if (!report_out.empty()) io::write_text(report_out, format_report(report));
  if (!timing_out.empty()) io::write_text(timing_out, format_timing(report));
  int not_converged = 0;
  for (int n : report.not_converged) not_converged += n;
  std::cerr << fmt::format("{}: {} epochs, |grad|_inf {}, converged {}", l.config.variant.label(),
                           report.epochs(),
                           report.epochs() ? io::format_number(report.grad_norm_history.back()) : "-",
                           report.converged ? "yes" : "no");
  if (not_converged) std::cerr << fmt::format(", {} backward passes hit max_iters", not_converged);
  std::cerr << "\n";
  return 0;
}

int run_interpolate(const Settings& s, const std::string& input, const std::string& theta_path,
                    const std::string& out, const std::string& svg, const std::string& gt_path) {
  const Loaded l = load(s);
  const auto masked = io::read_trajectories(input);
  check_trajectories(masked, l.spec);
  const Theta theta = l.config.variant.method == Method::linear
                          ? Theta::filled(l.features.n_features(), -1.0)
                          : parse_theta(io::read_text(theta_path));
  if (theta.size() != l.features.n_features()) {
    throw DimensionMismatch(fmt::format("theta has {} weights for {} feature channels",
                                        theta.size(), l.features.n_features()));
  }
  const auto results = interpolate_all(masked, l.spec, l.features, theta, l.config);
  std::vector<Trajectory> completed;
  int unreached = 0;
  for (const auto& r : results) {
    completed.push_back(r.trajectory);
    unreached += r.unreached;
  }
  io::write_trajectories(out, completed);
  if (unreached) std::cerr << fmt::format("{} gaps bridged after the rollout missed the anchor\n", unreached);

  if (!svg.empty()) {
    std::vector<Trajectory> truth;
    if (!gt_path.empty()) truth = io::read_trajectories(gt_path);
    const fs::path base(svg);
    for (std::size_t i = 0; i < completed.size(); ++i) {
      std::vector<LabeledTrack> tracks;
      for (const auto& t : truth) {
        if (t.id == completed[i].id) tracks.push_back({"gt", known_positions(t)});
      }
      tracks.push_back({"input", known_positions(masked[i])});
      tracks.push_back({l.config.variant.label(), known_positions(completed[i])});
      const fs::path file = completed.size() == 1
                                ? base
                                : base.parent_path() / fmt::format("{}_{}{}", base.stem().string(),
                                                                   completed[i].id,
                                                                   base.extension().string());
      emit_plot(tracks, file, completed[i].id);
    }
  }
  return 0;
}

int run_evaluate(const Settings& s, const std::string& gt_path, const std::string& masked_path,
                 const std::vector<std::string>& preds, const std::string& out) {
  const io::KeyValues kv = s.resolve();
  const GridSpec spec = io::grid_from_config(kv);
  const ExperimentConfig config = ExperimentConfig::from(kv);
  const auto gt = io::read_trajectories(gt_path);
  const auto masked = io::read_trajectories(masked_path);
  std::string csv = "method,mhd_mean,mhd_std\n";
  for (const auto& p : preds) {
    std::string label = p, path = p;
    if (const auto eq = p.find('='); eq != std::string::npos) {
      label = p.substr(0, eq);
      path = p.substr(eq + 1);
    }
    const auto predicted = io::read_trajectories(path);
    const MhdSummary m =
        evaluate_predictions(gt, masked, predicted, spec, config.raw_units, config.whole_trajectory);
    csv += fmt::format("{},{},{}\n", label, io::format_number(m.mean), io::format_number(m.stddev));
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    io::write_text(out, csv);
  }
  return 0;
}

int run_bench(const BenchOptions& options, const std::string& out, const std::string& detail,
              const std::string& trace) {
  const BenchResult r = run_benchmark(options);
  if (out.empty()) {
    std::cout << r.table_csv();
  } else {
    io::write_text(out, r.table_csv());
  }
  if (!detail.empty()) io::write_text(detail, r.detail_csv());
  if (!trace.empty()) io::write_text(trace, r.trace_csv());
  return 0;
}

int run_synth(const Settings& s, SynthConfig sc, int width, int height, const std::string& out_dir,
              const std::vector<double>& theta) {
  const io::KeyValues kv = s.resolve();
  sc.spec = GridSpec::unit(width, height);
  if (!theta.empty()) sc.true_theta = theta;
  sc.seed = static_cast<std::uint64_t>(kv.integer("seed", static_cast<long>(sc.seed)));
  SynthDataset ds = synthesize_dataset(sc);

  const double fraction = kv.number("gap_fraction", 0.3);
  MaskPlan plan{fraction, std::nullopt, sc.seed};
  if (kv.has("gap_length")) plan.length = static_cast<std::size_t>(kv.integer("gap_length", 0));
  const MaskedSet masked = mask_gaps(ds.test, plan);
  for (const auto& [k, v] : kv.entries()) {
    if (!ds.config.has(k)) ds.config.set(k, v);
  }
  write_dataset(ds, out_dir);
  io::write_trajectories(fs::path(out_dir) / "test_masked.csv", masked.trajectories);
  io::write_text(fs::path(out_dir) / "mask.csv", format_mask(masked.mask));
  return 0;
}

int run_mask(const Settings& s, const std::string& input, const std::string& out,
             const std::string& mask_out) {
  const io::KeyValues kv = s.resolve();
  MaskPlan plan{kv.number("gap_fraction", 0.3), std::nullopt,
                static_cast<std::uint64_t>(kv.integer("seed", 0))};
  if (kv.has("gap_length")) plan.length = static_cast<std::size_t>(kv.integer("gap_length", 0));
  const MaskedSet masked = mask_gaps(io::read_trajectories(input), plan);
  io::write_trajectories(out, masked.trajectories);
  if (!mask_out.empty()) io::write_text(mask_out, format_mask(masked.mask));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory gap interpolation with maximum-entropy IRL on grid maps"};
  app.require_subcommand(1);

  Settings train_s, interp_s, eval_s, synth_s, mask_s;

  auto* train = app.add_subcommand("train", "learn reward weights from trajectories");
  std::string train_data, theta_out = "theta.csv", report_out, timing_out, test_out;
  long n_test = -1;
  add_common(train, train_s);
  add_variant_flags(train, train_s);
  train->add_option("-d,--data", train_data, "trajectory CSV")->required();
  train->add_option("--theta-out", theta_out, "learned weights, one per line");
  train->add_option("--report-out", report_out, "per-epoch training report CSV");
  train->add_option("--timing-out", timing_out, "per-epoch wall times CSV");
  train->add_option("--n-test", n_test, "hold out this many trajectories (seeded split)");
  train->add_option("--test-out", test_out, "write the held-out trajectories here");
  add_flag(train, train_s, "--lr", "learning_rate", "learning rate");
  add_flag(train, train_s, "--epochs", "max_epochs", "maximum epochs");
  add_flag(train, train_s, "--seed", "seed", "split seed");

  auto* interp = app.add_subcommand("interpolate", "fill gap rows with generated paths");
  std::string interp_in, interp_theta = "theta.csv", interp_out, svg, interp_gt;
  add_common(interp, interp_s);
  add_variant_flags(interp, interp_s);
  interp->add_option("-i,--input", interp_in, "trajectory CSV with gap rows")->required();
  interp->add_option("--theta", interp_theta, "weights from train");
  interp->add_option("-o,--out", interp_out, "completed trajectory CSV")->required();
  interp->add_option("--svg", svg, "plot file (one per trajectory when several)");
  interp->add_option("--gt", interp_gt, "ground truth CSV drawn in the plot");
  add_flag(interp, interp_s, "--mode", "mode", "det | sto");
  add_flag(interp, interp_s, "--seed", "seed", "random seed");
  add_flag(interp, interp_s, "--retries", "retries", "stochastic attempts per gap");

  auto* eval = app.add_subcommand("evaluate", "MHD of completed trajectories");
  std::string eval_gt, eval_masked, eval_out;
  std::vector<std::string> eval_preds;
  add_common(eval, eval_s);
  eval->add_option("--gt", eval_gt, "ground truth CSV")->required();
  eval->add_option("--masked", eval_masked, "the gapped input given to interpolate")->required();
  eval->add_option("--pred", eval_preds, "label=completed CSV, repeatable")->required();
  eval->add_option("-o,--out", eval_out, "output CSV (stdout if omitted)");
  add_flag(eval, eval_s, "--units", "mhd_units", "cells | raw");
  add_flag(eval, eval_s, "--segment", "mhd_segment", "gap | whole");

  auto* bench = app.add_subcommand("bench", "time the planner variants");
  BenchOptions bo;
  std::string bench_out, bench_detail, bench_trace;
  bench->add_option("--width", bo.width, "map width");
  bench->add_option("--height", bo.height, "map height");
  bench->add_option("--horizon", bo.horizon, "time steps of the 3D variant");
  bench->add_option("--reps", bo.repetitions, "timed repetitions (median reported)");
  bench->add_option("--demos", bo.demos, "demonstrations per gradient evaluation");
  bench->add_option("--seed", bo.seed, "feature map seed");
  bench->add_option("-o,--out", bench_out, "table CSV (stdout if omitted)");
  bench->add_option("--detail", bench_detail, "per-sweep and per-pass CSV");
  bench->add_option("--trace", bench_trace, "per-sweep timing trace CSV");

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  SynthConfig sc;
  int synth_w = 32, synth_h = 32;
  std::string synth_dir;
  std::vector<double> synth_theta;
  add_common(synth, synth_s);
  synth->add_option("-o,--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--width", synth_w, "grid width");
  synth->add_option("--height", synth_h, "grid height");
  synth->add_option("--n-train", sc.n_train, "training trajectories");
  synth->add_option("--n-test", sc.n_test, "test trajectories");
  synth->add_option("--blobs", sc.blobs, "terrain obstacles");
  synth->add_option("--theta", synth_theta, "true weights (constant, distance, terrain)")->delimiter(',');
  add_flag(synth, synth_s, "--seed", "seed", "random seed");
  add_flag(synth, synth_s, "--gap-fraction", "gap_fraction", "share of each test trajectory masked");

  auto* mask = app.add_subcommand("mask", "blank one interior segment per trajectory");
  std::string mask_in, mask_out, mask_file;
  add_common(mask, mask_s);
  mask->add_option("-i,--input", mask_in, "trajectory CSV")->required();
  mask->add_option("-o,--out", mask_out, "masked CSV")->required();
  mask->add_option("--mask-out", mask_file, "gap positions CSV");
  add_flag(mask, mask_s, "--seed", "seed", "random seed");
  add_flag(mask, mask_s, "--gap-fraction", "gap_fraction", "share of rows removed");
  add_flag(mask, mask_s, "--gap-length", "gap_length", "fixed number of rows removed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  try {
    if (*train) return run_train(train_s, train_data, theta_out, report_out, timing_out, n_test, test_out);
    if (*interp) return run_interpolate(interp_s, interp_in, interp_theta, interp_out, svg, interp_gt);
    if (*eval) return run_evaluate(eval_s, eval_gt, eval_masked, eval_preds, eval_out);
    if (*bench) return run_bench(bo, bench_out, bench_detail, bench_trace);
    if (*synth) return run_synth(synth_s, sc, synth_w, synth_h, synth_dir, synth_theta);
    if (*mask) return run_mask(mask_s, mask_in, mask_out, mask_file);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kValidationError;
}
