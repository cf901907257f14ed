#include "trajirl/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "trajirl/error.hpp"
#include "trajirl/generator.hpp"
#include "trajirl/planner.hpp"
#include "trajirl/rng.hpp"

namespace trajirl {

namespace fs = std::filesystem;

void check_trajectories(const std::vector<Trajectory>& trajectories, const GridSpec& spec) {
  const GridSpec plane = spec.with_horizon(std::nullopt);
  for (const auto& tr : trajectories) {
    if (tr.points.size() < 2) throw TooShort("trajectory " + tr.id + " has fewer than two rows");
    for (const auto& p : tr.points) {
      if (!p.pos) continue;
      try {
        discretize(*p.pos, plane);
      } catch (const OutOfBounds&) {
        throw OutOfBounds(fmt::format("trajectory {} leaves the grid at t={}", tr.id, p.t));
      }
    }
  }
}

Dataset load_dataset(const fs::path& path, const GridSpec& spec, std::optional<std::size_t> n_test,
                     std::uint64_t seed) {
  std::vector<Trajectory> all = io::read_trajectories(path);
  check_trajectories(all, spec);
  Dataset out;
  if (!n_test) {
    out.train = std::move(all);
    return out;
  }
  if (*n_test > all.size()) throw InvalidConfig("more test trajectories requested than available");

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(seed, 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<std::uint8_t> is_test(all.size(), 0);
  for (std::size_t k = 0; k < *n_test; ++k) is_test[order[k]] = 1;
  for (std::size_t i = 0; i < all.size(); ++i) {
    (is_test[i] ? out.test : out.train).push_back(std::move(all[i]));
  }
  return out;
}

std::vector<std::vector<State>> project_all(const std::vector<Trajectory>& trajectories,
                                            const GridSpec& spec,
                                            const ProjectionOptions& options) {
  const GridSpec plane = spec.with_horizon(std::nullopt);
  std::vector<std::vector<State>> paths;
  for (const auto& tr : trajectories) {
    const auto pts = known_positions(tr);
    auto path = project_trajectory(pts, plane, options);
    if (path.size() >= 2) paths.push_back(std::move(path));
  }
  return paths;
}

Trajectory mask_segment(const Trajectory& trajectory, std::size_t start, std::size_t length) {
  if (length == 0) return trajectory;
  const std::size_t n = trajectory.points.size();
  if (start == 0 || start + length >= n) {
    throw TooShort(fmt::format("gap [{}, {}) of {} does not leave both endpoints", start,
                               start + length, trajectory.id));
  }
  Trajectory out = trajectory;
  for (std::size_t i = start; i < start + length; ++i) out.points[i].pos.reset();
  return out;
}

MaskedSet mask_gaps(const std::vector<Trajectory>& trajectories, const MaskPlan& plan) {
  if (!plan.length && !(plan.fraction >= 0.0 && plan.fraction < 1.0)) {
    throw InvalidArgument("gap fraction must lie in [0, 1)");
  }
  MaskedSet out;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& tr = trajectories[i];
    const std::size_t n = tr.points.size();
    const std::size_t length =
        plan.length ? *plan.length
                    : static_cast<std::size_t>(std::lround(plan.fraction * static_cast<double>(n)));
    if (length == 0) {
      out.trajectories.push_back(tr);
      out.mask.push_back({tr.id, 0, 0});
      continue;
    }
    if (n < 2 || length > n - 2) {
      throw TooShort(fmt::format("trajectory {} ({} rows) cannot hold an interior gap of {}", tr.id,
                                 n, length));
    }
    CounterRng rng(plan.seed, i);
    const std::size_t start = 1 + rng.below(n - 1 - length);
    out.trajectories.push_back(mask_segment(tr, start, length));
    out.mask.push_back({tr.id, start, length});
  }
  return out;
}

std::string format_mask(const std::vector<GapMaskEntry>& mask) {
  std::string out = "traj_id,start,length\n";
  for (const auto& m : mask) out += fmt::format("{},{},{}\n", m.traj_id, m.start, m.length);
  return out;
}

std::vector<Point2> linear_interpolation(Point2 a, Point2 b, int n) {
  if (n < 1) throw InvalidArgument("linear interpolation needs at least one step");
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n + 1);
    out.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
  }
  return out;
}

Trajectory fill_linear(const Trajectory& trajectory) {
  Trajectory out = trajectory;
  for (const Gap& gap : find_gaps(trajectory)) {
    const Point2 a = *trajectory.points[gap.begin - 1].pos;
    const Point2 b = *trajectory.points[gap.end].pos;
    const auto fill = linear_interpolation(a, b, static_cast<int>(gap.length()));
    for (std::size_t k = 0; k < fill.size(); ++k) out.points[gap.begin + k].pos = fill[k];
  }
  return out;
}

namespace {

constexpr std::array<const char*, 10> kColors{"#000000", "#1f77b4", "#d62728", "#2ca02c",
                                              "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                              "#17becf", "#7f7f7f"};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_plot(const std::vector<LabeledTrack>& tracks, const std::string& title) {
  if (tracks.empty()) throw InvalidArgument("nothing to plot");
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& t : tracks) {
    for (const auto& p : t.points) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  }
  if (!std::isfinite(x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  constexpr double kSize = 560.0, kMargin = 20.0, kLegend = 200.0;
  const double scale = kSize / span;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\">\n",
      kSize + 2 * kMargin + kLegend, kSize + 2 * kMargin);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += fmt::format("<title>{}</title>\n", xml_escape(title));
  }
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const char* color = kColors[i % kColors.size()];
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"", color);
    for (std::size_t k = 0; k < tracks[i].points.size(); ++k) {
      const Point2 p = tracks[i].points[k];
      svg += fmt::format("{}{:.3f},{:.3f}", k ? " " : "", kMargin + (p.x - x0) * scale,
                         kMargin + kSize - (p.y - y0) * scale);
    }
    svg += "\"/>\n";
    const double ly = kMargin + 20.0 * static_cast<double>(i + 1);
    const double lx = kSize + 2 * kMargin;
    svg += fmt::format(
        "<line x1=\"{:.0f}\" y1=\"{:.0f}\" x2=\"{:.0f}\" y2=\"{:.0f}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        lx, ly, lx + 24, ly, color);
    svg += fmt::format("<text x=\"{:.0f}\" y=\"{:.0f}\" font-size=\"12\">{}</text>\n", lx + 30,
                       ly + 4, xml_escape(tracks[i].label));
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::vector<LabeledTrack>& tracks, const fs::path& path,
               const std::string& title) {
  io::write_text(path, render_plot(tracks, title));
}

namespace {

std::vector<double> terrain_channel(const GridSpec& spec, int blobs, CounterRng& rng) {
  struct Blob {
    double x, y, r;
  };
  std::vector<Blob> list;
  const double side = std::max(spec.width(), spec.height());
  for (int b = 0; b < blobs; ++b) {
    const double x = rng.uniform() * spec.width();
    const double y = rng.uniform() * spec.height();
    const double r = 1.5 + rng.uniform() * 0.12 * side;
    list.push_back({x, y, r});
  }
  std::vector<double> out(spec.cells(), 0.0);
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      double v = 0.0;
      for (const auto& b : list) {
        const double dx = x + 0.5 - b.x, dy = y + 0.5 - b.y;
        v = std::max(v, std::exp(-(dx * dx + dy * dy) / (2.0 * b.r * b.r)));
      }
      out[spec.cell_index(x, y)] = v;
    }
  }
  return out;
}

std::vector<State> drop_self_moves(const std::vector<State>& states) {
  std::vector<State> out;
  for (const State& s : states) {
    if (out.empty() || out.back().x != s.x || out.back().y != s.y) out.push_back({s.x, s.y, 0});
  }
  return out;
}

}  // namespace

SynthDataset synthesize_dataset(const SynthConfig& config) {
  const GridSpec spec = config.spec.with_horizon(std::nullopt);
  if (config.true_theta.size() != 3) throw InvalidArgument("true_theta needs three weights");
  const Theta theta(config.true_theta);
  if (config.blobs < 0) throw InvalidArgument("blob count must be non-negative");

  CounterRng terrain_rng(config.seed, 0);
  io::RasterChannels raster{{"terrain"}, {terrain_channel(spec, config.blobs, terrain_rng)}};
  const State anchor{spec.width() / 2, spec.height() / 2, 0};
  const FeatureMap features(spec.width(), spec.height(),
                            {constant_channel(spec), distance_channel(spec, anchor),
                             raster.channels[0]},
                            {"constant", "distance", "terrain"});

  int min_sep = config.min_separation > 0 ? config.min_separation
                                          : std::max(spec.width(), spec.height()) / 2;
  min_sep = std::min(min_sep, std::max(spec.width(), spec.height()) - 1);
  PlannerConfig planner;
  planner.norm =
      config.scale_by_length ? DistanceNorm::path_length(config.p) : DistanceNorm::lp(config.p);
  planner.backup = Backup::hard_max;
  planner.exec = Exec::serial;

  CounterRng pick(config.seed, 1);
  auto draw_cell = [&]() {
    return State{static_cast<int>(pick.below(static_cast<std::uint64_t>(spec.width()))),
                 static_cast<int>(pick.below(static_cast<std::uint64_t>(spec.height()))), 0};
  };

  const std::size_t total = config.n_train + config.n_test;
  std::vector<std::vector<State>> paths;
  std::uint64_t draws = 0;
  while (paths.size() < total) {
    if (++draws > 1000 * (total + 1)) throw InvalidConfig("could not place synthetic trajectories");
    const State start = draw_cell();
    const State goal = draw_cell();
    if (chebyshev(start, goal) < min_sep) continue;
    const ValueArtifacts art = backward_pass(spec, goal, theta, features, planner);
    const Policy policy = make_policy(art, PolicyRule::q_only, Exec::serial);
    GapQuery query{start, goal, 4 * chebyshev(start, goal), GenerationMode::stochastic, 10,
                   config.seed * 0x9e3779b97f4a7c15ULL + draws};
    const GeneratedPath gen = rollout_stochastic(policy, query, spec);
    if (!gen.reached_goal) continue;
    auto path = drop_self_moves(gen.states);
    for (std::size_t k = 1; k < path.size(); ++k) {
      if (chebyshev(path[k - 1], path[k]) != 1) throw Error("synthetic path is not 8-adjacent");
    }
    paths.push_back(std::move(path));
  }

  SynthDataset out{spec, std::move(raster), features, theta, {}, {}, {}};
  for (std::size_t i = 0; i < total; ++i) {
    const bool is_train = i < config.n_train;
    const std::size_t k = is_train ? i : i - config.n_train;
    auto tr = trajectory_from_states(fmt::format("{}{:03}", is_train ? "train" : "test", k),
                                     paths[i], spec);
    (is_train ? out.train : out.test).push_back(std::move(tr));
  }

  io::grid_to_config(spec, out.config);
  out.config.set("feature_constant", "true");
  out.config.set("feature_distance", "true");
  out.config.set("feature_anchor_x", std::to_string(anchor.x));
  out.config.set("feature_anchor_y", std::to_string(anchor.y));
  out.config.set("feature_file", "features.csv");
  std::string weights;
  for (std::size_t k = 0; k < config.true_theta.size(); ++k) {
    weights += (k ? "," : "") + io::format_number(config.true_theta[k]);
  }
  out.config.set("true_theta", weights);
  out.config.set("seed", std::to_string(config.seed));
  return out;
}

void write_dataset(const SynthDataset& dataset, const fs::path& dir) {
  io::write_trajectories(dir / "train.csv", dataset.train);
  io::write_trajectories(dir / "test.csv", dataset.test);
  io::write_feature_csv(dir / "features.csv", dataset.spec, dataset.raster);
  io::write_text(dir / "config.txt", dataset.config.format());
}

}  // namespace trajirl
