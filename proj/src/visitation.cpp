#include "trajirl/visitation.hpp"

#include "trajirl/error.hpp"

namespace trajirl {

std::vector<double> VisitationField::planar() const {
  const std::size_t cells = spec.cells();
  std::vector<double> out(cells, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) out[i % cells] += d[i];
  return out;
}

VisitationField forward_pass(const Policy& policy, const GridSpec& spec, State start, State goal,
                             int n_steps, const ForwardOptions& options) {
  if (n_steps < 1) throw InvalidArgument("forward pass needs at least one step");
  if (!spec.contains_cell(start.x, start.y) || !spec.contains_cell(goal.x, goal.y)) {
    throw OutOfBounds("start or goal outside grid");
  }
  if (policy.probs.size() != spec.num_states() * kNumActions) {
    throw DimensionMismatch("policy does not match the grid");
  }

  const GridSpec plane = spec.with_horizon(std::nullopt);
  const TransitionModel tm(plane);
  const std::size_t cells = spec.cells();
  const int layers = spec.layers();
  const bool timed = spec.time_augmented();
  if (timed) {
    start.z = std::max(start.z, 0);
    goal.z = layers - 1;
  } else {
    start.z = 0;
    goal.z = 0;
  }

  VisitationField field{spec, std::vector<double>(spec.num_states(), 0.0), {}, 0.0};
  const std::size_t g = spec.index(goal);
  const std::span<const double> probs(policy.probs);

  // planar: one double-buffered plane; timed: the current layer only, since
  // step n lives entirely on layer start.z + n - 1
  std::vector<double> cur(cells, 0.0);
  std::vector<double> nxt(cells, 0.0);
  cur[spec.cell_index(start.x, start.y)] = 1.0;
  int layer = timed ? start.z : 0;

  for (int n = 1; n <= n_steps; ++n) {
    const std::size_t base = static_cast<std::size_t>(layer) * cells;
    if (g >= base && g < base + cells) {
      field.absorbed += cur[g - base];
      cur[g - base] = 0.0;
    }
    for (std::size_t c = 0; c < cells; ++c) field.d[base + c] += cur[c];
    if (options.keep_per_step) {
      std::vector<double> snapshot(spec.num_states(), 0.0);
      std::copy(cur.begin(), cur.end(), snapshot.begin() + static_cast<std::ptrdiff_t>(base));
      field.per_step.push_back(std::move(snapshot));
    }
    if (n == n_steps) break;
    if (timed && layer + 1 >= layers) break;  // nothing beyond the horizon
    kernels::forward_step(options.exec, tm, probs.subspan(base * kNumActions, cells * kNumActions),
                          cur, nxt);
    cur.swap(nxt);
    if (timed) ++layer;
  }
  return field;
}

}  // namespace trajirl
