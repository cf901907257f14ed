#include "trajirl/kernels.hpp"

namespace trajirl::kernels::omp {

void backup_layer(const LayerSweep& in, std::span<double> q, std::span<double> v_out) {
  const auto cells = static_cast<std::ptrdiff_t>(v_out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ci = 0; ci < cells; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    double* qc = q.data() + c * kNumActions;
    for (int a = 0; a < kNumActions; ++a) {
      const std::size_t k = c * kNumActions + static_cast<std::size_t>(a);
      qc[a] = in.terminal ? kNegInf
                          : in.reward[k] + in.v_next[static_cast<std::size_t>(in.next[k])];
    }
    v_out[c] = backup_value(qc, in.backup);
  }
}

void convolve(std::span<const double> v, int width, int height, const GaussianKernel& kernel,
              std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
          static_cast<std::size_t>(x)] = convolve_at(v, width, height, kernel, x, y);
    }
  }
}

void normalize_rows(const PolicyRows& rows) {
  const auto n = static_cast<std::ptrdiff_t>(rows.q.size() / kNumActions);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto off = static_cast<std::size_t>(s) * kNumActions;
    normalize_row(rows.q.data() + off, rows.probs.data() + off);
  }
}

// Gather form: each cell pulls mass from the predecessors that move into it,
// plus its own blocked (wall) moves. No two threads write the same cell.
void forward_step(const TransitionModel& transitions, std::span<const double> policy,
                  std::span<const double> d, std::span<double> d_next) {
  const GridSpec& spec = transitions.spec();
  const int width = spec.width();
  const int height = spec.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t c = spec.cell_index(x, y);
      double acc = 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        const int px = x - kActions[a].dx;
        const int py = y - kActions[a].dy;
        if (spec.contains_cell(px, py)) {
          const std::size_t p = spec.cell_index(px, py);
          acc += policy[p * kNumActions + static_cast<std::size_t>(a)] * d[p];
        }
        if (transitions.blocked(c, a)) {
          acc += policy[c * kNumActions + static_cast<std::size_t>(a)] * d[c];
        }
      }
      d_next[c] = acc;
    }
  }
}

}  // namespace trajirl::kernels::omp
