#include "trajirl/kernels.hpp"

namespace trajirl::kernels::serial {

void backup_layer(const LayerSweep& in, std::span<double> q, std::span<double> v_out) {
  const std::size_t cells = v_out.size();
  for (std::size_t c = 0; c < cells; ++c) {
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
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
          static_cast<std::size_t>(x)] = convolve_at(v, width, height, kernel, x, y);
    }
  }
}

void normalize_rows(const PolicyRows& rows) {
  const std::size_t n = rows.q.size() / kNumActions;
  for (std::size_t s = 0; s < n; ++s) {
    normalize_row(rows.q.data() + s * kNumActions, rows.probs.data() + s * kNumActions);
  }
}

// Reference form of the visitation update: scatter each cell's mass along
// its successors.
void forward_step(const TransitionModel& transitions, std::span<const double> policy,
                  std::span<const double> d, std::span<double> d_next) {
  std::fill(d_next.begin(), d_next.end(), 0.0);
  const std::size_t cells = d.size();
  for (std::size_t c = 0; c < cells; ++c) {
    const double mass = d[c];
    if (mass == 0.0) continue;
    for (int a = 0; a < kNumActions; ++a) {
      d_next[static_cast<std::size_t>(transitions.next_cell(c, a))] +=
          policy[c * kNumActions + static_cast<std::size_t>(a)] * mass;
    }
  }
}

}  // namespace trajirl::kernels::serial
