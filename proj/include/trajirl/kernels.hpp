#pragma once

// Data-parallel inner loops of the planner and the forward pass. Every
// kernel exists twice: a plain serial reference in kernels::serial and an
// OpenMP version in kernels::omp with the same signature. The per-element
// arithmetic is shared, so the two agree bitwise except for the forward
// step, where the OpenMP version gathers over predecessors instead of
// scattering to successors and therefore sums in a different order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "trajirl/grid_world.hpp"

namespace trajirl {

enum class Backup { softmax_exact, softmax_paper, hard_max };

enum class Exec { serial, parallel };

/// Normalized (2r+1)x(2r+1) Gaussian weights, row-major with dy outer.
struct GaussianKernel {
  int radius = 1;
  double sigma = 1.0;
  std::vector<double> weights;

  static GaussianKernel make(int radius, double sigma);
  double at(int dx, int dy) const noexcept {
    const int side = 2 * radius + 1;
    return weights[static_cast<std::size_t>((dy + radius) * side + (dx + radius))];
  }
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Soft or hard maximum over one state's action values.
inline double backup_value(const double* q, Backup backup) noexcept {
  double mx = q[0];
  double mn = q[0];
  for (int a = 1; a < kNumActions; ++a) {
    mx = std::max(mx, q[a]);
    mn = std::min(mn, q[a]);
  }
  if (mx == kNegInf) return kNegInf;
  switch (backup) {
    case Backup::hard_max:
      return mx;
    case Backup::softmax_paper:
      return mx + std::log1p(std::exp(mn - mx));
    case Backup::softmax_exact: {
      double sum = 0.0;
      for (int a = 0; a < kNumActions; ++a) sum += std::exp(q[a] - mx);
      return mx + std::log(sum);
    }
  }
  return mx;
}

namespace kernels {

/// One layer of a Bellman sweep: q(c,a) = reward(c,a) + v_next(next(c,a)),
/// v_out(c) = backup(q(c,.)). A terminal layer has no successors (q = -inf).
struct LayerSweep {
  std::span<const std::int32_t> next;
  std::span<const double> reward;
  std::span<const double> v_next;
  Backup backup = Backup::hard_max;
  bool terminal = false;
};

/// Exp-normalized action distribution per row of q; rows whose values are
/// all -inf become uniform.
struct PolicyRows {
  std::span<const double> q;
  std::span<double> probs;
};

#define TRAJIRL_KERNEL_DECLS                                                         \
  void backup_layer(const LayerSweep& in, std::span<double> q, std::span<double> v_out); \
  void convolve(std::span<const double> v, int width, int height,                      \
                const GaussianKernel& kernel, std::span<double> out);                  \
  void normalize_rows(const PolicyRows& rows);                                          \
  void forward_step(const TransitionModel& transitions, std::span<const double> policy,  \
                    std::span<const double> d, std::span<double> d_next);

namespace serial {
TRAJIRL_KERNEL_DECLS
}  // namespace serial

namespace omp {
TRAJIRL_KERNEL_DECLS
}  // namespace omp

#undef TRAJIRL_KERNEL_DECLS

inline void backup_layer(Exec exec, const LayerSweep& in, std::span<double> q,
                         std::span<double> v_out) {
  exec == Exec::parallel ? omp::backup_layer(in, q, v_out)
                         : serial::backup_layer(in, q, v_out);
}
inline void convolve(Exec exec, std::span<const double> v, int width, int height,
                     const GaussianKernel& kernel, std::span<double> out) {
  exec == Exec::parallel ? omp::convolve(v, width, height, kernel, out)
                         : serial::convolve(v, width, height, kernel, out);
}
inline void normalize_rows(Exec exec, const PolicyRows& rows) {
  exec == Exec::parallel ? omp::normalize_rows(rows) : serial::normalize_rows(rows);
}
inline void forward_step(Exec exec, const TransitionModel& transitions,
                         std::span<const double> policy, std::span<const double> d,
                         std::span<double> d_next) {
  exec == Exec::parallel ? omp::forward_step(transitions, policy, d, d_next)
                         : serial::forward_step(transitions, policy, d, d_next);
}

/// Reflect-pad index (edge cell not repeated).
inline int reflect(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

/// Weighted average over finite neighbours, kernel mass renormalized.
inline double convolve_at(std::span<const double> v, int width, int height,
                          const GaussianKernel& kernel, int x, int y) noexcept {
  double num = 0.0;
  double den = 0.0;
  for (int dy = -kernel.radius; dy <= kernel.radius; ++dy) {
    const int yy = reflect(y + dy, height);
    for (int dx = -kernel.radius; dx <= kernel.radius; ++dx) {
      const int xx = reflect(x + dx, width);
      const double value = v[static_cast<std::size_t>(yy) * static_cast<std::size_t>(width) +
                             static_cast<std::size_t>(xx)];
      if (value == kNegInf) continue;
      const double w = kernel.at(dx, dy);
      num += w * value;
      den += w;
    }
  }
  return den > 0.0 ? num / den : kNegInf;
}

inline void normalize_row(const double* q, double* out) noexcept {
  double mx = q[0];
  for (int a = 1; a < kNumActions; ++a) mx = std::max(mx, q[a]);
  if (mx == kNegInf) {
    for (int a = 0; a < kNumActions; ++a) out[a] = 1.0 / kNumActions;
    return;
  }
  double sum = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    out[a] = std::exp(q[a] - mx);
    sum += out[a];
  }
  for (int a = 0; a < kNumActions; ++a) out[a] /= sum;
}

}  // namespace kernels
}  // namespace trajirl
