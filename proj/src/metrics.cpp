#include "trajirl/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "trajirl/error.hpp"

namespace trajirl {

namespace {

double directed_mean(std::span<const Point2> from, std::span<const Point2> to) {
  double total = 0.0;
  for (const Point2& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& q : to) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    total += best;
  }
  return total / static_cast<double>(from.size());
}

}  // namespace

double mhd(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) throw EmptyInput("MHD needs two non-empty point sequences");
  return std::max(directed_mean(a, b), directed_mean(b, a));
}

MhdSummary summarize(std::vector<double> values) {
  MhdSummary out;
  out.per_pair = std::move(values);
  const auto n = static_cast<double>(out.per_pair.size());
  if (out.per_pair.empty()) return out;
  double sum = 0.0;
  for (double v : out.per_pair) sum += v;
  out.mean = sum / n;
  if (out.per_pair.size() > 1) {
    double sq = 0.0;
    for (double v : out.per_pair) sq += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(sq / (n - 1.0));
  }
  return out;
}

MhdSummary evaluate_interpolations(const std::vector<std::vector<Point2>>& ground_truth,
                                   const std::vector<std::vector<Point2>>& predicted) {
  if (ground_truth.size() != predicted.size()) {
    throw LengthMismatch(std::to_string(ground_truth.size()) + " ground-truth segments vs " +
                         std::to_string(predicted.size()) + " predictions");
  }
  std::vector<double> values;
  values.reserve(ground_truth.size());
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    values.push_back(mhd(ground_truth[i], predicted[i]));
  }
  return summarize(std::move(values));
}

}  // namespace trajirl
