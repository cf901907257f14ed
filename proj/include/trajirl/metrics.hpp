#pragma once

#include <span>
#include <vector>

#include "trajirl/grid_world.hpp"

namespace trajirl {

/// Modified Hausdorff distance: the larger of the two directed mean
/// nearest-neighbour Euclidean distances. Throws EmptyInput.
double mhd(std::span<const Point2> a, std::span<const Point2> b);

struct MhdSummary {
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single pair.
  double stddev = 0.0;
  std::vector<double> per_pair;
};

/// MHD of each index-aligned (ground truth, prediction) pair and their
/// mean and spread. Throws LengthMismatch.
MhdSummary evaluate_interpolations(const std::vector<std::vector<Point2>>& ground_truth,
                                   const std::vector<std::vector<Point2>>& predicted);

/// Mean and sample standard deviation of a list of values.
MhdSummary summarize(std::vector<double> values);

}  // namespace trajirl
