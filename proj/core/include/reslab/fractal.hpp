#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reslab/point_cloud.hpp"

namespace reslab {

struct DimensionFit {
  std::vector<double> epsilons;        // as supplied (decreasing)
  std::vector<std::int64_t> counts;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double dimension_estimate = 0.0;
  double median_spacing = 0.0;         // nearest-neighbour spacing of the cloud
  std::vector<std::string> warnings;
  /// Samples never certify that the set has pure dimension.
  std::string caveat = "pure dimension not certified from samples";
};

/// Occupied cells of the axis-aligned eps-grid anchored at the bounding-box
/// minimum corner.
std::int64_t box_count(const PointCloud& cloud, double eps);

/// Same, with the grid anchor shifted by `offset` (each component in [0, eps)).
std::int64_t box_count_offset(const PointCloud& cloud, double eps, const std::vector<double>& offset);

/// Median over 5 uniformly random anchor offsets drawn from `seed`.
std::int64_t box_count_randomized(const PointCloud& cloud, double eps, std::uint64_t seed);

/// Geometric ladder, ratio 2^{-1/2}, `rungs` values from diameter / 8.
std::vector<double> default_ladder(const PointCloud& cloud, int rungs = 10);
std::vector<double> geometric_ladder(double start, double ratio, int rungs);

struct FitOptions {
  bool randomized = false;
  std::uint64_t seed = 0;
};

/// Least-squares line through (log(1/eps), log N(eps)).
DimensionFit fit_dimension(const PointCloud& cloud, const std::vector<double>& ladder,
                           const FitOptions& opts = {});

/// (m0 - 1) / 2.
double nu_from_dimension(double m0);

std::string to_json(const DimensionFit& fit);

// Synthetic reference sets.
/// Left endpoints of the 2^depth middle-thirds intervals at the given depth.
PointCloud cantor_cloud(int depth);
/// n evenly spaced points on [0, length] (1D).
PointCloud segment_cloud(std::size_t n, double length = 1.0);
/// Cantor(depth) x segment(n) in R^2.
PointCloud cantor_segment_product(int depth, std::size_t n);

}  // namespace reslab
