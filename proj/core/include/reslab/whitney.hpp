#pragma once

#include <array>
#include <span>
#include <vector>

#include "reslab/point_cloud.hpp"

namespace reslab {

/// Radial C^inf bump: 1 on |y| <= 1/8, 0 on |y| >= 1/4.
double whitney_bump(double r);
/// d/dr of whitney_bump.
double whitney_bump_derivative(double r);

struct WhitneyOptions {
  /// Domain covered by the dyadic construction, one [lo, hi] per axis.
  /// Empty: the target's bounding box padded by 1 on each side.
  std::vector<std::array<double, 2>> box;
  std::size_t max_cells = 20'000'000;
};

/// phi_eps = eps + sum_j d_j^2 chi((x - x_j) / (d_j + sqrt eps)) over a
/// Whitney-type cover of {d(., Gamma) >= sqrt eps} by balls B(x_j, d_j / 8).
class RegularizedDistance {
 public:
  RegularizedDistance(const PointCloud& gamma, double eps, const WhitneyOptions& opts);

  double eps() const { return eps_; }
  int dim() const { return dim_; }
  std::size_t center_count() const { return count_; }
  /// Largest number of bumps overlapping at any cover center.
  std::size_t overlap_bound() const;

  double operator()(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  double distance(std::span<const double> x) const { return tree_.nearest(x).second; }

  /// max(max ratio, 1 / min ratio) of phi / (d^2 + eps) over the samples.
  double equivalence_constant(const std::vector<std::vector<double>>& samples) const;

 private:
  struct Level {
    KdTree tree;
    std::vector<double> d;
    double reach = 0.0;  // largest support radius in the level
  };
  int dim_;
  double eps_;
  double sqrt_eps_;
  std::size_t count_ = 0;
  KdTree tree_;
  std::vector<Level> levels_;

  template <class F>
  void visit(std::span<const double> x, F&& f) const;
};

/// Throws EmptyTarget for an empty Gamma, SizeOverflow when the cover
/// exceeds opts.max_cells.
RegularizedDistance whitney_phi(const PointCloud& gamma, double eps, const WhitneyOptions& opts = {});

}  // namespace reslab
