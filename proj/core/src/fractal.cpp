#include "reslab/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "reslab/error.hpp"
#include "reslab/linefit.hpp"

namespace reslab {

namespace {

std::int64_t count_cells(const PointCloud& cloud, double eps, const std::vector<double>& anchor) {
  const int d = cloud.dim();
  std::vector<std::int64_t> keys(cloud.size() * d);
  std::vector<std::size_t> order(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    // The 1e-9 cell-fraction nudge keeps points that sit on a cell boundary
    // up to rounding in the upper cell.
    for (int k = 0; k < d; ++k)
      keys[i * d + k] = static_cast<std::int64_t>(std::floor((p[k] - anchor[k]) / eps + 1e-9));
    order[i] = i;
  }
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(keys.begin() + a * d, keys.begin() + (a + 1) * d, keys.begin() + b * d,
                                        keys.begin() + (b + 1) * d);
  };
  std::sort(order.begin(), order.end(), less);
  std::int64_t count = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || less(order[i - 1], order[i])) ++count;
  }
  return count;
}

void check(const PointCloud& cloud, double eps) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "box counting needs a nonempty cloud");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
}

}  // namespace

std::int64_t box_count(const PointCloud& cloud, double eps) {
  check(cloud, eps);
  return count_cells(cloud, eps, cloud.lo());
}

std::int64_t box_count_offset(const PointCloud& cloud, double eps, const std::vector<double>& offset) {
  check(cloud, eps);
  if (offset.size() != static_cast<std::size_t>(cloud.dim()))
    throw Error(ErrorCode::ShapeMismatch, "offset dimension differs from cloud");
  std::vector<double> anchor(cloud.lo());
  for (int k = 0; k < cloud.dim(); ++k) anchor[k] -= offset[k];
  return count_cells(cloud, eps, anchor);
}

std::int64_t box_count_randomized(const PointCloud& cloud, double eps, std::uint64_t seed) {
  check(cloud, eps);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, eps);
  std::vector<std::int64_t> c(5);
  std::vector<double> off(cloud.dim());
  for (auto& ci : c) {
    for (auto& o : off) o = u(rng);
    ci = box_count_offset(cloud, eps, off);
  }
  std::nth_element(c.begin(), c.begin() + 2, c.end());
  return c[2];
}

std::vector<double> geometric_ladder(double start, double ratio, int rungs) {
  std::vector<double> v(rungs);
  for (int i = 0; i < rungs; ++i) v[i] = start * std::pow(ratio, i);
  return v;
}

std::vector<double> default_ladder(const PointCloud& cloud, int rungs) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "default ladder needs a nonempty cloud");
  const double diam = cloud.diameter();
  if (!(diam > 0.0)) throw Error(ErrorCode::DegenerateLadder, "cloud has zero diameter");
  return geometric_ladder(diam / 8.0, std::pow(2.0, -0.5), rungs);
}

DimensionFit fit_dimension(const PointCloud& cloud, const std::vector<double>& ladder, const FitOptions& opts) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "fit_dimension needs a nonempty cloud");
  if (ladder.size() < 2) throw Error(ErrorCode::DegenerateLadder, "ladder needs at least two values");
  for (double e : ladder)
    if (!(e > 0.0)) throw Error(ErrorCode::DegenerateLadder, "ladder values must be positive");
  const auto [mn, mx] = std::minmax_element(ladder.begin(), ladder.end());
  const double decades = std::log10(*mx / *mn);
  if (decades < 1.0)
    throw Error(ErrorCode::DegenerateLadder, "ladder spans " + std::to_string(decades) + " decades (< 1)");
  DimensionFit fit;
  if (ladder.size() < 4) fit.warnings.push_back("ladder has fewer than 4 values");
  if (decades < 1.5) fit.warnings.push_back("ladder spans fewer than 1.5 decades");
  fit.epsilons = ladder;
  fit.counts.resize(ladder.size());
  for (std::size_t i = 0; i < ladder.size(); ++i)
    fit.counts[i] = opts.randomized ? box_count_randomized(cloud, ladder[i], opts.seed + i) : box_count(cloud, ladder[i]);
  std::vector<double> x(ladder.size()), y(ladder.size());
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    x[i] = std::log(1.0 / ladder[i]);
    y[i] = std::log(static_cast<double>(fit.counts[i]));
  }
  const LineFit lf = fit_line(x, y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  fit.dimension_estimate = lf.slope;
  // Spacing check on a deterministic subsample.
  if (cloud.size() >= 2) {
    KdTree tree(cloud);
    const std::size_t stride = std::max<std::size_t>(1, cloud.size() / 2000);
    std::vector<double> nn;
    for (std::size_t i = 0; i < cloud.size(); i += stride) nn.push_back(tree.nearest_other(i));
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    fit.median_spacing = nn[nn.size() / 2];
    if (fit.median_spacing > *mn) fit.warnings.push_back("nearest-neighbour spacing exceeds the finest eps");
  }
  return fit;
}

double nu_from_dimension(double m0) {
  if (!(m0 >= 1.0)) throw Error(ErrorCode::NegativeDimension, "dimension below 1 gives a negative exponent");
  return (m0 - 1.0) / 2.0;
}

std::string to_json(const DimensionFit& fit) {
  nlohmann::json j;
  j["epsilons"] = fit.epsilons;
  j["counts"] = fit.counts;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["dimension_estimate"] = fit.dimension_estimate;
  j["median_spacing"] = fit.median_spacing;
  j["warnings"] = fit.warnings;
  j["caveat"] = fit.caveat;
  return j.dump(2);
}

PointCloud cantor_cloud(int depth) {
  if (depth < 0 || depth > 24) throw Error(ErrorCode::InvalidArgument, "cantor depth must be in [0, 24]");
  std::vector<double> pts{0.0};
  double scale = 1.0;
  for (int level = 0; level < depth; ++level) {
    scale /= 3.0;
    std::vector<double> next;
    next.reserve(pts.size() * 2);
    for (double p : pts) {
      next.push_back(p);
      next.push_back(p + 2.0 * scale);
    }
    pts.swap(next);
  }
  PointCloud cloud(1);
  cloud.reserve(pts.size());
  for (double p : pts) cloud.add(std::span<const double>(&p, 1));
  return cloud;
}

PointCloud segment_cloud(std::size_t n, double length) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "segment cloud needs >= 2 points");
  PointCloud cloud(1);
  cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = length * static_cast<double>(i) / static_cast<double>(n - 1);
    cloud.add(std::span<const double>(&x, 1));
  }
  return cloud;
}

PointCloud cantor_segment_product(int depth, std::size_t n) {
  const PointCloud c = cantor_cloud(depth);
  const PointCloud s = segment_cloud(n);
  PointCloud cloud(2);
  cloud.reserve(c.size() * s.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double p[2] = {c.point(i)[0], s.point(j)[0]};
      cloud.add(p);
    }
  return cloud;
}

}  // namespace reslab
