#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace reslab {

/// Points in R^dim stored row-major, each with an integer tag. Flow samples
/// use tag 0 for the trapped set K̂, +1 for Γ̂₊ only and -1 for Γ̂₋ only.
class PointCloud {
 public:
  explicit PointCloud(int dim = 1);

  int dim() const { return dim_; }
  std::size_t size() const { return tags_.size(); }
  bool empty() const { return tags_.empty(); }

  void add(std::span<const double> p, int tag = 0);
  void reserve(std::size_t n);

  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  int tag(std::size_t i) const { return tags_[i]; }
  const std::vector<double>& data() const { return data_; }
  const std::vector<int>& tags() const { return tags_; }

  /// Axis-aligned bounding box of the stored points (empty vectors if empty).
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  double diameter() const;

  /// Points whose tag is in `keep`.
  PointCloud filter_tags(std::initializer_list<int> keep) const;
  PointCloud translated(std::span<const double> shift) const;

  /// CSV with header t_tag,x1..xn,xi1..xin (phase-space clouds, even dim)
  /// or t_tag,c1..cd otherwise.
  void write_csv(std::ostream& os) const;
  static PointCloud read_csv(std::istream& is);

 private:
  int dim_;
  std::vector<double> data_;
  std::vector<int> tags_;
  std::vector<double> lo_, hi_;
};

/// Static kd-tree over a point set for nearest-neighbour and radius queries.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const PointCloud& cloud);
  KdTree(int dim, std::vector<double> points);

  std::size_t size() const { return idx_.size(); }
  int dim() const { return dim_; }
  /// Index and Euclidean distance of the nearest stored point.
  std::pair<std::size_t, double> nearest(std::span<const double> q) const;
  /// Nearest point other than `self` (for spacing estimates).
  double nearest_other(std::size_t self) const;
  void radius_query(std::span<const double> q, double r, std::vector<std::size_t>& out) const;
  std::span<const double> point(std::size_t i) const {
    return {pts_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

 private:
  struct Node {
    std::size_t begin, end;
    int axis;
    double split;
    int left = -1, right = -1;
  };
  int dim_ = 0;
  std::vector<double> pts_;
  std::vector<std::size_t> idx_;
  std::vector<Node> nodes_;

  int build(std::size_t begin, std::size_t end, int depth);
  void nearest_rec(int node, std::span<const double> q, std::size_t skip, std::size_t& best,
                   double& best_d2) const;
  void radius_rec(int node, std::span<const double> q, double r2, std::vector<std::size_t>& out) const;
  double dist2(std::size_t i, std::span<const double> q) const;
};

}  // namespace reslab
