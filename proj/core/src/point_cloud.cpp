#include "reslab/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "reslab/error.hpp"

namespace reslab {

PointCloud::PointCloud(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "point cloud dimension must be positive");
}

void PointCloud::reserve(std::size_t n) {
  data_.reserve(n * static_cast<std::size_t>(dim_));
  tags_.reserve(n);
}

void PointCloud::add(std::span<const double> p, int tag) {
  if (p.size() != static_cast<std::size_t>(dim_))
    throw Error(ErrorCode::ShapeMismatch, "point has wrong dimension");
  if (tags_.empty()) {
    lo_.assign(p.begin(), p.end());
    hi_.assign(p.begin(), p.end());
  } else {
    for (int i = 0; i < dim_; ++i) {
      lo_[i] = std::min(lo_[i], p[i]);
      hi_[i] = std::max(hi_[i], p[i]);
    }
  }
  data_.insert(data_.end(), p.begin(), p.end());
  tags_.push_back(tag);
}

double PointCloud::diameter() const {
  double s = 0.0;
  for (int i = 0; i < dim_ && !lo_.empty(); ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
  return std::sqrt(s);
}

PointCloud PointCloud::filter_tags(std::initializer_list<int> keep) const {
  PointCloud out(dim_);
  for (std::size_t i = 0; i < size(); ++i)
    if (std::find(keep.begin(), keep.end(), tags_[i]) != keep.end()) out.add(point(i), tags_[i]);
  return out;
}

PointCloud PointCloud::translated(std::span<const double> shift) const {
  PointCloud out(dim_);
  out.reserve(size());
  std::vector<double> p(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    for (int k = 0; k < dim_; ++k) p[k] = point(i)[k] + shift[k];
    out.add(p, tags_[i]);
  }
  return out;
}

void PointCloud::write_csv(std::ostream& os) const {
  os << "t_tag";
  if (dim_ % 2 == 0) {
    for (int i = 1; i <= dim_ / 2; ++i) os << ",x" << i;
    for (int i = 1; i <= dim_ / 2; ++i) os << ",xi" << i;
  } else {
    for (int i = 1; i <= dim_; ++i) os << ",c" << i;
  }
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    os << tags_[i];
    for (double v : point(i)) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    os << '\n';
  }
}

PointCloud PointCloud::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::IoError, "point cloud CSV is empty");
  const int dim = static_cast<int>(std::count(line.begin(), line.end(), ','));
  PointCloud cloud(dim);
  std::vector<double> p(dim);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const int tag = std::stoi(cell);
    for (int k = 0; k < dim; ++k) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::IoError, "short CSV row");
      p[k] = std::stod(cell);
    }
    cloud.add(p, tag);
  }
  return cloud;
}

KdTree::KdTree(const PointCloud& cloud) : KdTree(cloud.dim(), cloud.data()) {}

KdTree::KdTree(int dim, std::vector<double> points) : dim_(dim), pts_(std::move(points)) {
  const std::size_t n = pts_.size() / static_cast<std::size_t>(dim_);
  idx_.resize(n);
  std::iota(idx_.begin(), idx_.end(), std::size_t{0});
  nodes_.reserve(2 * n / 8 + 2);
  if (n > 0) build(0, n, 0);
}

int KdTree::build(std::size_t begin, std::size_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, 0.0});
  if (end - begin <= 8) return id;
  // Split on the widest axis at the median.
  int axis = 0;
  double widest = -1.0;
  for (int a = 0; a < dim_; ++a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = pts_[idx_[i] * dim_ + a];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = a;
    }
  }
  (void)depth;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return pts_[a * dim_ + axis] < pts_[b * dim_ + axis]; });
  nodes_[id].axis = axis;
  nodes_[id].split = pts_[idx_[mid] * dim_ + axis];
  const int l = build(begin, mid, depth + 1);
  const int r = build(mid, end, depth + 1);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

double KdTree::dist2(std::size_t i, std::span<const double> q) const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const double d = pts_[i * dim_ + a] - q[a];
    s += d * d;
  }
  return s;
}

void KdTree::nearest_rec(int node, std::span<const double> q, std::size_t skip, std::size_t& best,
                         double& best_d2) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (std::size_t k = nd.begin; k < nd.end; ++k) {
      const std::size_t i = idx_[k];
      if (i == skip) continue;
      const double d2 = dist2(i, q);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    return;
  }
  const double diff = q[nd.axis] - nd.split;
  const int first = diff < 0.0 ? nd.left : nd.right;
  const int second = diff < 0.0 ? nd.right : nd.left;
  nearest_rec(first, q, skip, best, best_d2);
  if (diff * diff < best_d2) nearest_rec(second, q, skip, best, best_d2);
}

std::pair<std::size_t, double> KdTree::nearest(std::span<const double> q) const {
  if (idx_.empty()) throw Error(ErrorCode::EmptyCloud, "nearest query on an empty tree");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  nearest_rec(0, q, static_cast<std::size_t>(-1), best, best_d2);
  return {best, std::sqrt(best_d2)};
}

double KdTree::nearest_other(std::size_t self) const {
  if (idx_.size() < 2) return std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  nearest_rec(0, point(self), self, best, best_d2);
  return std::sqrt(best_d2);
}

void KdTree::radius_rec(int node, std::span<const double> q, double r2, std::vector<std::size_t>& out) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (std::size_t k = nd.begin; k < nd.end; ++k)
      if (dist2(idx_[k], q) <= r2) out.push_back(idx_[k]);
    return;
  }
  const double diff = q[nd.axis] - nd.split;
  if (diff < 0.0 || diff * diff <= r2) radius_rec(nd.left, q, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) radius_rec(nd.right, q, r2, out);
}

void KdTree::radius_query(std::span<const double> q, double r, std::vector<std::size_t>& out) const {
  out.clear();
  if (idx_.empty()) return;
  radius_rec(0, q, r * r, out);
}

}  // namespace reslab
