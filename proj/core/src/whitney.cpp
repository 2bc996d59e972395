#include "reslab/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reslab/error.hpp"

namespace reslab {

namespace {

constexpr double kBandsPerOctave = 2.0;
constexpr double kFine = 27.0;

// Smooth step 0 -> 1 on [0, 1] built from exp(-a/u); a = 0.6 keeps the
// steepest slope near 1.5.
constexpr double kStepA = 0.6;

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(kStepA * (1.0 / u - 1.0 / (1.0 - u))));
}

double smooth_step_derivative(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double s = smooth_step(u);
  return s * (1.0 - s) * kStepA * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u)));
}

}  // namespace

double whitney_bump(double r) { return smooth_step((0.25 - r) * 8.0); }

double whitney_bump_derivative(double r) { return -8.0 * smooth_step_derivative((0.25 - r) * 8.0); }

RegularizedDistance::RegularizedDistance(const PointCloud& gamma, double eps, const WhitneyOptions& opts)
    : dim_(gamma.dim()), eps_(eps), sqrt_eps_(std::sqrt(eps)), tree_(gamma) {
  if (gamma.empty()) throw Error(ErrorCode::EmptyTarget, "whitney_phi needs a nonempty target set");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  std::vector<std::array<double, 2>> box = opts.box;
  if (box.empty()) {
    for (int k = 0; k < dim_; ++k) box.push_back({gamma.lo()[k] - 1.0, gamma.hi()[k] + 1.0});
  }
  if (static_cast<int>(box.size()) != dim_) throw Error(ErrorCode::ShapeMismatch, "box dimension differs");

  struct Candidate {
    std::vector<double> c;
    double r, d;  // r: covering radius of the candidate lattice
  };
  double max_d = 0.0;
  {
    // farthest box corner bounds d over the box
    const long corners = 1L << dim_;
    std::vector<double> q(dim_);
    for (long m = 0; m < corners; ++m) {
      for (int k = 0; k < dim_; ++k) q[k] = box[k][(m >> k) & 1];
      max_d = std::max(max_d, tree_.nearest(q).second);
    }
  }
  std::size_t visited = 0;
  auto tick = [&] {
    if (++visited > opts.max_cells) throw Error(ErrorCode::SizeOverflow, "Whitney cover exceeds the cell budget");
  };

  // Lattice points with covering radius rho_m = (b_m + sqrt eps) / divisor in
  // each distance band [b_m, b_{m+1}), b_m = 2^{m / per_octave}; hexagonal in
  // 2D, uniform in 1D, cubic otherwise. The band is widened by rho_m so every
  // x with d(x) in the band is within rho_m of a candidate.
  auto lattice = [&](double per_octave, double divisor) {
    std::vector<Candidate> out;
    const int m_lo = static_cast<int>(std::floor(per_octave * std::log2(sqrt_eps_)));
    const int m_hi = static_cast<int>(std::floor(per_octave * std::log2(std::max(max_d, sqrt_eps_))));
    std::vector<double> c(dim_), q(dim_);
    for (int m = m_hi; m >= m_lo; --m) {
      const double band_lo = std::exp2(m / per_octave), band_hi = std::exp2((m + 1) / per_octave);
      const double rho = (band_lo + sqrt_eps_) / divisor;
      const double lo_d = std::max(band_lo - rho, sqrt_eps_), hi_d = band_hi + rho;
      std::vector<double> step(dim_);
      if (dim_ == 1) {
        step[0] = 2.0 * rho;
      } else if (dim_ == 2) {
        step[0] = std::sqrt(3.0) * rho;
        step[1] = 1.5 * rho;
      } else {
        for (auto& v : step) v = 2.0 * rho / std::sqrt(static_cast<double>(dim_));
      }
      std::vector<std::array<std::vector<double>, 2>> stack;
      {
        std::array<std::vector<double>, 2> root{std::vector<double>(dim_), std::vector<double>(dim_)};
        for (int k = 0; k < dim_; ++k) {
          root[0][k] = box[k][0];
          root[1][k] = box[k][1];
        }
        stack.push_back(std::move(root));
      }
      std::vector<long> first(dim_), last(dim_), idx(dim_);
      while (!stack.empty()) {
        auto cell = std::move(stack.back());
        stack.pop_back();
        tick();
        double r2 = 0.0;
        for (int k = 0; k < dim_; ++k) {
          c[k] = 0.5 * (cell[0][k] + cell[1][k]);
          r2 += 0.25 * (cell[1][k] - cell[0][k]) * (cell[1][k] - cell[0][k]);
        }
        const double r = std::sqrt(r2);
        const double dc = tree_.nearest(c).second;
        if (dc + r < lo_d || dc - r >= hi_d) continue;
        if (r > 8.0 * rho) {
          const int children = 1 << dim_;
          for (int mm = children - 1; mm >= 0; --mm) {
            auto ch = cell;
            for (int k = 0; k < dim_; ++k) {
              if (mm & (1 << k))
                ch[0][k] = c[k];
              else
                ch[1][k] = c[k];
            }
            stack.push_back(std::move(ch));
          }
          continue;
        }
        // lattice points in the half-open cell [lo, hi)
        const int last_axis = dim_ - 1;
        const long j0 = static_cast<long>(std::ceil(cell[0][last_axis] / step[last_axis]));
        const long j1 = static_cast<long>(std::ceil(cell[1][last_axis] / step[last_axis])) - 1;
        for (long j = j0; j <= j1; ++j) {
          const double sh = dim_ == 2 && (j & 1) ? 0.5 * step[0] : 0.0;
          bool empty = false;
          for (int k = 0; k < last_axis; ++k) {
            first[k] = static_cast<long>(std::ceil((cell[0][k] - sh) / step[k]));
            last[k] = static_cast<long>(std::ceil((cell[1][k] - sh) / step[k])) - 1;
            empty = empty || first[k] > last[k];
            idx[k] = first[k];
          }
          if (empty) continue;
          while (true) {
            for (int k = 0; k < last_axis; ++k) q[k] = idx[k] * step[k] + sh;
            q[last_axis] = j * step[last_axis];
            tick();
            const double d = tree_.nearest(q).second;
            if (d >= lo_d && d < hi_d && d > sqrt_eps_) out.push_back({q, rho, d});
            int k = 0;
            for (; k < last_axis; ++k) {
              if (++idx[k] <= last[k]) break;
              idx[k] = first[k];
            }
            if (k >= last_axis) break;
          }
        }
      }
    }
    return out;
  };

  // Kept centers hashed per power-of-two radius class.
  std::map<int, std::map<std::vector<long>, std::vector<std::size_t>>> buckets;
  std::vector<Candidate> kept;
  auto key_of = [&](const std::vector<double>& x, double size) {
    std::vector<long> key(dim_);
    for (int k = 0; k < dim_; ++k) key[k] = static_cast<long>(std::floor(x[k] / size));
    return key;
  };
  std::vector<long> off(dim_);
  long combos = 1;
  for (int k = 0; k < dim_; ++k) combos *= 3;
  // true when B(q, q.r) lies in the chi = 1 ball B(x_j, (d_j + sqrt eps) / 8) of a kept center
  auto covered = [&](const Candidate& q) {
    for (auto& [cls, grid] : buckets) {
      const double size = std::ldexp(1.0, cls + 1);
      const auto base = key_of(q.c, size);
      for (long m = 0; m < combos; ++m) {
        long t = m;
        for (int k = 0; k < dim_; ++k) {
          off[k] = base[k] + t % 3 - 1;
          t /= 3;
        }
        const auto it = grid.find(off);
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          const auto& p = kept[j];
          double e2 = 0.0;
          for (int k = 0; k < dim_; ++k) e2 += (p.c[k] - q.c[k]) * (p.c[k] - q.c[k]);
          if (std::sqrt(e2) + q.r <= (p.d + sqrt_eps_) / 8.0) return true;
        }
      }
    }
    return false;
  };
  auto keep = [&](const Candidate& q) {
    const int cls = static_cast<int>(std::ceil(std::log2((q.d + sqrt_eps_) / 8.0)));
    buckets[cls][key_of(q.c, std::ldexp(1.0, cls + 1))].push_back(kept.size());
    kept.push_back(q);
  };

  // Greedy cover over a fine candidate lattice, farthest first.
  auto fine = lattice(kBandsPerOctave, kFine);
  std::stable_sort(fine.begin(), fine.end(), [](const Candidate& a, const Candidate& b) { return a.d > b.d; });
  for (auto& q : fine)
    if (!covered(q)) keep(q);

  // Kept centers grouped by radius class for the support queries.
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_level;
  for (const auto& q : kept) {
    auto& lvl = by_level[static_cast<int>(std::floor(std::log2(q.d)))];
    lvl.first.insert(lvl.first.end(), q.c.begin(), q.c.end());
    lvl.second.push_back(q.d);
  }
  for (auto& [cls, lv] : by_level) {
    Level level;
    level.d = std::move(lv.second);
    for (double d : level.d) level.reach = std::max(level.reach, 0.25 * (d + sqrt_eps_));
    level.tree = KdTree(dim_, std::move(lv.first));
    count_ += level.d.size();
    levels_.push_back(std::move(level));
  }
}

template <class F>
void RegularizedDistance::visit(std::span<const double> x, F&& f) const {
  std::vector<std::size_t> hits;
  for (const auto& level : levels_) {
    level.tree.radius_query(x, level.reach, hits);
    for (std::size_t j : hits) {
      const double dj = level.d[j];
      const double scale = dj + sqrt_eps_;
      const auto cj = level.tree.point(j);
      double r2 = 0.0;
      for (int k = 0; k < dim_; ++k) r2 += (x[k] - cj[k]) * (x[k] - cj[k]);
      const double r = std::sqrt(r2) / scale;
      if (r < 0.25) f(dj, scale, cj, r);
    }
  }
}

double RegularizedDistance::operator()(std::span<const double> x) const {
  double v = eps_;
  visit(x, [&](double dj, double, std::span<const double>, double r) { v += dj * dj * whitney_bump(r); });
  return v;
}

std::vector<double> RegularizedDistance::gradient(std::span<const double> x) const {
  std::vector<double> g(dim_, 0.0);
  visit(x, [&](double dj, double scale, std::span<const double> cj, double r) {
    if (r == 0.0) return;
    const double w = dj * dj * whitney_bump_derivative(r) / (scale * scale * r);
    for (int k = 0; k < dim_; ++k) g[k] += w * (x[k] - cj[k]);
  });
  return g;
}

std::size_t RegularizedDistance::overlap_bound() const {
  std::size_t worst = 0;
  for (const auto& level : levels_)
    for (std::size_t j = 0; j < level.d.size(); ++j) {
      std::size_t n = 0;
      visit(level.tree.point(j), [&](double, double, std::span<const double>, double) { ++n; });
      worst = std::max(worst, n);
    }
  return worst;
}

double RegularizedDistance::equivalence_constant(const std::vector<std::vector<double>>& samples) const {
  double lo = 1e300, hi = 0.0;
  for (const auto& s : samples) {
    const double d = distance(s);
    const double ratio = (*this)(s) / (d * d + eps_);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return std::max(hi, 1.0 / lo);
}

RegularizedDistance whitney_phi(const PointCloud& gamma, double eps, const WhitneyOptions& opts) {
  return RegularizedDistance(gamma, eps, opts);
}

}  // namespace reslab
