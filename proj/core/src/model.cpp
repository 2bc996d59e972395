#include "reslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reslab/error.hpp"

namespace reslab {

namespace {

constexpr double kTruncation = 1e-14;

double bump_radius(const Bump& b) {
  const double a = std::abs(b.amplitude);
  if (a <= kTruncation) return 0.0;
  return b.width * std::sqrt(std::log(a / kTruncation));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::BadParams, what);
}

}  // namespace

Potential Potential::zero(int dim) {
  require(dim == 1 || dim == 2, "potential dimension must be 1 or 2");
  Potential p;
  p.kind_ = PotentialKind::SumOfBumps;
  p.dim_ = dim;
  return p;
}

Potential Potential::square_barrier(double a, double b, double height) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "square barrier needs a < b");
  require(std::isfinite(height), "square barrier height must be finite");
  Potential p;
  p.kind_ = PotentialKind::SquareBarrier;
  p.dim_ = 1;
  p.a_ = a;
  p.b_ = b;
  p.height_ = height;
  p.support_radius_ = std::max(std::abs(a), std::abs(b));
  return p;
}

Potential Potential::gaussian_bump(double amplitude, double width, std::array<double, 2> center,
                                   int dim) {
  Potential p = sum_of_bumps({Bump{center, amplitude, width}}, dim);
  p.kind_ = PotentialKind::GaussianBump;
  return p;
}

Potential Potential::sum_of_bumps(std::vector<Bump> bumps, int dim) {
  require(dim == 1 || dim == 2, "potential dimension must be 1 or 2");
  Potential p;
  p.kind_ = PotentialKind::SumOfBumps;
  p.dim_ = dim;
  for (auto& b : bumps) {
    require(b.width > 0.0 && std::isfinite(b.width), "bump widths must be positive");
    require(std::isfinite(b.amplitude), "bump amplitudes must be finite");
    if (dim == 1) b.center[1] = 0.0;
    const double c = std::hypot(b.center[0], b.center[1]);
    p.support_radius_ = std::max(p.support_radius_, c + bump_radius(b));
  }
  p.bumps_ = std::move(bumps);
  return p;
}

Potential Potential::quadratic(double coefficient, int dim) {
  require(dim == 1 || dim == 2, "potential dimension must be 1 or 2");
  Potential p;
  p.kind_ = PotentialKind::Quadratic;
  p.dim_ = dim;
  p.coef_ = coefficient;
  p.support_radius_ = coefficient == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return p;
}

Potential Potential::custom_table(std::vector<double> xs, std::vector<double> vs) {
  require(xs.size() == vs.size() && xs.size() >= 3, "custom table needs >= 3 matching samples");
  for (std::size_t i = 1; i < xs.size(); ++i) require(xs[i] > xs[i - 1], "table x must increase");
  Potential p;
  p.kind_ = PotentialKind::CustomTable;
  p.dim_ = 1;
  const std::size_t n = xs.size();
  // Natural spline second derivatives by the tridiagonal sweep.
  std::vector<double> m(n, 0.0), u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
    const double q = sig * m[i - 1] + 2.0;
    m[i] = (sig - 1.0) / q;
    const double d = (vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]) - (vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1]);
    u[i] = (6.0 * d / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / q;
  }
  m[n - 1] = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) m[k] = m[k] * m[k + 1] + u[k];
  m[0] = 0.0;
  p.support_radius_ = std::max(std::abs(xs.front()), std::abs(xs.back()));
  p.tx_ = std::move(xs);
  p.tv_ = std::move(vs);
  p.tm_ = std::move(m);
  return p;
}

Potential Potential::three_bump(double amplitude, double width, double side) {
  const double r = side / std::sqrt(3.0);
  std::vector<Bump> bumps;
  for (int k = 0; k < 3; ++k) {
    const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
    bumps.push_back(Bump{{r * std::cos(a), r * std::sin(a)}, amplitude, width});
  }
  return sum_of_bumps(std::move(bumps), 2);
}

Potential Potential::double_barrier(double amplitude, double separation, double width) {
  return sum_of_bumps({Bump{{-separation / 2.0, 0.0}, amplitude, width},
                       Bump{{separation / 2.0, 0.0}, amplitude, width}},
                      1);
}

std::vector<double> Potential::breakpoints() const {
  if (kind_ == PotentialKind::SquareBarrier) return {a_, b_};
  if (kind_ == PotentialKind::CustomTable) return {tx_.front(), tx_.back()};
  return {};
}

double Potential::max_value_1d(double lo, double hi) const {
  double best = -std::numeric_limits<double>::infinity();
  const int n = 20000;
  for (int i = 0; i <= n; ++i) best = std::max(best, eval1(lo + (hi - lo) * i / n));
  for (double b : breakpoints()) {
    if (b >= lo && b <= hi) {
      best = std::max(best, eval1(std::nextafter(b, -1e300)));
      best = std::max(best, eval1(std::nextafter(b, 1e300)));
    }
  }
  for (const auto& b : bumps_) {
    if (b.center[0] >= lo && b.center[0] <= hi) best = std::max(best, eval1(b.center[0]));
  }
  return best;
}

double Potential::spline(double x) const {
  if (x < tx_.front() || x > tx_.back()) return 0.0;
  const auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - tx_.begin());
  if (hi >= tx_.size()) hi = tx_.size() - 1;
  const std::size_t lo = hi - 1;
  const double h = tx_[hi] - tx_[lo];
  const double a = (tx_[hi] - x) / h;
  const double b = (x - tx_[lo]) / h;
  return a * tv_[lo] + b * tv_[hi] + ((a * a * a - a) * tm_[lo] + (b * b * b - b) * tm_[hi]) * h * h / 6.0;
}

double Potential::eval(const std::array<double, 2>& x) const {
  switch (kind_) {
    case PotentialKind::SquareBarrier:
      return (x[0] > a_ && x[0] < b_) ? height_ : 0.0;
    case PotentialKind::Quadratic:
      return coef_ * (x[0] * x[0] + (dim_ == 2 ? x[1] * x[1] : 0.0));
    case PotentialKind::CustomTable:
      return spline(x[0]);
    case PotentialKind::GaussianBump:
    case PotentialKind::SumOfBumps: {
      double v = 0.0;
      for (const auto& b : bumps_) {
        double r2 = (x[0] - b.center[0]) * (x[0] - b.center[0]);
        if (dim_ == 2) r2 += (x[1] - b.center[1]) * (x[1] - b.center[1]);
        v += b.amplitude * std::exp(-r2 / (b.width * b.width));
      }
      return v;
    }
  }
  return 0.0;
}

std::array<double, 2> Potential::gradient(const std::array<double, 2>& x) const {
  std::array<double, 2> g{};
  switch (kind_) {
    case PotentialKind::SquareBarrier:
      return g;
    case PotentialKind::Quadratic:
      g[0] = 2.0 * coef_ * x[0];
      if (dim_ == 2) g[1] = 2.0 * coef_ * x[1];
      return g;
    case PotentialKind::CustomTable: {
      const double step = 1e-6;
      g[0] = (spline(x[0] + step) - spline(x[0] - step)) / (2.0 * step);
      return g;
    }
    case PotentialKind::GaussianBump:
    case PotentialKind::SumOfBumps:
      for (const auto& b : bumps_) {
        const double dx = x[0] - b.center[0];
        const double dy = dim_ == 2 ? x[1] - b.center[1] : 0.0;
        const double w2 = b.width * b.width;
        const double e = b.amplitude * std::exp(-(dx * dx + dy * dy) / w2);
        g[0] += -2.0 * dx / w2 * e;
        if (dim_ == 2) g[1] += -2.0 * dy / w2 * e;
      }
      return g;
  }
  return g;
}

cplx Potential::eval_complex(const std::array<cplx, 2>& z) const {
  switch (kind_) {
    case PotentialKind::CustomTable:
      throw Error(ErrorCode::UnsupportedContinuation,
                  "custom-table potentials have no complex continuation");
    case PotentialKind::SquareBarrier:
      return {eval({z[0].real(), 0.0}), 0.0};
    case PotentialKind::Quadratic:
      return coef_ * (z[0] * z[0] + (dim_ == 2 ? z[1] * z[1] : cplx{}));
    case PotentialKind::GaussianBump:
    case PotentialKind::SumOfBumps: {
      cplx v{};
      for (const auto& b : bumps_) {
        cplx r2 = (z[0] - b.center[0]) * (z[0] - b.center[0]);
        if (dim_ == 2) r2 += (z[1] - b.center[1]) * (z[1] - b.center[1]);
        v += b.amplitude * std::exp(-r2 / (b.width * b.width));
      }
      return v;
    }
  }
  return {};
}

HamiltonianModel HamiltonianModel::schrodinger(Potential pot, double energy_shift) {
  HamiltonianModel m;
  m.kind_ = Kind::Schrodinger;
  m.pot_ = std::move(pot);
  m.e0_ = energy_shift;
  return m;
}

HamiltonianModel HamiltonianModel::linear_model() {
  HamiltonianModel m;
  m.kind_ = Kind::LinearModel;
  m.pot_ = Potential::zero(2);
  m.e0_ = 0.0;
  return m;
}

double HamiltonianModel::support_radius() const {
  return kind_ == Kind::LinearModel ? 0.0 : pot_.support_radius();
}

double HamiltonianModel::eval_p(const PhasePoint& pt) const {
  if (kind_ == Kind::LinearModel) return pt.xi[0] + pt.x[1] * pt.xi[1];
  return pt.xi_norm2() + pot_.eval(pt.x) - e0_;
}

PhaseVector HamiltonianModel::vector_field(const PhasePoint& pt) const {
  PhaseVector v;
  v.dim = dim();
  if (kind_ == Kind::LinearModel) {
    v.dx = {1.0, pt.x[1]};
    v.dxi = {0.0, -pt.xi[1]};
    return v;
  }
  const auto g = pot_.gradient(pt.x);
  for (int i = 0; i < v.dim; ++i) {
    v.dx[i] = 2.0 * pt.xi[i];
    v.dxi[i] = -g[i];
  }
  return v;
}

bool HamiltonianModel::escaped_forward(const PhasePoint& pt, double R) const {
  if (kind_ == Kind::LinearModel) return std::abs(pt.x[1]) > R;
  return pt.x_norm() > R && pt.x_dot_xi() > 0.0;
}

bool HamiltonianModel::escaped_backward(const PhasePoint& pt, double R) const {
  if (kind_ == Kind::LinearModel) return std::abs(pt.xi[1]) > R;
  return pt.x_norm() > R && pt.x_dot_xi() < 0.0;
}

double eval_p(const HamiltonianModel& model, const PhasePoint& pt) { return model.eval_p(pt); }

cplx eval_V_complex(const Potential& pot, const std::array<cplx, 2>& z) { return pot.eval_complex(z); }

PhaseVector hamiltonian_vector_field(const HamiltonianModel& model, const PhasePoint& pt) {
  return model.vector_field(pt);
}

}  // namespace reslab
