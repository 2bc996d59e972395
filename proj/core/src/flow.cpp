#include "reslab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr std::size_t kMaxSteps = 2'000'000;

}  // namespace

FlowStepper::FlowStepper(const HamiltonianModel& model, const PhasePoint& rho0, double t0, double direction,
                         double tol)
    : model_(model), dim_(model.dim()), n_(2 * model.dim()), dir_(direction >= 0 ? 1.0 : -1.0), tol_(tol) {
  if (!(tol > 1e-13 && tol < 1e-3))
    throw Error(ErrorCode::InvalidArgument, "integrator tolerance must lie in (1e-13, 1e-3)");
  if (!rho0.finite()) throw Error(ErrorCode::InvalidArgument, "initial point is not finite");
  if (rho0.dim != dim_) throw Error(ErrorCode::ShapeMismatch, "initial point dimension differs from model");
  t_ = t_prev_ = t0;
  y_ = rho0.flat();
  k1_ = rhs(y_);
  h_ = initial_step();
  rcont_[0] = y_;
}

FlowStepper::State FlowStepper::rhs(const State& y) const {
  const PhaseVector v = model_.vector_field(PhasePoint::from_flat(dim_, y.data()));
  State f{};
  for (int i = 0; i < dim_; ++i) {
    f[i] = v.dx[i];
    f[dim_ + i] = v.dxi[i];
  }
  return f;
}

double FlowStepper::initial_step() const {
  double d0 = 0.0, d1n = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double sc = tol_ + tol_ * std::abs(y_[i]);
    d0 += (y_[i] / sc) * (y_[i] / sc);
    d1n += (k1_[i] / sc) * (k1_[i] / sc);
  }
  d0 = std::sqrt(d0 / n_);
  d1n = std::sqrt(d1n / n_);
  double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  return std::min(h, 0.1);
}

PhasePoint FlowStepper::state() const { return PhasePoint::from_flat(dim_, y_.data()); }

PhasePoint FlowStepper::dense(double t) const {
  const double span = t_ - t_prev_;
  if (span == 0.0) return state();
  const double th = (t - t_prev_) / span;
  const double th1 = 1.0 - th;
  State y{};
  for (int i = 0; i < n_; ++i)
    y[i] = rcont_[0][i] +
           th * (rcont_[1][i] + th1 * (rcont_[2][i] + th * (rcont_[3][i] + th1 * rcont_[4][i])));
  return PhasePoint::from_flat(dim_, y.data());
}

void FlowStepper::step(double t_stop) {
  const double remaining = (t_stop - t_) * dir_;
  if (remaining <= 0.0) return;
  State k2, k3, k4, k5, k6, k7, yt, y1;
  for (;;) {
    double h = std::min(h_, remaining);
    if (h < 1e-14 * std::max(1.0, std::abs(t_)))
      throw Error(ErrorCode::StepFailure, "step size underflow at t = " + std::to_string(t_));
    const double hs = h * dir_;
    const State& k1 = k1_;
    for (int i = 0; i < n_; ++i) yt[i] = y_[i] + hs * a21 * k1[i];
    k2 = rhs(yt);
    for (int i = 0; i < n_; ++i) yt[i] = y_[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(yt);
    for (int i = 0; i < n_; ++i) yt[i] = y_[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(yt);
    for (int i = 0; i < n_; ++i)
      yt[i] = y_[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(yt);
    for (int i = 0; i < n_; ++i)
      yt[i] = y_[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(yt);
    for (int i = 0; i < n_; ++i)
      y1[i] = y_[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(y1);
    double err = 0.0;
    bool finite = true;
    for (int i = 0; i < n_; ++i) {
      const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol_ + tol_ * std::max(std::abs(y_[i]), std::abs(y1[i]));
      err += (ei / sc) * (ei / sc);
      finite = finite && std::isfinite(y1[i]);
    }
    err = std::sqrt(err / n_);
    if (!finite || !std::isfinite(err)) {
      h_ = h * 0.1;
      ++rejected_;
      continue;
    }
    if (err <= 1.0) {
      // PI controller (Hairer's beta = 0.04).
      const double fac = std::clamp(0.9 * std::pow(err, -0.17) * std::pow(err_prev_, 0.04), 0.2, 10.0);
      err_prev_ = std::max(err, 1e-4);
      for (int i = 0; i < n_; ++i) {
        const double ydiff = y1[i] - y_[i];
        const double bspl = hs * k1[i] - ydiff;
        rcont_[0][i] = y_[i];
        rcont_[1][i] = ydiff;
        rcont_[2][i] = bspl;
        rcont_[3][i] = ydiff - hs * k7[i] - bspl;
        rcont_[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      t_prev_ = t_;
      t_ = (h == remaining) ? t_stop : t_ + hs;
      y_ = y1;
      k1_ = k7;
      h_ = h * (err == 0.0 ? 10.0 : fac);
      ++accepted_;
      return;
    }
    h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
    ++rejected_;
  }
}

Trajectory integrate(const HamiltonianModel& model, const PhasePoint& rho0, double t0, double t1, double tol,
                     const std::vector<double>& samples) {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  FlowStepper st(model, rho0, t0, dir, tol);
  Trajectory traj;
  const double p0 = model.eval_p(rho0);
  auto record = [&](double t, const PhasePoint& r) {
    traj.points.push_back({t, r});
    traj.energy_drift = std::max(traj.energy_drift, std::abs(model.eval_p(r) - p0));
  };
  std::size_t next = 0;
  if (samples.empty()) {
    record(t0, rho0);
  } else {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double s = samples[i];
      if ((s - t0) * dir < 0.0 || (s - t1) * dir > 0.0)
        throw Error(ErrorCode::InvalidArgument, "sample time outside the integration span");
      if (i > 0 && (s - samples[i - 1]) * dir <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "sample times must be strictly ordered");
    }
    while (next < samples.size() && samples[next] == t0) record(samples[next++], rho0);
  }
  std::size_t steps = 0;
  while ((t1 - st.t()) * dir > 0.0) {
    if (++steps > kMaxSteps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
    st.step(t1);
    if (samples.empty()) {
      record(st.t(), st.state());
    } else {
      while (next < samples.size() && (samples[next] - st.t()) * dir <= 0.0) {
        const double s = samples[next++];
        record(s, s == st.t() ? st.state() : st.dense(s));
      }
    }
  }
  traj.accepted_steps = st.accepted();
  traj.rejected_steps = st.rejected();
  return traj;
}

PhasePoint flow_to(const HamiltonianModel& model, const PhasePoint& rho0, double t, double tol) {
  if (t == 0.0) return rho0;
  FlowStepper st(model, rho0, 0.0, t >= 0 ? 1.0 : -1.0, tol);
  std::size_t steps = 0;
  while (st.t() != t) {
    if (++steps > kMaxSteps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
    st.step(t);
  }
  return st.state();
}

namespace {

double first_escape(const HamiltonianModel& model, const PhasePoint& rho0, double R, double T_max, double tol,
                    double dir) {
  auto escaped = [&](const PhasePoint& r) {
    return dir > 0 ? model.escaped_forward(r, R) : model.escaped_backward(r, R);
  };
  if (escaped(rho0)) return 0.0;
  FlowStepper st(model, rho0, 0.0, dir, tol);
  const double t_end = dir * T_max;
  std::size_t steps = 0;
  while (st.t() != t_end) {
    if (++steps > kMaxSteps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
    st.step(t_end);
    if (escaped(st.state())) {
      double lo = st.t_prev(), hi = st.t();
      for (int it = 0; it < 60 && std::abs(hi - lo) > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (escaped(st.dense(mid)))
          hi = mid;
        else
          lo = mid;
      }
      return std::abs(hi);
    }
  }
  return EscapeRecord::kTrapped;
}

}  // namespace

EscapeRecord escape_record(const HamiltonianModel& model, const PhasePoint& rho0, double R, double T_max,
                           double tol) {
  if (!(R > model.support_radius()))
    throw Error(ErrorCode::InvalidArgument, "escape radius must exceed the support radius");
  if (!(T_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "T_max must be positive");
  EscapeRecord rec;
  rec.escape_radius = R;
  rec.horizon = T_max;
  rec.forward_escape_t = first_escape(model, rho0, R, T_max, tol, 1.0);
  rec.backward_escape_t = first_escape(model, rho0, R, T_max, tol, -1.0);
  return rec;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace

std::vector<PhasePoint> generate_seeds(const HamiltonianModel& model, const SeedGrid& grid, double delta) {
  const int n = model.dim();
  if (static_cast<int>(grid.x_box.size()) != n)
    throw Error(ErrorCode::ShapeMismatch, "seed grid x_box must have one range per axis");
  if (grid.points_per_axis < 1) throw Error(ErrorCode::InvalidArgument, "points_per_axis must be >= 1");
  std::vector<PhasePoint> seeds;
  const int m = grid.points_per_axis;
  if (grid.mode == SeedGrid::Mode::Rejection) {
    if (static_cast<int>(grid.xi_box.size()) != n)
      throw Error(ErrorCode::ShapeMismatch, "seed grid xi_box must have one range per axis");
    std::vector<std::vector<double>> axes;
    for (int i = 0; i < n; ++i) axes.push_back(linspace(grid.x_box[i][0], grid.x_box[i][1], m));
    for (int i = 0; i < n; ++i) axes.push_back(linspace(grid.xi_box[i][0], grid.xi_box[i][1], m));
    const int d = 2 * n;
    std::vector<int> idx(d, 0);
    std::array<double, 4> s{};
    for (;;) {
      for (int k = 0; k < d; ++k) s[k] = axes[k][idx[k]];
      PhasePoint pt = PhasePoint::from_flat(n, s.data());
      if (std::abs(model.eval_p(pt)) <= delta) seeds.push_back(pt);
      int k = d - 1;
      while (k >= 0 && ++idx[k] == m) idx[k--] = 0;
      if (k < 0) break;
    }
    return seeds;
  }
  const std::vector<double> energies =
      grid.energies <= 1 ? std::vector<double>{0.0} : linspace(-delta, delta, grid.energies);
  if (model.kind() == HamiltonianModel::Kind::LinearModel) {
    if (grid.xi_box.size() != 2) throw Error(ErrorCode::ShapeMismatch, "linear model seeds need a xi_2 range");
    const auto ax1 = linspace(grid.x_box[0][0], grid.x_box[0][1], m);
    const auto ax2 = linspace(grid.x_box[1][0], grid.x_box[1][1], m);
    const auto ak2 = linspace(grid.xi_box[1][0], grid.xi_box[1][1], m);
    for (double x1 : ax1)
      for (double x2 : ax2)
        for (double k2 : ak2)
          for (double e : energies) seeds.push_back(PhasePoint::make2(x1, x2, e - x2 * k2, k2));
    return seeds;
  }
  const double e0 = model.energy_shift();
  if (n == 1) {
    for (double x : linspace(grid.x_box[0][0], grid.x_box[0][1], m))
      for (double e : energies) {
        const double k2 = e + e0 - model.potential().eval1(x);
        if (k2 < 0.0) continue;
        const double k = std::sqrt(k2);
        seeds.push_back(PhasePoint::make1(x, k));
        if (k > 0.0) seeds.push_back(PhasePoint::make1(x, -k));
      }
    return seeds;
  }
  const auto ax1 = linspace(grid.x_box[0][0], grid.x_box[0][1], m);
  const auto ax2 = linspace(grid.x_box[1][0], grid.x_box[1][1], m);
  for (double x1 : ax1)
    for (double x2 : ax2)
      for (double e : energies) {
        const double k2 = e + e0 - model.potential().eval({x1, x2});
        if (k2 < 0.0) continue;
        const double k = std::sqrt(k2);
        for (int a = 0; a < grid.angles; ++a) {
          const double phi = 2.0 * std::numbers::pi * a / grid.angles;
          seeds.push_back(PhasePoint::make2(x1, x2, k * std::cos(phi), k * std::sin(phi)));
          if (k == 0.0) break;
        }
      }
  return seeds;
}

PointCloud sample_trapped_set(const HamiltonianModel& model, const SeedGrid& grid,
                              const TrappedSampleOptions& opts) {
  const double R = opts.R < 0.0 ? model.support_radius() + 2.0 : opts.R;
  const auto seeds = generate_seeds(model, grid, opts.delta);
  std::vector<signed char> status(seeds.size(), 2);
  parallel_for(seeds.size(), [&](std::size_t i) {
    const EscapeRecord rec = escape_record(model, seeds[i], R, opts.T_max, opts.tol);
    if (rec.trapped())
      status[i] = 0;
    else if (rec.backward_trapped())
      status[i] = 1;
    else if (rec.forward_trapped())
      status[i] = -1;
  });
  const int n = model.dim();
  PointCloud cloud(2 * n);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const int s = status[i];
    if (s == 2 || (s != 0 && !opts.tagging)) continue;
    const auto flat = seeds[i].flat();
    cloud.add(std::span<const double>(flat.data(), 2 * n), s);
  }
  return cloud;
}

}  // namespace reslab
