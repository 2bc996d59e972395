#include "reslab/scaledop.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "reslab/error.hpp"
#include "reslab/quadrature.hpp"

namespace reslab {

namespace {

double blend(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double blend1(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }
double blend2(double s) { return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }

}  // namespace

ScalingContour::ScalingContour(double theta, double R0) : theta_(theta), R0_(R0), tan_(std::tan(theta)) {}

ScalingContour build_contour(double theta, double R0) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 4.0 + 1e-15))
    throw Error(ErrorCode::BadAngle, "scaling angle must lie in [0, pi/4]");
  if (!(R0 > 0.0) || !std::isfinite(R0)) throw Error(ErrorCode::InvalidArgument, "R0 must be positive and finite");
  return ScalingContour(theta, R0);
}

double ScalingContour::f(double x) const {
  const double a = std::abs(x);
  if (a <= R0_ || tan_ == 0.0) return 0.0;
  const double v = a >= 2.0 * R0_ ? tan_ * a : tan_ * a * blend((a - R0_) / R0_);
  return x < 0 ? -v : v;
}

double ScalingContour::df(double x) const {
  const double a = std::abs(x);
  if (a <= R0_ || tan_ == 0.0) return 0.0;
  if (a >= 2.0 * R0_) return tan_;
  const double s = (a - R0_) / R0_;
  return tan_ * (blend(s) + a * blend1(s) / R0_);
}

double ScalingContour::d2f(double x) const {
  const double a = std::abs(x);
  if (a <= R0_ || a >= 2.0 * R0_ || tan_ == 0.0) return 0.0;
  const double s = (a - R0_) / R0_;
  const double v = tan_ * (2.0 * blend1(s) / R0_ + a * blend2(s) / (R0_ * R0_));
  return x < 0 ? -v : v;
}

double ScalingContour::slope_constant() {
  double best = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double s = i / 100000.0;
    best = std::max(best, blend(s) + (1.0 + s) * blend1(s));
  }
  return best;
}

namespace {

// V on the contour; real evaluation wherever the contour is undeformed.
cplx potential_on_contour(const Potential& pot, const ScalingContour& c, double x) {
  const double fx = c.f(x);
  if (fx == 0.0) return {pot.eval1(x), 0.0};
  return pot.eval_complex1(cplx{x, fx});
}

void check_model(const HamiltonianModel& model, const ScalingContour& contour) {
  if (model.kind() != HamiltonianModel::Kind::Schrodinger || model.dim() != 1)
    throw Error(ErrorCode::InvalidArgument, "scaled operators are built for 1D Schrödinger models");
  const Potential& pot = model.potential();
  if (contour.theta() > 0.0 && !pot.admits_continuation() && pot.support_radius() > contour.R0())
    throw Error(ErrorCode::UnsupportedContinuation,
                "potential has no continuation and extends past the scaling radius");
}

ScaledOperator assemble_fd2(const HamiltonianModel& model, const ScalingContour& c, const Grid1D& grid, double h) {
  const int N = grid.N;
  const double dx = grid.dx();
  const double k = h * h / (dx * dx);
  const double e0 = model.energy_shift();
  ScaledOperator op;
  op.grid = grid;
  op.h = h;
  op.contour = c;
  op.scheme = Scheme::FD2;
  op.nodes.resize(N);
  op.matrix = Eigen::MatrixXcd::Zero(N, N);
  std::vector<cplx> g(N), sq(N);
  for (int i = 0; i < N; ++i) {
    const double x = grid.node(i);
    op.nodes[i] = x;
    g[i] = c.g(x);
    sq[i] = std::sqrt(g[i]);
  }
  for (int i = 0; i < N; ++i) {
    const double x = op.nodes[i];
    const cplx gl = c.g(x - 0.5 * dx), gr = c.g(x + 0.5 * dx);
    const cplx diag = k * (1.0 / gl + 1.0 / gr) + g[i] * (potential_on_contour(model.potential(), c, x) - e0);
    op.matrix(i, i) = diag / (sq[i] * sq[i]);
    if (i + 1 < N) {
      const cplx off = -k / gr;
      op.matrix(i, i + 1) = off / (sq[i] * sq[i + 1]);
      op.matrix(i + 1, i) = op.matrix(i, i + 1);
    }
  }
  return op;
}

ScaledOperator assemble_sem(const HamiltonianModel& model, const ScalingContour& c, const Grid1D& grid, double h,
                            int p) {
  if (p < 2 || p > 32) throw Error(ErrorCode::InvalidArgument, "SEM order must lie in [2, 32]");
  const double lo = grid.x_min, hi = grid.x_max;
  std::vector<double> brk{lo, hi};
  auto add = [&](double b) {
    if (b > lo && b < hi) brk.push_back(b);
  };
  if (c.theta() > 0.0)
    for (double b : {-2.0 * c.R0(), -c.R0(), c.R0(), 2.0 * c.R0()}) add(b);
  for (double b : model.potential().breakpoints()) add(b);
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            brk.end());
  const double target = p * (hi - lo) / (grid.N + 1);
  std::vector<double> edges{brk.front()};
  for (std::size_t s = 0; s + 1 < brk.size(); ++s) {
    const double len = brk[s + 1] - brk[s];
    const int ne = std::max(1, static_cast<int>(std::ceil(len / target - 1e-9)));
    for (int e = 1; e <= ne; ++e) edges.push_back(e == ne ? brk[s + 1] : brk[s] + len * e / ne);
  }
  const int E = static_cast<int>(edges.size()) - 1;
  const int total = E * p + 1;
  const int N = total - 2;
  const LobattoRule gll = gauss_lobatto(p);
  const double e0 = model.energy_shift();

  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(total, total);
  std::vector<cplx> mass(total, cplx{});
  std::vector<double> xs(total);
  for (int e = 0; e < E; ++e) {
    const double a = edges[e], b = edges[e + 1];
    const double mid = 0.5 * (a + b), J = 0.5 * (b - a);
    std::vector<cplx> ginv(p + 1), gv(p + 1), vv(p + 1);
    for (int q = 0; q <= p; ++q) {
      const double x = mid + J * gll.nodes[q];
      // One-sided potential value at element ends.
      const double xv = q == 0 ? a + 1e-12 * (b - a) : (q == p ? b - 1e-12 * (b - a) : x);
      gv[q] = c.g(x);
      ginv[q] = 1.0 / gv[q];
      vv[q] = potential_on_contour(model.potential(), c, xv) - e0;
      xs[e * p + q] = q == p ? b : (q == 0 ? a : x);
    }
    for (int ai = 0; ai <= p; ++ai) {
      const int I = e * p + ai;
      for (int bi = 0; bi <= p; ++bi) {
        cplx s{};
        for (int q = 0; q <= p; ++q)
          s += gll.weights[q] * ginv[q] * gll.diff[q * (p + 1) + ai] * gll.diff[q * (p + 1) + bi];
        K(I, e * p + bi) += h * h * s / J;
      }
      K(I, I) += gll.weights[ai] * J * gv[ai] * vv[ai];
      mass[I] += gll.weights[ai] * J * gv[ai];
    }
  }
  ScaledOperator op;
  op.grid = grid;
  op.grid.N = N;
  op.h = h;
  op.contour = c;
  op.scheme = Scheme::SEM;
  op.nodes.assign(xs.begin() + 1, xs.end() - 1);
  op.matrix.resize(N, N);
  std::vector<cplx> sq(total);
  for (int i = 0; i < total; ++i) sq[i] = std::sqrt(mass[i]);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) op.matrix(i, j) = K(i + 1, j + 1) / (sq[i + 1] * sq[j + 1]);
  return op;
}

}  // namespace

ScaledOperator assemble(const HamiltonianModel& model, const ScalingContour& contour, const Grid1D& grid, double h,
                        const AssembleOptions& opts) {
  check_model(model, contour);
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "h must be positive");
  if (grid.N < 200) throw Error(ErrorCode::InvalidArgument, "grid needs N >= 200");
  if (!(grid.x_max > grid.x_min)) throw Error(ErrorCode::InvalidArgument, "grid needs x_max > x_min");
  if (contour.theta() > 0.0 && grid.x_max - grid.x_min < 4.0 * contour.R0() * (1.0 - 1e-12))
    throw Error(ErrorCode::InvalidArgument, "grid must extend over at least 4 R0");
  if (grid.dx() > h / 4.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::GridTooCoarse, "grid spacing exceeds h/4");
  if (opts.scheme == Scheme::SEM) return assemble_sem(model, contour, grid, h, opts.sem_order);
  return assemble_fd2(model, contour, grid, h);
}

std::pair<std::vector<double>, std::vector<double>> assemble_real_tridiagonal(const HamiltonianModel& model,
                                                                             const Grid1D& grid, double h) {
  check_model(model, ScalingContour(0.0, 1.0));
  if (grid.dx() > h / 4.0 * (1.0 + 1e-12)) throw Error(ErrorCode::GridTooCoarse, "grid spacing exceeds h/4");
  const double k = h * h / (grid.dx() * grid.dx());
  std::vector<double> d(grid.N), e(grid.N > 0 ? grid.N - 1 : 0, -k);
  for (int i = 0; i < grid.N; ++i) d[i] = 2.0 * k + model.potential().eval1(grid.node(i)) - model.energy_shift();
  return {d, e};
}

cplx scaled_symbol(const HamiltonianModel& model, const ScalingContour& contour, const PhasePoint& pt) {
  check_model(model, contour);
  if (!pt.finite()) throw Error(ErrorCode::InvalidArgument, "phase point is not finite");
  const double x = pt.x[0];
  const cplx g = contour.g(x);
  return pt.xi[0] * pt.xi[0] / (g * g) + potential_on_contour(model.potential(), contour, x) - model.energy_shift();
}

double scan_scaled_symbol(const HamiltonianModel& model, const ScalingContour& contour, double eps0, double R,
                          double x_max, int n_x, int n_xi) {
  if (!(contour.theta() > 0.0)) throw Error(ErrorCode::BadAngle, "scan needs theta > 0");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_x; ++i) {
    const double a = R + (x_max - R) * i / std::max(1, n_x - 1);
    for (double x : {a, -a}) {
      for (int j = 0; j < n_xi; ++j) {
        const double e = n_xi == 1 ? 0.0 : -eps0 + 2.0 * eps0 * j / (n_xi - 1);
        const double k2 = e + model.energy_shift() - model.potential().eval1(x);
        if (k2 < 0.0) continue;
        const double v = -scaled_symbol(model, contour, PhasePoint::make1(x, std::sqrt(k2))).imag();
        best = std::min(best, v / contour.theta());
      }
    }
  }
  return best;
}

double default_half_width(const HamiltonianModel& model, const ScalingContour& contour, double h) {
  if (!(contour.theta() > 0.0)) throw Error(ErrorCode::BadAngle, "default width needs theta > 0");
  const double k = std::sqrt(model.energy_shift());
  const double R0 = contour.R0();
  auto decay = [&](double x) { return k * contour.f(x) / h; };
  double x = 0.0;
  if (decay(2.0 * R0) >= 10.0) {
    double lo = R0, hi = 2.0 * R0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (decay(mid) >= 10.0 ? hi : lo) = mid;
    }
    x = hi;
  } else {
    x = 10.0 * h / (k * std::tan(contour.theta()));
  }
  return std::max(2.0 * R0, x);
}

void ScaledOperator::write_binary(std::ostream& os) const {
  static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
  const Eigen::Index n = matrix.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v[2] = {matrix(i, j).real(), matrix(i, j).imag()};
      os.write(reinterpret_cast<const char*>(v), sizeof v);
    }
}

std::string ScaledOperator::header_json() const {
  nlohmann::json j;
  j["N"] = matrix.rows();
  j["h"] = h;
  j["theta"] = contour.theta();
  j["R0"] = contour.R0();
  j["x_min"] = grid.x_min;
  j["x_max"] = grid.x_max;
  j["scheme"] = scheme == Scheme::SEM ? "sem" : "fd2";
  j["layout"] = "row-major complex128 (re, im) little-endian";
  return j.dump(2);
}

}  // namespace reslab
