#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reslab/model.hpp"

namespace reslab {

/// x -> x + i f(x) with f = 0 on [-R0, R0], f = x tan(theta) for |x| >= 2 R0,
/// blended by the quintic smoothstep B(s) = 6s^5 - 15s^4 + 10s^3:
/// f(x) = tan(theta) x B((|x| - R0) / R0) on R0 <= |x| <= 2 R0.
class ScalingContour {
 public:
  ScalingContour() = default;
  ScalingContour(double theta, double R0);

  double theta() const { return theta_; }
  double R0() const { return R0_; }

  double f(double x) const;
  double df(double x) const;
  double d2f(double x) const;
  cplx z(double x) const { return {x, f(x)}; }
  /// Jacobian g = 1 + i f'(x).
  cplx g(double x) const { return {1.0, df(x)}; }

  /// max |f'| / tan(theta) of the blend (about 3.33), a geometric constant.
  static double slope_constant();

 private:
  double theta_ = 0.0, R0_ = 1.0, tan_ = 0.0;
};

/// Throws BadAngle unless theta in [0, pi/4]; InvalidArgument unless R0 > 0.
ScalingContour build_contour(double theta, double R0);

/// N interior nodes of [x_min, x_max]; Dirichlet values at both ends.
struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  int N = 200;
  double dx() const { return (x_max - x_min) / (N + 1); }
  double node(int i) const { return x_min + (i + 1) * dx(); }
};

enum class Scheme { FD2, SEM };

struct AssembleOptions {
  Scheme scheme = Scheme::FD2;
  /// SEM polynomial order; elements are sized so the node count is close to grid.N.
  int sem_order = 12;
  /// Skip the grid-extent (|x_max - x_min| >= 4 R0) check; used for bound-state
  /// problems where the contour is unused.
  bool allow_short_grid = false;
};

struct ScaledOperator {
  Grid1D grid;
  double h = 0.0;
  ScalingContour contour;
  Scheme scheme = Scheme::FD2;
  std::vector<double> nodes;  // real parameter of each unknown
  Eigen::MatrixXcd matrix;

  void write_binary(std::ostream& os) const;
  std::string header_json() const;
};

/// Discretizes P_theta u = -h^2 g^{-1} (g^{-1} u')' + (V(x + i f) - E0) u.
/// FD2: symmetric three-point differences with g at half nodes, symmetrized
/// by G^{-1/2} K G^{-1/2}. SEM: GLL spectral elements with lumped mass,
/// element breakpoints at +-R0, +-2R0 and the potential's jumps.
/// Throws UnsupportedContinuation, GridTooCoarse (mean spacing > h/4) and
/// InvalidArgument (N < 200, short grid, non-Schrödinger or 2D model).
ScaledOperator assemble(const HamiltonianModel& model, const ScalingContour& contour, const Grid1D& grid, double h,
                        const AssembleOptions& opts = {});

/// Real symmetric tridiagonal FD2 matrix at theta = 0 (diagonal, off-diagonal).
std::pair<std::vector<double>, std::vector<double>> assemble_real_tridiagonal(const HamiltonianModel& model,
                                                                             const Grid1D& grid, double h);

/// p_theta(x, xi) = xi^2 / g(x)^2 + V(x + i f(x)) - E0.
cplx scaled_symbol(const HamiltonianModel& model, const ScalingContour& contour, const PhasePoint& pt);

/// min of -Im p_theta / theta over grid points with |p| <= eps0 and
/// R <= |x| <= x_max (n_x x n_xi samples).
double scan_scaled_symbol(const HamiltonianModel& model, const ScalingContour& contour, double eps0, double R,
                          double x_max, int n_x = 200, int n_xi = 200);

/// Default half-width L = max(2 R0, x with sqrt(E0) f(x) / h >= 10).
double default_half_width(const HamiltonianModel& model, const ScalingContour& contour, double h);

}  // namespace reslab
