#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace reslab {

/// A point (x, xi) of T*R^n for n = 1 or 2. Unused trailing slots stay zero.
struct PhasePoint {
  int dim = 1;
  std::array<double, 2> x{};
  std::array<double, 2> xi{};

  static PhasePoint make1(double x, double xi) { return {1, {x, 0.0}, {xi, 0.0}}; }
  static PhasePoint make2(double x1, double x2, double xi1, double xi2) {
    return {2, {x1, x2}, {xi1, xi2}};
  }

  double x_norm() const { return std::sqrt(x_dot(x, x)); }
  double xi_norm2() const { return x_dot(xi, xi); }
  double x_dot_xi() const { return x_dot(x, xi); }

  bool finite() const {
    for (int i = 0; i < dim; ++i)
      if (!std::isfinite(x[i]) || !std::isfinite(xi[i])) return false;
    return true;
  }

  /// Flat layout (x1..xn, xi1..xin).
  std::array<double, 4> flat() const {
    std::array<double, 4> s{};
    for (int i = 0; i < dim; ++i) {
      s[i] = x[i];
      s[dim + i] = xi[i];
    }
    return s;
  }

  static PhasePoint from_flat(int dim, const double* s) {
    PhasePoint p;
    p.dim = dim;
    for (int i = 0; i < dim; ++i) {
      p.x[i] = s[i];
      p.xi[i] = s[dim + i];
    }
    return p;
  }

 private:
  double x_dot(const std::array<double, 2>& a, const std::array<double, 2>& b) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
  }
};

/// Tangent vector (dx/dt, dxi/dt) in the same layout as PhasePoint.
struct PhaseVector {
  int dim = 1;
  std::array<double, 2> dx{};
  std::array<double, 2> dxi{};
};

}  // namespace reslab
