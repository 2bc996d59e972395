#pragma once

#include <span>

namespace reslab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Coefficient of determination; 1 when the residual vanishes (including
  /// the constant-data case).
  double r2 = 0.0;
};

/// Ordinary least squares y ≈ slope * x + intercept. Needs >= 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace reslab
