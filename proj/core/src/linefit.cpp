#include "reslab/linefit.hpp"

#include <cmath>

#include "reslab/error.hpp"

namespace reslab {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "fit_line: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::DegenerateFit, "fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-300)) throw Error(ErrorCode::DegenerateFit, "fit_line: all abscissae coincide");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    sse += r * r;
  }
  if (syy <= 1e-300) {
    fit.r2 = 1.0;
  } else {
    fit.r2 = std::max(0.0, 1.0 - sse / syy);
  }
  return fit;
}

}  // namespace reslab
