#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reslab/eig.hpp"
#include "reslab/model.hpp"

namespace reslab {

/// Closed-disc count #{z : |z - E| <= C h}; ties within 1e-12 relative are
/// counted. With a computed region, throws WindowOutsideComputedRegion
/// unless the disc's bounding square lies inside it.
long count_in_disc(const std::vector<cplx>& values, double E, double C, double h,
                   const std::optional<Window>& computed = std::nullopt);
long count_in_disc(const std::vector<double>& values, double E, double C, double h,
                   const std::optional<Window>& computed = std::nullopt);
long count_in_disc(const ResonanceSet& rs, double E, double C, double h);

struct LiouvilleSpec {
  /// 1D window [-L, L] (or [0, L) when periodic); 2D box [-L, L]^2.
  double L = 10.0;
  /// Treat the 1D window as a circle of circumference L (periodic).
  bool periodic = false;
  int gauss_points = 64;     // per allowed interval (1D)
  int scan_points = 4096;    // turning-point bracketing (1D) / grid per axis (2D)
};

struct LiouvilleResult {
  double value = 0.0;
  /// The allowed region reaches a non-periodic window edge, so the
  /// unwindowed integral diverges; value is the windowed one.
  bool divergent = false;
};

/// Integral of dL over p^{-1}(E): for n = 1 the branch sum of dx / (2|xi|)
/// over the allowed region, for n = 2 pi times the area of {V < E + E0}.
/// Throws DegenerateEnergySurface if |grad p| < 1e-6 somewhere on the surface.
LiouvilleResult liouville_measure(const HamiltonianModel& model, double E, const LiouvilleSpec& spec = {});

/// 2 C h / (2 pi h)^n times the Liouville measure.
double weyl_prediction(double measure, double C, double h, int n);

using SpectrumSource = std::function<std::vector<double>(double h)>;

/// {h^2 k^2 - 1 : k in Z} restricted to |z| <= bound: V = 0 on a circle of circumference 2 pi.
std::vector<double> circle_lattice_spectrum(double h, double bound = 4.0);
/// {h (2n + 1) - 1}: -h^2 d^2 + x^2 - 1, up to `bound`.
std::vector<double> harmonic_spectrum(double h, double bound = 4.0);
/// Eigenvalues of the theta = 0 FD2 discretization of the model (dstev).
std::vector<double> numeric_bound_spectrum(const HamiltonianModel& model, double half_width, double h,
                                           double spacing_fraction = 0.25);

struct WeylRow {
  double h = 0.0;
  long count = 0;
  double predicted = 0.0;
  double relative_error = 0.0;
};

struct WeylReport {
  double E = 0.0, C = 0.0, measure = 0.0;
  int n = 1;
  std::vector<WeylRow> rows;
  bool has_fit = false;
  double slope = 0.0;
  std::string precondition = "closed orbits of the flow on p^{-1}(E) have Liouville measure zero (asserted by caller)";

  std::string to_json() const;
};

WeylReport check_infinitesimal_weyl(const SpectrumSource& source, const HamiltonianModel& model, double E, double C,
                                    const std::vector<double>& h_ladder, const LiouvilleSpec& spec = {});

struct CountingCurve {
  std::vector<double> h;      // strictly decreasing
  std::vector<long> counts;
  double C = 0.0;
  double E = 0.0;

  void write_csv(std::ostream& os) const;
};

struct WeylFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool inconclusive = false;  // r2 < 0.8
  bool flagged = false;       // fewer than 4 h values or span below 1 decade

  std::string to_json() const;
};

/// Least-squares slope of log N(h) against log(1/h). Throws DegenerateFit for
/// fewer than two points, a zero count or non-decreasing h.
WeylFit fit_weyl(const CountingCurve& curve);

}  // namespace reslab
