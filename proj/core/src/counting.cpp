#include "reslab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "reslab/error.hpp"
#include "reslab/linefit.hpp"
#include "reslab/quadrature.hpp"
#include "reslab/scaledop.hpp"

namespace reslab {

namespace {

void check_window(double E, double r, const std::optional<Window>& computed) {
  if (!computed) return;
  const Window& w = *computed;
  if (E - r < w.re_min || E + r > w.re_max || -r < w.im_min || r > w.im_max)
    throw Error(ErrorCode::WindowOutsideComputedRegion, "counting disc leaves the computed region");
}

}  // namespace

long count_in_disc(const std::vector<cplx>& values, double E, double C, double h,
                   const std::optional<Window>& computed) {
  const double r = C * h;
  check_window(E, r, computed);
  const double lim = r * (1.0 + 1e-12);
  long n = 0;
  for (const cplx z : values) n += std::abs(z - E) <= lim ? 1 : 0;
  return n;
}

long count_in_disc(const std::vector<double>& values, double E, double C, double h,
                   const std::optional<Window>& computed) {
  const double r = C * h;
  check_window(E, r, computed);
  const double lim = r * (1.0 + 1e-12);
  long n = 0;
  for (const double z : values) n += std::abs(z - E) <= lim ? 1 : 0;
  return n;
}

long count_in_disc(const ResonanceSet& rs, double E, double C, double h) {
  return count_in_disc(rs.resonances, E, C, h, rs.window);
}

namespace {

LiouvilleResult liouville_1d(const HamiltonianModel& model, double E, const LiouvilleSpec& spec) {
  const Potential& V = model.potential();
  const double level = E + model.energy_shift();
  auto c = [&](double x) { return level - V.eval1(x); };
  const double a0 = spec.periodic ? 0.0 : -spec.L;
  const double b0 = spec.L;
  std::vector<double> xs;
  const int n = std::max(16, spec.scan_points);
  for (int i = 0; i <= n; ++i) xs.push_back(a0 + (b0 - a0) * i / n);
  for (double b : V.breakpoints())
    if (b > a0 && b < b0) xs.push_back(b);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  // Sign changes of c: continuous crossings inside a scan cell are bisected,
  // jumps at a scan point use the one-sided limits.
  auto root = [&](double lo, double hi) {
    const bool lo_pos = c(lo) > 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      ((c(mid) > 0.0) == lo_pos ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    // Continuous crossing: the surface is degenerate if V' vanishes there.
    const double jump = std::abs(c(std::nextafter(x, -1e300)) - c(std::nextafter(x, 1e300)));
    if (jump < 1e-9 && std::abs(V.gradient({x, 0.0})[0]) < 1e-6)
      throw Error(ErrorCode::DegenerateEnergySurface, "grad p vanishes on the energy surface");
    return x;
  };
  // A tangency (c touching 0 at a critical point of V) has no sign change.
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cx = c(xs[i]);
    const bool local_max = (i == 0 || cx >= c(xs[i - 1])) && (i + 1 == xs.size() || cx >= c(xs[i + 1]));
    if (local_max && std::abs(cx) < 1e-9 && std::abs(V.gradient({xs[i], 0.0})[0]) < 1e-6)
      throw Error(ErrorCode::DegenerateEnergySurface, "grad p vanishes on the energy surface");
  }
  std::vector<std::pair<double, double>> intervals;
  bool inside = c(std::nextafter(xs.front(), 1e300)) > 0.0;
  double start = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x = xs[i];
    const bool pos = c(std::nextafter(x, -1e300)) > 0.0;
    if (pos != inside) {
      const double t = root(xs[i - 1], std::nextafter(x, -1e300));
      if (inside) intervals.emplace_back(start, t);
      else start = t;
      inside = pos;
    }
    if (i + 1 == xs.size()) break;
    const bool pos_r = c(std::nextafter(x, 1e300)) > 0.0;
    if (pos_r != inside) {
      if (inside) intervals.emplace_back(start, x);
      else start = x;
      inside = pos_r;
    }
  }
  if (inside) intervals.emplace_back(start, xs.back());

  LiouvilleResult res;
  const GaussRule g = gauss_legendre(spec.gauss_points);
  const int panels = 4;
  // Pieces between breakpoints so the rule never straddles a jump of V.
  std::vector<std::pair<double, double>> pieces;
  for (const auto& [a, b] : intervals) {
    if (!(b > a)) continue;
    if (!spec.periodic && (a <= a0 || b >= b0)) res.divergent = true;
    double lo = a;
    for (double bp : V.breakpoints())
      if (bp > lo && bp < b) {
        pieces.emplace_back(lo, bp);
        lo = bp;
      }
    pieces.emplace_back(lo, b);
  }
  for (const auto& [a, b] : pieces) {
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double lo = std::numbers::pi * p / panels, hi = std::numbers::pi * (p + 1) / panels;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double phi = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[q];
        const double x = a + (b - a) * 0.5 * (1.0 - std::cos(phi));
        const double cx = c(x);
        if (cx <= 0.0) continue;
        s += 0.5 * (hi - lo) * g.weights[q] * 0.5 * (b - a) * std::sin(phi) / std::sqrt(cx);
      }
    }
    res.value += s;  // two branches of dx / (2 |xi|)
  }
  return res;
}

LiouvilleResult liouville_2d(const HamiltonianModel& model, double E, const LiouvilleSpec& spec) {
  const Potential& V = model.potential();
  const double level = E + model.energy_shift();
  const int n = std::clamp(spec.scan_points, 16, 4000);
  const double cell = 2.0 * spec.L / n;
  LiouvilleResult res;
  long inside = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::array<double, 2> x{-spec.L + (i + 0.5) * cell, -spec.L + (j + 0.5) * cell};
      const double c = level - V.eval(x);
      if (std::abs(c) < 1e-9) {
        const auto gr = V.gradient(x);
        if (std::hypot(gr[0], gr[1]) < 1e-6)
          throw Error(ErrorCode::DegenerateEnergySurface, "grad p vanishes on the energy surface");
      }
      if (c > 0.0) {
        ++inside;
        if (i == 0 || j == 0 || i == n - 1 || j == n - 1) res.divergent = true;
      }
    }
  res.value = std::numbers::pi * inside * cell * cell;
  return res;
}

}  // namespace

LiouvilleResult liouville_measure(const HamiltonianModel& model, double E, const LiouvilleSpec& spec) {
  if (model.kind() != HamiltonianModel::Kind::Schrodinger)
    throw Error(ErrorCode::InvalidArgument, "Liouville measure is implemented for Schrödinger symbols");
  if (!(spec.L > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be positive");
  return model.dim() == 1 ? liouville_1d(model, E, spec) : liouville_2d(model, E, spec);
}

double weyl_prediction(double measure, double C, double h, int n) {
  return 2.0 * C * h / std::pow(2.0 * std::numbers::pi * h, n) * measure;
}

std::vector<double> circle_lattice_spectrum(double h, double bound) {
  std::vector<double> v;
  const long kmax = static_cast<long>(std::floor(std::sqrt(bound + 1.0) / h)) + 1;
  for (long k = -kmax; k <= kmax; ++k) {
    const double z = h * h * static_cast<double>(k) * static_cast<double>(k) - 1.0;
    if (z <= bound) v.push_back(z);
  }
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> harmonic_spectrum(double h, double bound) {
  std::vector<double> v;
  for (long n = 0;; ++n) {
    const double z = h * (2.0 * static_cast<double>(n) + 1.0) - 1.0;
    if (z > bound) break;
    v.push_back(z);
  }
  return v;
}

std::vector<double> numeric_bound_spectrum(const HamiltonianModel& model, double half_width, double h,
                                           double spacing_fraction) {
  Grid1D grid;
  grid.x_min = -half_width;
  grid.x_max = half_width;
  grid.N = static_cast<int>(std::ceil(2.0 * half_width / (spacing_fraction * h))) - 1;
  grid.N = std::max(grid.N, 200);
  auto [d, e] = assemble_real_tridiagonal(model, grid, h);
  return symmetric_tridiagonal_eigenvalues(std::move(d), std::move(e));
}

WeylReport check_infinitesimal_weyl(const SpectrumSource& source, const HamiltonianModel& model, double E, double C,
                                    const std::vector<double>& h_ladder, const LiouvilleSpec& spec) {
  WeylReport rep;
  rep.E = E;
  rep.C = C;
  rep.n = model.dim();
  rep.measure = liouville_measure(model, E, spec).value;
  for (double h : h_ladder) {
    WeylRow row;
    row.h = h;
    row.count = count_in_disc(source(h), E, C, h);
    row.predicted = weyl_prediction(rep.measure, C, h, rep.n);
    row.relative_error = std::abs(static_cast<double>(row.count) - row.predicted) / row.predicted;
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : rep.rows) {
      if (r.count <= 0) continue;
      x.push_back(std::log(1.0 / r.h));
      y.push_back(std::log(static_cast<double>(r.count)));
    }
    if (x.size() >= 2) {
      rep.has_fit = true;
      rep.slope = fit_line(x, y).slope;
    }
  }
  return rep;
}

std::string WeylReport::to_json() const {
  nlohmann::json j;
  j["E"] = E;
  j["C"] = C;
  j["n"] = n;
  j["liouville_measure"] = measure;
  j["precondition"] = precondition;
  auto& rows_j = j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"h", r.h}, {"count", r.count}, {"predicted", r.predicted}, {"relative_error", r.relative_error}});
  if (has_fit) j["slope"] = slope;
  return j.dump(2);
}

void CountingCurve::write_csv(std::ostream& os) const {
  os << "h,count\n";
  char buf[64];
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%ld\n", h[i], counts[i]);
    os << buf;
  }
}

WeylFit fit_weyl(const CountingCurve& curve) {
  if (curve.h.size() != curve.counts.size()) throw Error(ErrorCode::ShapeMismatch, "h and counts differ in length");
  if (curve.h.size() < 2) throw Error(ErrorCode::DegenerateFit, "Weyl fit needs at least two h values");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.h.size(); ++i) {
    if (i > 0 && !(curve.h[i] < curve.h[i - 1])) throw Error(ErrorCode::DegenerateFit, "h values must decrease");
    if (curve.counts[i] <= 0) throw Error(ErrorCode::DegenerateFit, "zero count cannot enter a log fit");
    x.push_back(std::log(1.0 / curve.h[i]));
    y.push_back(std::log(static_cast<double>(curve.counts[i])));
  }
  const LineFit lf = fit_line(x, y);
  WeylFit f;
  f.slope = lf.slope;
  f.intercept = lf.intercept;
  f.r2 = lf.r2;
  f.inconclusive = lf.r2 < 0.8;
  f.flagged = curve.h.size() < 4 || std::log10(curve.h.front() / curve.h.back()) < 1.0;
  return f;
}

std::string WeylFit::to_json() const {
  nlohmann::json j;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["r2"] = r2;
  j["inconclusive"] = inconclusive;
  j["flagged"] = flagged;
  return j.dump(2);
}

}  // namespace reslab
