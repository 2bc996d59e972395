#include <reslab/eig.hpp>
#include <reslab/error.hpp>
#include <reslab/scaledop.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "support/oracles.hpp"

using namespace reslab;

namespace {

HamiltonianModel harmonic() { return HamiltonianModel::schrodinger(Potential::quadratic(1.0)); }

}  // namespace

TEST(Contour, Examples) {
  const auto c = build_contour(0.3, 1.0);
  EXPECT_EQ(c.f(0.0), 0.0);
  const auto z = c.z(3.0);
  EXPECT_NEAR(std::arg(z), 0.3, 1e-10);
  EXPECT_GT(std::abs(z), 0.0);
  const auto zm = c.z(-3.0);
  EXPECT_NEAR(std::arg(-zm), 0.3, 1e-10);
}

TEST(Contour, BadAngle) {
  for (double t : {-0.1, 0.8, 3.0}) {
    try {
      build_contour(t, 1.0);
      FAIL() << t;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadAngle);
    }
  }
  EXPECT_THROW(build_contour(0.2, 0.0), Error);
}

TEST(ContourProperty, FlatCoreDerivativeBoundsAndArgument) {
  const double c = ScalingContour::slope_constant();
  // blend calculus: max over s of B(s) + (1 + s) B'(s)
  double oracle = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double s = i / 200000.0;
    const double B = s * s * s * (10 - 15 * s + 6 * s * s), dB = 30 * s * s * (1 - s) * (1 - s);
    oracle = std::max(oracle, B + (1 + s) * dB);
  }
  EXPECT_NEAR(c, oracle, 1e-6);
  for (double th : {0.05, 0.1, 0.3, 0.7})
    for (double R0 : {0.5, 1.0, 2.5}) {
      const auto k = build_contour(th, R0);
      for (double x = -4 * R0; x <= 4 * R0; x += R0 / 500) {
        if (std::abs(x) <= R0) {
          ASSERT_EQ(k.f(x), 0.0);
          ASSERT_EQ(k.df(x), 0.0);
        }
        ASSERT_LE(std::abs(k.df(x)), c * std::tan(th) * (1 + 1e-9));
        ASSERT_LE(std::abs(k.f(x)), std::tan(th) * std::abs(x) + 1e-12);
        ASSERT_LE(std::abs(k.d2f(x)), 20.0 * std::tan(th) / R0);
        if (x >= 0) {
          const double a = std::arg(k.g(x));
          ASSERT_GE(a, 0.0);
          ASSERT_LE(a, std::atan(c * std::tan(th)) + 1e-12);
        }
      }
      // C^1 matching by finite differences across both breakpoints
      for (double xb : {R0, 2 * R0}) {
        const double d = 1e-6 * R0;
        EXPECT_NEAR(k.df(xb - d), k.df(xb + d), 1e-4 * std::tan(th));
        EXPECT_NEAR(k.d2f(xb - d), k.d2f(xb + d), 1e-3 * std::tan(th) / R0);
      }
    }
}

TEST(Assemble, HarmonicOscillatorLowestLevels) {
  const double h = 0.05;
  Grid1D g{-3.0, 3.0, 1199};
  AssembleOptions o;
  o.allow_short_grid = true;
  const auto op = assemble(harmonic(), build_contour(0.0, 1.0), g, h, o);
  const auto spec = eigenvalues(op.matrix);
  std::vector<double> re;
  for (auto z : spec.eigenvalues) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(re[n], h * (2 * n + 1) - 1.0, 1e-4) << n;
}

TEST(AssembleProperty, HermitianAtThetaZero) {
  for (auto pot : {Potential::gaussian_bump(0.8, 0.5), Potential::square_barrier(0.0, 2.0, 1.5),
                   Potential::double_barrier()}) {
    const auto m = HamiltonianModel::schrodinger(pot);
    const double R0 = m.support_radius();
    Grid1D g{-2.5 * R0, 2.5 * R0, 400};
    const auto op = assemble(m, build_contour(0.0, R0), g, 0.2);
    EXPECT_LE((op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(op.matrix.imag().cwiseAbs().maxCoeff(), 0.0);
    const auto [d, e] = assemble_real_tridiagonal(m, g, 0.2);
    for (int i = 0; i < g.N; ++i) {
      EXPECT_DOUBLE_EQ(op.matrix(i, i).real(), d[i]);
      if (i + 1 < g.N) EXPECT_DOUBLE_EQ(op.matrix(i, i + 1).real(), e[i]);
    }
  }
}

TEST(AssembleProperty, InteriorRowsBitExact) {
  const auto m = HamiltonianModel::schrodinger(Potential::gaussian_bump(0.8, 0.5));
  const double R0 = m.support_radius();
  Grid1D g{-3 * R0, 3 * R0, 600};
  const auto a0 = assemble(m, build_contour(0.0, R0), g, 0.2);
  const auto a1 = assemble(m, build_contour(0.3, R0), g, 0.2);
  int checked = 0;
  for (int i = 0; i < g.N; ++i) {
    if (std::abs(g.node(i)) + g.dx() >= R0) continue;
    ++checked;
    for (int j = 0; j < g.N; ++j) ASSERT_EQ(a0.matrix(i, j), a1.matrix(i, j)) << i << ' ' << j;
  }
  EXPECT_GT(checked, 100);
}

TEST(Assemble, FreeSpectrumAlignsWithRotatedRay) {
  const auto m = HamiltonianModel::schrodinger(Potential::zero());
  const double th = 0.3, h = 0.1;
  const auto c = build_contour(th, 1.0);
  const double L = default_half_width(m, c, h);
  Grid1D g{-L, L, 800};
  const auto spec = eigenvalues(assemble(m, c, g, h).matrix);
  int n = 0;
  double worst = 0.0;
  for (auto z : spec.eigenvalues) {
    const auto w = z + 1.0;
    if (std::abs(w) < 0.05 || std::abs(w) > 0.5) continue;
    ++n;
    worst = std::max(worst, std::abs(std::arg(w) + 2 * th));
  }
  EXPECT_GE(n, 5);
  EXPECT_LE(worst, 0.02);
}

TEST(AssembleProperty, SecondOrderRefinement) {
  const double h = 0.2;
  std::vector<double> lam;
  for (int N : {199, 399, 799}) {
    Grid1D g{-4.0, 4.0, N};
    auto [d, e] = assemble_real_tridiagonal(harmonic(), g, h);
    lam.push_back(symmetric_tridiagonal_eigenvalues(d, e)[2]);
  }
  const double r = std::abs(lam[1] - lam[0]) / std::abs(lam[2] - lam[1]);
  EXPECT_GE(r, 3.5);
  EXPECT_LE(r, 4.5);
}

TEST(Assemble, Errors) {
  const auto bump = HamiltonianModel::schrodinger(Potential::gaussian_bump(0.8, 0.5));
  const double R0 = bump.support_radius();
  const auto c = build_contour(0.2, R0);
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  const auto table = HamiltonianModel::schrodinger(Potential::custom_table({-1, 0, 1}, {0, 1, 0}));
  EXPECT_EQ(code_of([&] { assemble(table, build_contour(0.2, 1.0), Grid1D{-4, 4, 400}, 0.1); }),
            ErrorCode::UnsupportedContinuation);
  EXPECT_EQ(code_of([&] { assemble(bump, c, Grid1D{-4 * R0, 4 * R0, 200}, 0.01); }), ErrorCode::GridTooCoarse);
  EXPECT_THROW(assemble(bump, c, Grid1D{-4 * R0, 4 * R0, 100}, 0.5), Error);
  EXPECT_THROW(assemble(bump, c, Grid1D{-R0, R0, 400}, 0.5), Error);
}

TEST(Assemble, BinaryExportLayout) {
  const auto m = HamiltonianModel::schrodinger(Potential::gaussian_bump(0.8, 0.5));
  const double R0 = m.support_radius();
  const auto op = assemble(m, build_contour(0.2, R0), Grid1D{-3 * R0, 3 * R0, 250}, 0.4);
  std::ostringstream os;
  op.write_binary(os);
  const auto s = os.str();
  ASSERT_EQ(s.size(), 250u * 250u * 16u);
  double v[2];
  std::memcpy(v, s.data() + (3 * 250 + 4) * 16, 16);
  EXPECT_EQ(v[0], op.matrix(3, 4).real());
  EXPECT_EQ(v[1], op.matrix(3, 4).imag());
  EXPECT_NE(op.header_json().find("\"N\""), std::string::npos);
}

TEST(Symbol, Examples) {
  const auto m = HamiltonianModel::schrodinger(Potential::gaussian_bump(0.8, 0.5));
  const double R0 = m.support_radius();
  const auto c = build_contour(0.3, R0);
  for (double x : {-0.5 * R0, 0.0, 0.9 * R0}) {
    const auto pt = PhasePoint::make1(x, 0.7);
    const auto ps = scaled_symbol(m, c, pt);
    EXPECT_EQ(ps.imag(), 0.0);
    EXPECT_NEAR(ps.real(), m.eval_p(pt), 1e-15);
  }
  const auto free = HamiltonianModel::schrodinger(Potential::zero());
  for (double th : {0.1, 0.3, 0.6}) {
    const auto cf = build_contour(th, 1.0);
    for (double x : {2.0, 3.5, -5.0}) {
      // xi dual to arc length on the ray: |g| xi_r with xi_r = 1
      const auto ps = scaled_symbol(free, cf, PhasePoint::make1(x, 1.0 / std::cos(th)));
      EXPECT_NEAR(ps.imag(), -std::sin(2 * th), 1e-12);
      EXPECT_LE(ps.imag(), -th);
    }
  }
  for (double th : {0.05, 0.2, 0.4})
    EXPECT_GE(scan_scaled_symbol(m, build_contour(th, R0), 0.1, 2 * R0, 6 * R0), 1.0);
}
