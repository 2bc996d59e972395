#include <reslab/error.hpp>
#include <reslab/model.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace reslab;

namespace {

std::vector<Potential> builtins() {
  return {Potential::zero(1),
          Potential::square_barrier(0.0, 2.0, 4.0),
          Potential::gaussian_bump(2.0, 1.0),
          Potential::gaussian_bump(1.5, 0.7, {0.3, -0.2}, 2),
          Potential::double_barrier(),
          Potential::three_bump(),
          Potential::custom_table({-1.0, -0.5, 0.0, 0.5, 1.0}, {0.0, 0.5, 1.0, 0.5, 0.0})};
}

}  // namespace

TEST(Model, FreeSymbolVanishesOnUnitMomentum) {
  const auto m = HamiltonianModel::schrodinger(Potential::zero(1));
  for (double x : {-3.0, 0.0, 7.5}) EXPECT_DOUBLE_EQ(eval_p(m, PhasePoint::make1(x, 1.0)), 0.0);
}

TEST(Model, GaussianAtOrigin) {
  const auto m = HamiltonianModel::schrodinger(Potential::gaussian_bump(2.0, 1.0));
  EXPECT_NEAR(eval_p(m, PhasePoint::make1(0.0, 0.0)), 1.0, 1e-15);
}

TEST(Model, SquareBarrierInside) {
  const auto m = HamiltonianModel::schrodinger(Potential::square_barrier(0.0, 1.0, 4.0));
  EXPECT_DOUBLE_EQ(eval_p(m, PhasePoint::make1(0.5, 1.0)), 4.0);
}

TEST(Model, GaussianContinuationAtI) {
  const auto pot = Potential::gaussian_bump(2.0, 1.0);
  const cplx v = eval_V_complex(pot, {cplx(0.0, 1.0), cplx{}});
  EXPECT_NEAR(v.real(), 2.0 * std::exp(1.0), 1e-13);
  EXPECT_NEAR(v.imag(), 0.0, 1e-13);
}

TEST(Model, SumOfGaussiansMatchesTermwiseOracle) {
  std::vector<Bump> bumps{{{-0.5, 0.0}, 1.3, 0.8}, {{0.9, 0.0}, -0.4, 0.5}};
  const auto pot = Potential::sum_of_bumps(bumps, 1);
  const cplx z(1.0, 0.1);
  cplx expect = 0.0;
  for (const auto& b : bumps) expect += b.amplitude * std::exp(-(z - b.center[0]) * (z - b.center[0]) / (b.width * b.width));
  EXPECT_LT(std::abs(eval_V_complex(pot, {z, cplx{}}) - expect), 1e-14);
}

TEST(Model, CustomTableHasNoContinuation) {
  const auto pot = Potential::custom_table({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  EXPECT_FALSE(pot.admits_continuation());
  try {
    eval_V_complex(pot, {cplx(0.5, 0.1), cplx{}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedContinuation);
  }
}

TEST(Model, VectorFieldExamples) {
  const auto free = HamiltonianModel::schrodinger(Potential::zero(1));
  auto v = hamiltonian_vector_field(free, PhasePoint::make1(0.3, -0.7));
  EXPECT_DOUBLE_EQ(v.dx[0], -1.4);
  EXPECT_DOUBLE_EQ(v.dxi[0], 0.0);

  const auto g = HamiltonianModel::schrodinger(Potential::gaussian_bump(2.0, 1.0));
  v = hamiltonian_vector_field(g, PhasePoint::make1(0.0, 0.0));
  EXPECT_NEAR(v.dx[0], 0.0, 1e-15);
  EXPECT_NEAR(v.dxi[0], 0.0, 1e-15);
  v = hamiltonian_vector_field(g, PhasePoint::make1(1.0, 0.0));
  EXPECT_NEAR(v.dx[0], 0.0, 1e-15);
  EXPECT_NEAR(v.dxi[0], 4.0 * std::exp(-1.0), 1e-14);  // -V'(1) for V = 2 exp(-x^2)
}

TEST(Model, CompactSupport) {
  for (const auto& pot : builtins()) {
    const double R = pot.support_radius();
    ASSERT_TRUE(std::isfinite(R));
    for (double s : {1.0, 1.5, 3.0})
      for (double a : {0.0, 1.0, 2.5}) {
        std::array<double, 2> x{R * s * std::cos(a), pot.dim() == 2 ? R * s * std::sin(a) : 0.0};
        if (pot.dim() == 1) x[0] = (a > 1.5 ? -1.0 : 1.0) * R * s;
        EXPECT_LE(std::abs(pot.eval(x)), 1e-14) << "kind " << static_cast<int>(pot.kind());
      }
  }
}

TEST(ModelProperty, EllipticAtLargeMomentum) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-5.0, 5.0), ua(0.0, 2.0 * M_PI), ur(4.0, 20.0);
  for (const auto& pot : builtins()) {
    const auto m = HamiltonianModel::schrodinger(pot);
    for (int i = 0; i < 1000; ++i) {
      const double r = ur(rng), a = ua(rng);
      const PhasePoint pt = pot.dim() == 1 ? PhasePoint::make1(ux(rng), a < M_PI ? r : -r)
                                           : PhasePoint::make2(ux(rng), ux(rng), r * std::cos(a), r * std::sin(a));
      ASSERT_GE(eval_p(m, pt), pt.xi_norm2() / 4.0);
    }
  }
}

TEST(ModelProperty, ContinuationAgreesOnRealAxis) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(-4.0, 4.0);
  for (const auto& pot : builtins()) {
    if (!pot.admits_continuation()) continue;
    for (int i = 0; i < 500; ++i) {
      const double x1 = ux(rng), x2 = pot.dim() == 2 ? ux(rng) : 0.0;
      const double v = pot.eval({x1, x2});
      const cplx vc = eval_V_complex(pot, {cplx(x1, 0.0), cplx(x2, 0.0)});
      ASSERT_LE(std::abs(vc - v), 1e-14 * std::max(1.0, std::abs(v)));
    }
  }
}

TEST(ModelProperty, VectorFieldMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  const double d = 1e-5;
  for (const auto& pot : builtins()) {
    if (pot.kind() == PotentialKind::SquareBarrier) continue;  // jumps
    const auto m = HamiltonianModel::schrodinger(pot);
    const int n = pot.dim();
    for (int i = 0; i < 200; ++i) {
      const auto pt = n == 1 ? PhasePoint::make1(u(rng), u(rng)) : PhasePoint::make2(u(rng), u(rng), u(rng), u(rng));
      const auto v = hamiltonian_vector_field(m, pt);
      for (int j = 0; j < n; ++j) {
        auto a = pt, b = pt;
        a.xi[j] += d;
        b.xi[j] -= d;
        EXPECT_NEAR(v.dx[j], (eval_p(m, a) - eval_p(m, b)) / (2 * d), 1e-7);
        a = pt;
        b = pt;
        a.x[j] += d;
        b.x[j] -= d;
        // custom tables use a 1e-6 central difference for the gradient
        EXPECT_NEAR(v.dxi[j], -(eval_p(m, a) - eval_p(m, b)) / (2 * d), pot.kind() == PotentialKind::CustomTable ? 1e-6 : 1e-7);
      }
    }
  }
}

TEST(Model, LinearModel) {
  const auto m = HamiltonianModel::linear_model();
  const auto pt = PhasePoint::make2(0.3, 0.5, -0.2, 2.0);
  EXPECT_DOUBLE_EQ(eval_p(m, pt), -0.2 + 0.5 * 2.0);
  const auto v = hamiltonian_vector_field(m, pt);
  EXPECT_DOUBLE_EQ(v.dx[0], 1.0);
  EXPECT_DOUBLE_EQ(v.dx[1], 0.5);
  EXPECT_DOUBLE_EQ(v.dxi[0], 0.0);
  EXPECT_DOUBLE_EQ(v.dxi[1], -2.0);
}
