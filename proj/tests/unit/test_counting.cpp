#include <reslab/counting.hpp>
#include <reslab/error.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "support/oracles.hpp"

using namespace reslab;

namespace {

const double kPi = std::numbers::pi;

HamiltonianModel free_model() { return HamiltonianModel::schrodinger(Potential::zero()); }
HamiltonianModel harmonic() { return HamiltonianModel::schrodinger(Potential::quadratic(1.0)); }

LiouvilleSpec circle_spec() {
  LiouvilleSpec s;
  s.L = 2 * kPi;
  s.periodic = true;
  return s;
}

CountingCurve curve_of(std::vector<double> h, std::vector<long> counts) {
  CountingCurve c;
  c.h = std::move(h);
  c.counts = std::move(counts);
  return c;
}

}  // namespace

TEST(CountInDisc, Examples) {
  EXPECT_EQ(count_in_disc(std::vector<cplx>{}, 0.0, 1.0, 0.1), 0);
  for (double h : {0.1, 0.05, 0.013, 0.002})
    EXPECT_EQ(count_in_disc(circle_lattice_spectrum(h), 0.0, 1.0, h), oracle::circle_count(h, 0.0, 1.0)) << h;
  EXPECT_EQ(oracle::circle_count(0.01, 0.0, 1.0), 2);
  for (double h : {0.1, 0.05, 0.013, 0.002}) {
    EXPECT_EQ(count_in_disc(harmonic_spectrum(h), 0.0, 2.0, h), oracle::harmonic_count(h, 0.0, 2.0)) << h;
  }
  EXPECT_EQ(count_in_disc(harmonic_spectrum(0.013), 0.0, 2.0, 0.013), 2);
}

TEST(CountInDisc, ClosedDiscAndComputedRegion) {
  const std::vector<cplx> z{{0.3, 0.4}, {0.0, -0.49}};
  EXPECT_EQ(count_in_disc(z, 0.0, 5.0, 0.1), 2);
  EXPECT_EQ(count_in_disc(z, 0.0, 4.9, 0.1), 1);
  try {
    count_in_disc(z, 0.0, 5.0, 0.1, Window{-0.2, 0.2, -0.2, 0.2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowOutsideComputedRegion);
  }
  EXPECT_EQ(count_in_disc(z, 0.0, 5.0, 0.1, Window{-1, 1, -1, 1}), 2);
}

TEST(CountInDiscProperty, MonotoneInCAndRadius) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<cplx> z;
  for (int i = 0; i < 500; ++i) z.emplace_back(U(rng), U(rng));
  long prev = 0;
  for (double C = 0.0; C <= 20.0; C += 0.25) {
    const long n = count_in_disc(z, 0.1, C, 0.07);
    EXPECT_GE(n, prev);
    prev = n;
  }
  prev = 0;
  for (double h = 0.001; h <= 0.2; h += 0.003) {
    const long n = count_in_disc(z, 0.1, 3.0, h);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Liouville, CircleModel) {
  const auto r = liouville_measure(free_model(), 0.0, circle_spec());
  EXPECT_NEAR(r.value, 2 * kPi, 1e-10);
  EXPECT_FALSE(r.divergent);
}

TEST(Liouville, HomogeneityHalvesIntegrand) {
  // E + 1 -> 4 (E + 1) doubles |xi| on the free branches.
  const auto a = liouville_measure(free_model(), 0.0, circle_spec());
  const auto b = liouville_measure(free_model(), 3.0, circle_spec());
  EXPECT_NEAR(b.value, 0.5 * a.value, 1e-10);
}

TEST(Liouville, SquareWellIsWindowedAndFlagged) {
  const auto m = HamiltonianModel::schrodinger(Potential::square_barrier(0.0, 1.0, -1.0));
  LiouvilleSpec s;
  s.L = 5.0;
  const auto r = liouville_measure(m, 0.0, s);
  EXPECT_TRUE(r.divergent);
  // branch sum: 1 per unit length outside, 1/sqrt 2 inside
  EXPECT_NEAR(r.value, (2 * 5.0 - 1.0) + 1.0 / std::sqrt(2.0), 1e-8);
}

TEST(Liouville, HarmonicOscillatorIsPi) {
  LiouvilleSpec s;
  s.L = 3.0;
  const auto r = liouville_measure(harmonic(), 0.0, s);
  EXPECT_NEAR(r.value, kPi, 1e-6);
  EXPECT_FALSE(r.divergent);
}

TEST(Liouville, DegenerateSurface) {
  // V = x^2 at E = -1: p^{-1}(E) = {(0, 0)} where grad p = 0.
  LiouvilleSpec s;
  s.L = 3.0;
  try {
    liouville_measure(harmonic(), -1.0, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateEnergySurface);
  }
}

TEST(Weyl, CircleModelWithinLatticeBound) {
  const std::vector<double> ladder{1.0 / 10, 1.0 / 20, 1.0 / 50, 1.0 / 100};
  const auto rep = check_infinitesimal_weyl([](double h) { return circle_lattice_spectrum(h); }, free_model(), 0.0,
                                            1.0, ladder, circle_spec());
  ASSERT_EQ(rep.rows.size(), ladder.size());
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.count, oracle::circle_count(row.h, 0.0, 1.0));
    EXPECT_LE(row.relative_error, 1.0 / std::sqrt(static_cast<double>(row.count)) + 0.1);
  }
}

TEST(WeylProperty, CircleErrorNonincreasingAlongLadder) {
  for (double C : {1.0, 3.0, 10.0}) {
    const std::vector<double> ladder{1.0 / 20, 1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320};
    const auto rep = check_infinitesimal_weyl([](double h) { return circle_lattice_spectrum(h); }, free_model(), 0.0,
                                              C, ladder, circle_spec());
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      EXPECT_LE(rep.rows[i].relative_error, rep.rows[i - 1].relative_error + 1e-12) << C << ' ' << i;
  }
}

TEST(Weyl, HarmonicOscillator) {
  const auto src = [](double h) { return harmonic_spectrum(h); };
  LiouvilleSpec s;
  s.L = 3.0;
  // closed disc at C = 5, h = 0.01 catches the tie levels 2n + 1 = 95 and 105
  const auto tie = check_infinitesimal_weyl(src, harmonic(), 0.0, 5.0, {0.01}, s);
  ASSERT_EQ(tie.rows.size(), 1u);
  EXPECT_FALSE(tie.has_fit);
  EXPECT_EQ(tie.rows[0].count, oracle::harmonic_count(0.01, 0.0, 5.0));
  EXPECT_NEAR(tie.rows[0].predicted, 5.0, 1e-6);
  EXPECT_NEAR(tie.rows[0].relative_error, 0.2, 1e-6);
  const auto rep = check_infinitesimal_weyl(src, harmonic(), 0.0, 10.0, {0.02, 0.01, 0.005}, s);
  EXPECT_LE(rep.rows.back().relative_error, 0.15);
  EXPECT_NE(rep.to_json().find("Liouville measure zero"), std::string::npos);
}

TEST(Weyl, NumericBoundSpectrumTracksHarmonic) {
  const auto ev = numeric_bound_spectrum(harmonic(), 3.0, 0.05, 0.1);
  ASSERT_GE(ev.size(), 5u);
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(ev[n], 0.05 * (2 * n + 1) - 1.0, 2e-4);
}

TEST(FitWeyl, Examples) {
  const std::vector<double> h{0.1, 0.05, 0.02, 0.01, 0.005};
  std::vector<long> pw, cst;
  for (double x : h) {
    pw.push_back(std::lround(1000.0 / x));
    cst.push_back(7);
  }
  EXPECT_NEAR(fit_weyl(curve_of(h, pw)).slope, 1.0, 1e-6);
  EXPECT_NEAR(fit_weyl(curve_of(h, cst)).slope, 0.0, 1e-6);

  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<double> hs;
  std::vector<long> noisy;
  for (int i = 0; i < 12; ++i) {
    const double x = 0.2 * std::pow(0.6, i);
    hs.push_back(x);
    noisy.push_back(std::lround(1000.0 * std::pow(x, -0.63) * (1.0 + 0.1 * noise(rng))));
  }
  const auto f = fit_weyl(curve_of(hs, noisy));
  EXPECT_NEAR(f.slope, 0.63, 0.05);
  EXPECT_FALSE(f.inconclusive);
  EXPECT_FALSE(f.flagged);
}

TEST(FitWeyl, Degenerate) {
  auto code = [](const CountingCurve& c) {
    try {
      fit_weyl(c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code(curve_of({0.1}, {3})), ErrorCode::DegenerateFit);
  EXPECT_EQ(code(curve_of({0.1, 0.05}, {3, 0})), ErrorCode::DegenerateFit);
  EXPECT_EQ(code(curve_of({0.05, 0.1}, {3, 4})), ErrorCode::DegenerateFit);
  EXPECT_TRUE(fit_weyl(curve_of({0.1, 0.05, 0.04}, {2, 3, 4})).flagged);
}

TEST(FitWeylProperty, InvariantUnderCommonRescaling) {
  const std::vector<double> h{0.1, 0.06, 0.03, 0.012, 0.005};
  const std::vector<long> n{3, 5, 9, 18, 37};
  const auto a = fit_weyl(curve_of(h, n));
  for (double s : {0.1, 3.0, 17.0}) {
    std::vector<double> hs;
    for (double x : h) hs.push_back(s * x);
    const auto b = fit_weyl(curve_of(hs, n));
    EXPECT_NEAR(b.slope, a.slope, 1e-12);
    EXPECT_NEAR(b.r2, a.r2, 1e-12);
  }
}

TEST(CountingCurve, Csv) {
  auto c = curve_of({0.1, 0.05}, {2, 3});
  c.C = 2.0;
  std::ostringstream os;
  c.write_csv(os);
  EXPECT_NE(os.str().find("0.05"), std::string::npos);
}
