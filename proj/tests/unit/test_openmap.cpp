#include <reslab/eig.hpp>
#include <reslab/error.hpp>
#include <reslab/openmap.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "support/oracles.hpp"

using namespace reslab;

namespace {

// Direct entrywise construction for k = 1: A = F_9^* diag(F_3, 0, F_3).
Eigen::MatrixXcd hand_built_9x9(bool opened) {
  auto F = [](int M, int j, int l) {
    return std::polar(1.0 / std::sqrt(M), -2.0 * std::numbers::pi * (j + 0.5) * (l + 0.5) / M);
  };
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(9, 9);
  for (int blk = 0; blk < 3; ++blk) {
    if (opened && blk == 1) continue;
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) B(3 * blk + j, 3 * blk + l) = F(3, j, l);
  }
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(9, 9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int m = 0; m < 9; ++m) A(i, j) += std::conj(F(9, m, i)) * B(m, j);
  return A;
}

double op_norm(const Eigen::MatrixXcd& A) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
}

}  // namespace

TEST(OpenMap, NormAndUnitarity) {
  for (int k : {1, 2, 3, 4}) {
    const auto open = build_open_map(k);
    EXPECT_EQ(open.N, static_cast<int>(std::lround(std::pow(3, k))));
    EXPECT_EQ(open.matrix.rows(), 3 * open.N);
    EXPECT_LE(op_norm(open.matrix), 1.0 + 1e-10);
    const auto closed = build_open_map(k, false);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(3 * closed.N, 3 * closed.N);
    EXPECT_LE((closed.matrix.adjoint() * closed.matrix - I).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(OpenMap, K1MatchesHandBuiltOracle) {
  for (bool opened : {true, false}) {
    const auto map = build_open_map(1, opened);
    const auto oracle_A = hand_built_9x9(opened);
    EXPECT_LE((map.matrix - oracle_A).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(oracle::hausdorff(open_map_eigenvalues(map), eigenvalues(oracle_A).eigenvalues), 1e-12);
  }
}

TEST(OpenMap, BlockSpectrumMatchesFullSolve) {
  const auto map = build_open_map(3);
  const auto block = open_map_eigenvalues(map);
  ASSERT_EQ(block.size(), 81u);
  EXPECT_LE(oracle::hausdorff(block, eigenvalues(map.matrix).eigenvalues), 1e-9);
}

TEST(OpenMap, ClosedSpectrumMatchesFullSolveWithMultiplicity) {
  for (bool opened : {false, true}) {
    const auto map = build_open_map(2, opened);
    const auto split = open_map_eigenvalues(map);
    auto full = eigenvalues(map.matrix).eigenvalues;
    ASSERT_EQ(split.size(), full.size());
    // greedy matching so repeated eigenvalues are counted
    std::vector<bool> used(full.size(), false);
    for (auto z : split) {
      std::size_t best = full.size();
      for (std::size_t i = 0; i < full.size(); ++i)
        if (!used[i] && (best == full.size() || std::abs(full[i] - z) < std::abs(full[best] - z))) best = i;
      ASSERT_LT(best, full.size());
      used[best] = true;
      EXPECT_LE(std::abs(full[best] - z), 1e-9);
    }
  }
}

TEST(OpenMap, ReflectionSymmetry) {
  const auto map = build_open_map(2, false);
  const auto n = map.matrix.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) EXPECT_NEAR(std::abs(map.matrix(i, j) - map.matrix(n - 1 - i, n - 1 - j)), 0.0, 1e-12);
}

TEST(OpenMap, SizeErrors) {
  try {
    build_open_map(8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeOverflow);
  }
  EXPECT_THROW(build_open_map(0), Error);
}

TEST(OpenMapProperty, SpectrumInClosedUnitDisc) {
  for (int k = 1; k <= 4; ++k)
    for (auto z : open_map_eigenvalues(build_open_map(k))) EXPECT_LE(std::abs(z), 1.0 + 1e-10);
}

TEST(CountModuli, Examples) {
  const auto map = build_open_map(4);
  const auto ev = open_map_eigenvalues(map);
  const std::vector<double> ladder{0.0, 0.05, 0.2, 0.5, 0.8, 0.99};
  const auto c = count_moduli(ev, ladder, 4, map.N);
  EXPECT_EQ(c.counts.front(), 3 * map.N);
  // independent count from the unreduced eigensolve
  const auto full = eigenvalues(map.matrix).eigenvalues;
  long direct = 0;
  for (auto z : full) direct += std::abs(z) >= 0.99;
  EXPECT_EQ(c.counts.back(), direct);
  EXPECT_LE(c.counts.back(), 5);
  for (std::size_t i = 1; i < c.counts.size(); ++i) EXPECT_LE(c.counts[i], c.counts[i - 1]);
}

TEST(CountModuli, Reproducible) {
  const auto a = count_moduli(open_map_eigenvalues(build_open_map(5)), {0.2, 0.5, 0.8}, 5, 243);
  const auto b = count_moduli(open_map_eigenvalues(build_open_map(5)), {0.2, 0.5, 0.8}, 5, 243);
  EXPECT_EQ(a.counts, b.counts);
  std::ostringstream x, y;
  write_counting_csv(x, {a});
  write_counting_csv(y, {b});
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(x.str().substr(0, x.str().find('\n')), "k,N,r,count");
}

TEST(FitWeylExponent, ClosedVariantIsUnitary) {
  std::vector<ModulusCounting> cs;
  for (int k = 3; k <= 6; ++k) {
    const auto m = build_open_map(k, false);
    cs.push_back(count_moduli(open_map_eigenvalues(m), {0.5}, k, m.N));
  }
  EXPECT_NEAR(fit_weyl_exponent(cs, 0.5).slope, 1.0, 0.05);
}

TEST(FitWeylExponent, OpenedMapBracketsCantorDimension) {
  std::vector<ModulusCounting> cs;
  for (int k = 3; k <= 6; ++k) {
    const auto m = build_open_map(k);
    cs.push_back(count_moduli(open_map_eigenvalues(m), {0.5}, k, m.N));
  }
  const auto fit = fit_weyl_exponent(cs, 0.5);
  EXPECT_GE(fit.slope, 0.48);
  EXPECT_LE(fit.slope, 0.78);
  EXPECT_FALSE(fit.few_sizes);
}

TEST(FitWeylExponent, SingleSizeIsDegenerate) {
  const auto m = build_open_map(3);
  try {
    fit_weyl_exponent({count_moduli(open_map_eigenvalues(m), {0.5}, 3, m.N)}, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateFit);
  }
}
