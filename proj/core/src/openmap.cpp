#include "reslab/openmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "reslab/eig.hpp"
#include "reslab/error.hpp"
#include "reslab/linefit.hpp"

namespace reslab {

Eigen::MatrixXcd antiperiodic_dft(int M) {
  Eigen::MatrixXcd F(M, M);
  const double s = 1.0 / std::sqrt(static_cast<double>(M));
  for (int j = 0; j < M; ++j)
    for (int l = 0; l < M; ++l) {
      // Reduce the phase modulo 2M to keep the argument small.
      const long long num = static_cast<long long>(2 * j + 1) * (2 * l + 1) % (4LL * M);
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(num) / (4.0 * M);
      F(j, l) = std::polar(s, ang);
    }
  return F;
}

OpenMapMatrix build_open_map(int k, bool opened) {
  if (k > 7) throw Error(ErrorCode::SizeOverflow, "open map size limited to k <= 7");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "open map needs k >= 1");
  OpenMapMatrix m;
  m.k = k;
  m.opened = opened;
  m.N = 1;
  for (int i = 0; i < k; ++i) m.N *= 3;
  const int N = m.N, D = 3 * N;
  const Eigen::MatrixXcd FD = antiperiodic_dft(D);
  const Eigen::MatrixXcd FN = antiperiodic_dft(N);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(D, D);
  B.block(0, 0, N, N) = FN;
  if (!opened) B.block(N, N, N, N) = FN;
  B.block(2 * N, 2 * N, N, N) = FN;
  m.matrix = FD.adjoint() * B;
  m.kept.assign(D, true);
  if (opened)
    for (int i = N; i < 2 * N; ++i) m.kept[i] = false;
  return m;
}

namespace {

// Both variants commute with the reflection j -> n-1-j, so the spectrum splits
// into even and odd sectors. Falls back to the full solve if the symmetry fails.
std::vector<cplx> reflection_split_eigenvalues(const Eigen::MatrixXcd& M, const EigOptions& opts) {
  const int n = static_cast<int>(M.rows());
  const int h = n / 2;
  double defect = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) defect = std::max(defect, std::abs(M(i, j) - M(n - 1 - i, n - 1 - j)));
  if (n < 2 || defect > 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff())) return eigenvalues(M, opts).eigenvalues;
  const int ne = n - h;
  Eigen::MatrixXcd E(ne, ne), O(h, h);
  for (int b = 0; b < h; ++b)
    for (int a = 0; a < h; ++a) {
      E(a, b) = M(a, b) + M(a, n - 1 - b);
      O(a, b) = M(a, b) - M(a, n - 1 - b);
    }
  if (ne > h) {
    const int m = h;
    for (int a = 0; a < h; ++a) {
      E(a, m) = std::numbers::sqrt2 * M(a, m);
      E(m, a) = std::numbers::sqrt2 * M(m, a);
    }
    E(m, m) = M(m, m);
  }
  std::vector<cplx> vals = eigenvalues(E, opts).eigenvalues;
  if (h > 0) {
    const auto odd = eigenvalues(O, opts).eigenvalues;
    vals.insert(vals.end(), odd.begin(), odd.end());
  }
  return vals;
}

}  // namespace

std::vector<cplx> open_map_eigenvalues(const OpenMapMatrix& map) {
  const int D = static_cast<int>(map.matrix.rows());
  EigOptions opts;
  opts.max_n = 3 * 2187;
  std::vector<cplx> vals;
  if (!map.opened) {
    vals = reflection_split_eigenvalues(map.matrix, opts);
  } else {
    std::vector<int> K;
    for (int i = 0; i < D; ++i)
      if (map.kept[i]) K.push_back(i);
    const int n = static_cast<int>(K.size());
    Eigen::MatrixXcd AKK(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) AKK(i, j) = map.matrix(K[i], K[j]);
    vals = reflection_split_eigenvalues(AKK, opts);
    vals.insert(vals.end(), D - n, cplx{});
  }
  std::stable_sort(vals.begin(), vals.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return vals;
}

ModulusCounting count_moduli(const std::vector<cplx>& eigenvalues, const std::vector<double>& r_ladder, int k, int N) {
  ModulusCounting mc;
  mc.k = k;
  mc.N = N;
  mc.r = r_ladder;
  for (double r : r_ladder) {
    if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidArgument, "modulus rungs must lie in [0, 1)");
    long c = 0;
    for (const cplx z : eigenvalues) c += std::abs(z) >= r ? 1 : 0;
    mc.counts.push_back(c);
  }
  return mc;
}

WeylExponentFit fit_weyl_exponent(const std::vector<ModulusCounting>& countings, double r) {
  if (countings.size() < 2) throw Error(ErrorCode::DegenerateFit, "exponent fit needs at least two sizes");
  std::vector<double> x, y;
  for (const auto& c : countings) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.r.size(); ++i)
      if (std::abs(c.r[i] - r) < std::abs(c.r[best] - r)) best = i;
    if (c.r.empty() || std::abs(c.r[best] - r) > 1e-12)
      throw Error(ErrorCode::DegenerateFit, "counting lacks the requested rung");
    if (c.counts[best] <= 0) throw Error(ErrorCode::DegenerateFit, "zero count cannot enter a log fit");
    x.push_back(std::log(static_cast<double>(c.N)));
    y.push_back(std::log(static_cast<double>(c.counts[best])));
  }
  const LineFit lf = fit_line(x, y);
  WeylExponentFit fit;
  fit.r = r;
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  fit.few_sizes = countings.size() < 4;
  return fit;
}

void write_counting_csv(std::ostream& os, const std::vector<ModulusCounting>& countings) {
  os << "k,N,r,count\n";
  char buf[96];
  for (const auto& c : countings)
    for (std::size_t i = 0; i < c.r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%ld\n", c.k, c.N, c.r[i], c.counts[i]);
      os << buf;
    }
}

std::string to_json(const WeylExponentFit& fit) {
  nlohmann::json j;
  j["r"] = fit.r;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["few_sizes"] = fit.few_sizes;
  return j.dump(2);
}

}  // namespace reslab
