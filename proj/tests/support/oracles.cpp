#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

cplx barrier_F(cplx k, double V0, double L) {
  const cplx i(0.0, 1.0);
  const cplx q = std::sqrt(k * k - V0);
  return (q + k) * (q + k) * std::exp(-i * q * L) - (q - k) * (q - k) * std::exp(i * q * L);
}

}  // namespace

std::vector<cplx> square_barrier_roots(double V0, double L, double re_lo, double re_hi, double im_lo) {
  std::vector<cplx> roots;
  const int nr = static_cast<int>(std::ceil((re_hi - re_lo) / 0.25)) + 1;
  const int ni = static_cast<int>(std::ceil(-im_lo / 0.25)) + 1;
  for (int a = 0; a < nr; ++a)
    for (int b = 1; b <= ni; ++b) {
      cplx k(re_lo + (re_hi - re_lo) * a / (nr - 1), im_lo * b / ni);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        const double d = 1e-7 * std::max(1.0, std::abs(k));
        const cplx f = barrier_F(k, V0, L);
        const cplx df = (barrier_F(k + d, V0, L) - barrier_F(k - d, V0, L)) / (2.0 * d);
        if (std::abs(df) == 0.0) break;
        const cplx step = f / df;
        k -= step;
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) break;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(k))) {
          ok = true;
          break;
        }
      }
      if (!ok || k.real() <= 1e-6 || k.imag() >= -1e-9) continue;
      if (k.real() < re_lo || k.real() > re_hi || k.imag() < im_lo) continue;
      if (std::abs(barrier_F(k, V0, L)) > 1e-8 * std::max(1.0, std::norm(k))) continue;
      bool dup = false;
      for (const auto& r : roots) dup = dup || std::abs(r - k) < 1e-8;
      if (!dup) roots.push_back(k);
    }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  return roots;
}

std::vector<cplx> charpoly(const Eigen::MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<cplx> c(n + 1);
  c[0] = 1.0;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    M = A * M + c[k - 1] * I;
    c[k] = -(A * M).trace() / static_cast<double>(k);
  }
  return c;
}

std::vector<cplx> poly_roots(const std::vector<cplx>& p) {
  const int n = static_cast<int>(p.size()) - 1;
  auto eval = [&](cplx z) {
    cplx v = p[0];
    for (int i = 1; i <= n; ++i) v = v * z + p[i];
    return v;
  };
  std::vector<cplx> z(n);
  const cplx seed(0.4, 0.9);
  for (int i = 0; i < n; ++i) z[i] = std::pow(seed, i);
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      const cplx dz = eval(z[i]) / den;
      z[i] -= dz;
      change = std::max(change, std::abs(dz));
    }
    if (change < 1e-15) break;
  }
  return z;
}

std::int64_t cantor_cover(int depth, int j) {
  // Left endpoints in units of 3^-depth: sums of 2 * 3^(depth - i) over chosen digits.
  std::vector<std::int64_t> pts{0};
  std::int64_t unit = 1;
  for (int i = 0; i < depth; ++i) unit *= 3;
  for (int i = 1; i <= depth; ++i) {
    unit /= 3;
    const std::size_t m = pts.size();
    for (std::size_t a = 0; a < m; ++a) pts.push_back(pts[a] + 2 * unit);
  }
  std::int64_t cell = 1;
  for (int i = 0; i < depth - j; ++i) cell *= 3;
  std::vector<std::int64_t> idx;
  for (auto v : pts) idx.push_back(v / cell);
  std::sort(idx.begin(), idx.end());
  return std::unique(idx.begin(), idx.end()) - idx.begin();
}

long circle_count(double h, double E, double C) {
  long n = 0;
  const long kmax = static_cast<long>(std::ceil(std::sqrt(2.0 + std::abs(E) + C * h) / h)) + 2;
  for (long k = -kmax; k <= kmax; ++k) {
    const double z = h * h * static_cast<double>(k * k) - 1.0;
    if (std::abs(z - E) <= C * h * (1.0 + 1e-12)) ++n;
  }
  return n;
}

long harmonic_count(double h, double E, double C) {
  long n = 0;
  for (long k = 0; h * (2 * k + 1) - 1.0 <= E + C * h * (1.0 + 1e-12) + 1.0; ++k) {
    const double z = h * (2 * k + 1) - 1.0;
    if (std::abs(z - E) <= C * h * (1.0 + 1e-12)) ++n;
  }
  return n;
}

double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  auto one = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double m = 0.0;
    for (auto u : x) {
      double best = INFINITY;
      for (auto v : y) best = std::min(best, std::abs(u - v));
      m = std::max(m, best);
    }
    return m;
  };
  return std::max(one(a, b), one(b, a));
}

}  // namespace oracle
