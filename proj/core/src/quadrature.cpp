#include "reslab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "reslab/error.hpp"

namespace reslab {

namespace {

// Legendre P_n and P_n' at x by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

LobattoRule gauss_lobatto(int p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "gauss_lobatto: order must be >= 1");
  const int n = p + 1;
  LobattoRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  std::vector<double> pn(n);
  rule.nodes[0] = -1.0;
  rule.nodes[p] = 1.0;
  // Interior nodes are the roots of P_p'; Newton from Chebyshev–Gauss–Lobatto guesses.
  for (int i = 1; i < p; ++i) {
    double x = -std::cos(std::numbers::pi * i / p);
    for (int it = 0; it < 100; ++it) {
      double P = 0.0, dP = 0.0;
      legendre(p, x, P, dP);
      // P'' from the Legendre ODE: (1-x^2)P'' = 2xP' - p(p+1)P
      const double d2P = (2.0 * x * dP - p * (p + 1.0) * P) / (1.0 - x * x);
      const double dx = dP / d2P;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
  }
  for (int i = 0; i < n; ++i) {
    double P = 0.0, dP = 0.0;
    const double x = rule.nodes[i];
    if (i == 0 || i == p) {
      P = (i == 0 && p % 2 == 1) ? -1.0 : 1.0;
    } else {
      legendre(p, x, P, dP);
    }
    pn[i] = P;
    rule.weights[i] = 2.0 / (p * (p + 1.0) * P * P);
  }
  rule.diff.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = 0.0;
      if (i != j) {
        d = pn[i] / (pn[j] * (rule.nodes[i] - rule.nodes[j]));
      } else if (i == 0) {
        d = -p * (p + 1.0) / 4.0;
      } else if (i == p) {
        d = p * (p + 1.0) / 4.0;
      }
      rule.diff[static_cast<std::size_t>(i) * n + j] = d;
    }
  }
  return rule;
}

}  // namespace reslab
