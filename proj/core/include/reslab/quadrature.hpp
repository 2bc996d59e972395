#pragma once

#include <utility>
#include <vector>

namespace reslab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss–Legendre rule with n points, exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(int n);

/// Gauss–Lobatto–Legendre rule with p+1 points (endpoints included), plus the
/// nodal differentiation matrix (row-major, (p+1)^2).
struct LobattoRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> diff;
};
LobattoRule gauss_lobatto(int p);

}  // namespace reslab
