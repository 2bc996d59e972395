#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reslab {

using cplx = std::complex<double>;

/// Quantized three-branch baker map on C^{3N}, N = 3^k:
///   A = F_{3N}^* diag(F_N, O, F_N),
/// with the antiperiodic DFT (F_M)_{jl} = M^{-1/2} exp(-2 pi i (j+1/2)(l+1/2) / M)
/// and O = 0 (opened middle branch) or F_N (closed, unitary variant).
struct OpenMapMatrix {
  int k = 0;
  int N = 0;
  bool opened = true;
  Eigen::MatrixXcd matrix;     // 3N x 3N
  std::vector<bool> kept;      // column mask: false on the opened branch
};

/// Throws SizeOverflow for k > 7, InvalidArgument for k < 1.
OpenMapMatrix build_open_map(int k, bool opened = true);

/// Antiperiodic unitary DFT of size M.
Eigen::MatrixXcd antiperiodic_dft(int M);

/// Eigenvalues of the map ordered by (Re, Im). For the opened map the zero
/// columns make the spectrum block-triangular: eig(A) = eig(A_KK) plus N
/// exact zeros, where K is the kept index set; only the 2N x 2N block is
/// diagonalized.
std::vector<cplx> open_map_eigenvalues(const OpenMapMatrix& map);

struct ModulusCounting {
  int k = 0;
  int N = 0;
  std::vector<double> r;
  std::vector<long> counts;  // #{|lambda| >= r}
};

/// r in [0, 1); r = 0 counts every eigenvalue (3N).
ModulusCounting count_moduli(const std::vector<cplx>& eigenvalues, const std::vector<double>& r_ladder, int k = 0,
                             int N = 0);

struct WeylExponentFit {
  double r = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool few_sizes = false;  // fewer than 4 sizes
};

/// Slope of log n(N, r) against log N for the rung closest to r. Throws
/// DegenerateFit for fewer than two sizes or a zero count.
WeylExponentFit fit_weyl_exponent(const std::vector<ModulusCounting>& countings, double r);

void write_counting_csv(std::ostream& os, const std::vector<ModulusCounting>& countings);
std::string to_json(const WeylExponentFit& fit);

}  // namespace reslab
