#pragma once

#include <complex>
#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "reslab/error.hpp"

namespace reslab {

using cplx = std::complex<double>;

struct Spectrum {
  std::vector<cplx> eigenvalues;       // sorted by (Re, Im)
  std::vector<double> residual_norms;  // ||A v - l v|| / ||A||, only with vectors
  double matrix_norm = 0.0;            // Frobenius norm
  bool converged = true;
  Eigen::MatrixXcd vectors;            // columns match eigenvalues, only on request
};

/// Raised when the QR iteration stalls; carries the eigenvalues that did converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Spectrum partial)
      : Error(ErrorCode::ConvergenceFailure, what), partial_(std::move(partial)) {}
  const Spectrum& partial() const { return partial_; }

 private:
  Spectrum partial_;
};

struct EigOptions {
  bool vectors = false;
  /// Desk-scale guard; SizeOverflow above it.
  int max_n = 4000;
};

/// All eigenvalues of a dense complex matrix (LAPACK zgeev: balancing,
/// Hessenberg reduction, shifted QR), ordered by (Re, Im).
Spectrum eigenvalues(const Eigen::MatrixXcd& A, const EigOptions& opts = {});

/// Eigenvalues of a real symmetric tridiagonal matrix, ascending (LAPACK dstev).
std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> off);

struct Window {
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct ResonanceSet {
  std::vector<cplx> resonances;
  std::vector<double> match_dist;
  Window window;
  double h = 0.0, theta1 = 0.0, theta2 = 0.0, tol = 0.0;

  void write_csv(std::ostream& os) const;
};

/// Keeps z in spec1 within the window that have a partner z' in spec2 with
/// |z - z'| <= tol; members closer than 1e-10 are merged.
ResonanceSet filter_resonances(const Spectrum& spec1, const Spectrum& spec2, const Window& window, double tol,
                               double h = 0.0, double theta1 = 0.0, double theta2 = 0.0);

struct ResonanceFreeResult {
  bool free = true;
  /// min |z| - M h log(1/h) over the set; +inf for an empty set.
  double margin = std::numeric_limits<double>::infinity();
  double radius = 0.0;
};
ResonanceFreeResult resonance_free_check(const ResonanceSet& rs, double M, double h);

}  // namespace reslab
