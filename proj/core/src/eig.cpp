#include "reslab/eig.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <lapacke.h>

namespace reslab {

namespace {

bool by_re_im(cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

}  // namespace

Spectrum eigenvalues(const Eigen::MatrixXcd& A, const EigOptions& opts) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::ShapeMismatch, "eigenvalues needs a square matrix");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (n > opts.max_n) throw Error(ErrorCode::SizeOverflow, "matrix exceeds the dense eigensolver size guard");
  Spectrum spec;
  spec.matrix_norm = A.norm();
  if (n == 0) return spec;
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor> a = A;
  std::vector<lapack_complex_double> w(n);
  Eigen::MatrixXcd vr;
  if (opts.vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', opts.vectors ? 'V' : 'N', n,
                                        reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data(), nullptr,
                                        1, opts.vectors ? reinterpret_cast<lapack_complex_double*>(vr.data()) : nullptr,
                                        opts.vectors ? n : 1);
  if (info < 0) throw Error(ErrorCode::InvalidArgument, "zgeev rejected argument " + std::to_string(-info));
  std::vector<cplx> vals(n);
  for (lapack_int i = 0; i < n; ++i) vals[i] = reinterpret_cast<const cplx*>(w.data())[i];
  if (info > 0) {
    // Elements info..n-1 (0-based) converged.
    spec.converged = false;
    spec.eigenvalues.assign(vals.begin() + info, vals.end());
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), by_re_im);
    throw ConvergenceError("QR iteration failed to converge for " + std::to_string(info) + " eigenvalues",
                           std::move(spec));
  }
  std::vector<lapack_int> order(n);
  for (lapack_int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](lapack_int i, lapack_int j) { return by_re_im(vals[i], vals[j]); });
  spec.eigenvalues.resize(n);
  for (lapack_int i = 0; i < n; ++i) spec.eigenvalues[i] = vals[order[i]];
  if (opts.vectors) {
    spec.vectors.resize(n, n);
    spec.residual_norms.resize(n);
    const double nrm = spec.matrix_norm > 0 ? spec.matrix_norm : 1.0;
    for (lapack_int i = 0; i < n; ++i) {
      spec.vectors.col(i) = vr.col(order[i]);
      const Eigen::VectorXcd r = A * spec.vectors.col(i) - spec.eigenvalues[i] * spec.vectors.col(i);
      spec.residual_norms[i] = r.norm() / (nrm * spec.vectors.col(i).norm());
    }
  }
  return spec;
}

std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> off) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  if (n == 0) return {};
  if (off.size() + 1 != diag.size()) throw Error(ErrorCode::ShapeMismatch, "off-diagonal length must be n - 1");
  off.push_back(0.0);
  const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', n, diag.data(), off.data(), nullptr, 1);
  if (info != 0) {
    Spectrum partial;
    throw ConvergenceError("dstev failed with info " + std::to_string(info), partial);
  }
  return diag;
}

ResonanceSet filter_resonances(const Spectrum& spec1, const Spectrum& spec2, const Window& window, double tol,
                               double h, double theta1, double theta2) {
  ResonanceSet rs;
  rs.window = window;
  rs.h = h;
  rs.theta1 = theta1;
  rs.theta2 = theta2;
  rs.tol = tol;
  for (const cplx z : spec1.eigenvalues) {
    if (!window.contains(z)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const cplx w : spec2.eigenvalues) best = std::min(best, std::abs(z - w));
    if (best > tol) continue;
    bool dup = false;
    for (const cplx r : rs.resonances) dup = dup || std::abs(r - z) <= 1e-10;
    if (dup) continue;
    rs.resonances.push_back(z);
    rs.match_dist.push_back(best);
  }
  return rs;
}

ResonanceFreeResult resonance_free_check(const ResonanceSet& rs, double M, double h) {
  ResonanceFreeResult r;
  r.radius = M * h * std::log(1.0 / h);
  for (const cplx z : rs.resonances) r.margin = std::min(r.margin, std::abs(z) - r.radius);
  r.free = rs.resonances.empty() || r.margin > 0.0;
  return r;
}

void ResonanceSet::write_csv(std::ostream& os) const {
  os << "h,theta1,theta2,re_z,im_z,match_dist\n";
  char buf[160];
  for (std::size_t i = 0; i < resonances.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", h, theta1, theta2, resonances[i].real(),
                  resonances[i].imag(), match_dist[i]);
    os << buf;
  }
}

}  // namespace reslab
