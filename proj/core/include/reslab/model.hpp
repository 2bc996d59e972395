#pragma once

#include <array>
#include <complex>
#include <vector>

#include "reslab/phase_point.hpp"

namespace reslab {

using cplx = std::complex<double>;

enum class PotentialKind { SquareBarrier, GaussianBump, SumOfBumps, Quadratic, CustomTable };

/// One Gaussian term A exp(-|x - c|^2 / w^2).
struct Bump {
  std::array<double, 2> center{};
  double amplitude = 0.0;
  double width = 1.0;
};

/// Potential V on R^n, n = 1 or 2.
///
/// SquareBarrier and CustomTable are 1D only. Quadratic is V = c |x|^2 and is
/// not compactly supported (support_radius() is +inf); it exists for the
/// harmonic and inverted-oscillator checks.
class Potential {
 public:
  static Potential zero(int dim = 1);
  static Potential square_barrier(double a, double b, double height);
  static Potential gaussian_bump(double amplitude, double width, std::array<double, 2> center = {},
                                 int dim = 1);
  static Potential sum_of_bumps(std::vector<Bump> bumps, int dim);
  static Potential quadratic(double coefficient, int dim = 1);
  /// Natural cubic spline through (xs, vs); V = 0 outside [xs.front(), xs.back()].
  static Potential custom_table(std::vector<double> xs, std::vector<double> vs);

  /// Three amplitude-4, width-0.6 bumps on an equilateral triangle of side
  /// `side` centred at the origin (2D).
  static Potential three_bump(double amplitude = 4.0, double width = 0.6, double side = 2.0);
  /// Two amplitude-2, width-0.3 bumps at x = -2 and x = 2 (1D).
  static Potential double_barrier(double amplitude = 2.0, double separation = 4.0,
                                  double width = 0.3);

  PotentialKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double support_radius() const { return support_radius_; }
  bool admits_continuation() const { return kind_ != PotentialKind::CustomTable; }
  /// Points where V or a derivative jumps (1D); empty for smooth kinds.
  std::vector<double> breakpoints() const;
  double max_value_1d(double lo, double hi) const;

  const std::vector<Bump>& bumps() const { return bumps_; }
  double barrier_a() const { return a_; }
  double barrier_b() const { return b_; }
  double barrier_height() const { return height_; }
  double quadratic_coefficient() const { return coef_; }
  const std::vector<double>& table_x() const { return tx_; }
  const std::vector<double>& table_v() const { return tv_; }

  double eval(const std::array<double, 2>& x) const;
  double eval1(double x) const { return eval({x, 0.0}); }
  std::array<double, 2> gradient(const std::array<double, 2>& x) const;
  /// Entire continuation at complex x. Square barriers are continued as a
  /// function of Re z (they are only ever evaluated where Im z = 0 or V = 0).
  cplx eval_complex(const std::array<cplx, 2>& z) const;
  cplx eval_complex1(cplx z) const { return eval_complex({z, cplx{}}); }

 private:
  PotentialKind kind_ = PotentialKind::SumOfBumps;
  int dim_ = 1;
  double support_radius_ = 0.0;
  std::vector<Bump> bumps_;
  double a_ = 0.0, b_ = 0.0, height_ = 0.0;
  double coef_ = 0.0;
  std::vector<double> tx_, tv_, tm_;  // spline knots, values, second derivatives

  double spline(double x) const;
};

/// Either the Schrödinger symbol p = |xi|^2 + V(x) - E0 or the local model
/// p = xi_1 + x_2 xi_2 on T*R^2 (trapped set {x_2 = xi_2 = 0}).
class HamiltonianModel {
 public:
  enum class Kind { Schrodinger, LinearModel };

  static HamiltonianModel schrodinger(Potential pot, double energy_shift = 1.0);
  static HamiltonianModel linear_model();

  Kind kind() const { return kind_; }
  int dim() const { return kind_ == Kind::LinearModel ? 2 : pot_.dim(); }
  const Potential& potential() const { return pot_; }
  double energy_shift() const { return e0_; }
  double support_radius() const;

  double eval_p(const PhasePoint& pt) const;
  PhaseVector vector_field(const PhasePoint& pt) const;

  /// Escape tests. Schrödinger: |x| > R with x.xi > 0 (forward) or < 0
  /// (backward). Linear model: |x_2| > R forward, |xi_2| > R backward.
  bool escaped_forward(const PhasePoint& pt, double R) const;
  bool escaped_backward(const PhasePoint& pt, double R) const;

 private:
  Kind kind_ = Kind::Schrodinger;
  Potential pot_;
  double e0_ = 1.0;
};

double eval_p(const HamiltonianModel& model, const PhasePoint& pt);
cplx eval_V_complex(const Potential& pot, const std::array<cplx, 2>& z);
PhaseVector hamiltonian_vector_field(const HamiltonianModel& model, const PhasePoint& pt);

}  // namespace reslab
