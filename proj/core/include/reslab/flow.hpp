#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "reslab/model.hpp"
#include "reslab/phase_point.hpp"
#include "reslab/point_cloud.hpp"

namespace reslab {

struct TrajectoryPoint {
  double t;
  PhasePoint rho;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  /// max |p - p(rho_0)| over the stored points.
  double energy_drift = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Dormand–Prince 5(4) stepper with the free 4th-order dense output.
/// Works in either time direction (t1 < t0 integrates backward).
class FlowStepper {
 public:
  FlowStepper(const HamiltonianModel& model, const PhasePoint& rho0, double t0, double direction,
              double tol);

  /// Advances one accepted step, never past t_stop (in the direction of
  /// integration). Throws StepFailure on step-size underflow.
  void step(double t_stop);

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  PhasePoint state() const;
  /// Dense output on [t_prev, t].
  PhasePoint dense(double t) const;

  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }

 private:
  using State = std::array<double, 4>;
  const HamiltonianModel& model_;
  int dim_;
  int n_;
  double dir_;
  double tol_;
  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0;
  State y_{}, k1_{};
  std::array<State, 5> rcont_{};
  std::size_t accepted_ = 0, rejected_ = 0;
  double err_prev_ = 1e-4;

  State rhs(const State& y) const;
  double initial_step() const;
};

/// Integrates the Hamilton flow from rho0 over t_span. Stores every accepted
/// step, or only the requested sample times when `samples` is non-empty
/// (sample times must lie in t_span and be ordered in the integration
/// direction). tol in (1e-13, 1e-3).
Trajectory integrate(const HamiltonianModel& model, const PhasePoint& rho0, double t0, double t1,
                     double tol, const std::vector<double>& samples = {});

/// Flow map exp(t H_p) rho0.
PhasePoint flow_to(const HamiltonianModel& model, const PhasePoint& rho0, double t, double tol = 1e-10);

struct EscapeRecord {
  static constexpr double kTrapped = std::numeric_limits<double>::infinity();
  double forward_escape_t = kTrapped;
  double backward_escape_t = kTrapped;
  double escape_radius = 0.0;
  double horizon = 0.0;

  bool forward_trapped() const { return forward_escape_t == kTrapped; }
  bool backward_trapped() const { return backward_escape_t == kTrapped; }
  bool trapped() const { return forward_trapped() && backward_trapped(); }
};

/// First times (forward and backward, both reported as positive numbers) at
/// which the trajectory satisfies the model's escape test for radius R.
/// Crossings are located by bisection on the dense output.
EscapeRecord escape_record(const HamiltonianModel& model, const PhasePoint& rho0, double R,
                           double T_max, double tol = 1e-9);

/// Seed grids for trapped-set sampling.
struct SeedGrid {
  enum class Mode {
    /// Uniform tensor grid over x_box x xi_box, kept when |p| <= delta.
    Rejection,
    /// Points on energy levels in [-delta, delta]: x on the x_box grid, the
    /// momentum direction on an angle grid (sign for n = 1) and |xi| solved
    /// from the energy. For the linear model the free coordinates are
    /// (x1, x2, xi2) and xi1 is solved.
    EnergyShell,
  };
  Mode mode = Mode::Rejection;
  std::vector<std::array<double, 2>> x_box;   // per-axis [lo, hi]
  std::vector<std::array<double, 2>> xi_box;  // per-axis [lo, hi] (rejection)
  int points_per_axis = 40;
  int angles = 64;
  int energies = 3;
};

struct TrappedSampleOptions {
  double delta = 0.05;
  double R = -1.0;      // < 0: support radius + 2
  double T_max = 40.0;
  double tol = 1e-9;
  bool tagging = false;  // also return Γ̂₊ (tag +1) and Γ̂₋ (tag -1) points
};

/// All grid seeds (tagged 0) whose escape record is trapped both ways; with
/// tagging, half-trapped seeds too. Points are in the flat (x, xi) layout.
PointCloud sample_trapped_set(const HamiltonianModel& model, const SeedGrid& grid,
                              const TrappedSampleOptions& opts);

/// Seeds generated by a grid (exposed for tests and diagnostics).
std::vector<PhasePoint> generate_seeds(const HamiltonianModel& model, const SeedGrid& grid, double delta);

}  // namespace reslab
