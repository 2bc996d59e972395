#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "reslab/flow.hpp"
#include "reslab/model.hpp"
#include "reslab/point_cloud.hpp"

namespace reslab {

/// Mollified odd ramp: chi_sharp(t) = t on |t| <= alpha T, linear down to 0
/// at |t| = T, 0 beyond; convolved with the normalized (1 - s^2)^4 bump of
/// half-width eta. Values are exact (piecewise polynomial quadrature).
class RampFunction {
 public:
  RampFunction(double T, double alpha, double eta);

  double T() const { return T_; }
  double alpha() const { return alpha_; }
  double eta() const { return eta_; }

  double operator()(double t) const;
  double derivative(double t) const;
  double sharp(double t) const;

 private:
  double T_, alpha_, eta_;
  template <class F>
  double convolve(double t, F&& piece) const;
};

/// Throws BadParams unless 0 < alpha < 1/2, T > 0. eta <= 0 selects alpha T / 4.
RampFunction build_ramp(double T, double alpha, double eta = -1.0);

/// Averaging weight g_T: g' = (1 - t^2)^4 on [-1, 1], g' = -(1 - (t - T)^2)^4
/// on [T - 1, T + 1], zero elsewhere, g(-1) = 0. Needs T >= 2.
class AveragingProfile {
 public:
  explicit AveragingProfile(double T);
  double T() const { return T_; }
  double operator()(double t) const;
  double derivative(double t) const;
  /// Integral of g over R (= 256 T / 315).
  double integral() const;

 private:
  double T_;
};

using PhaseFunction = std::function<double(const PhasePoint&)>;

struct AveragingOptions {
  double T = 5.0;
  double tol = 1e-10;
  int panels_per_unit = 4;  // Gauss–Legendre panels per unit time
  int gauss_points = 8;
};

/// phi_hat(rho) = int g_T(t) phi(exp(t H_p) rho) dt and
/// H_p phi_hat(rho) = -int g_T'(t) phi(exp(t H_p) rho) dt, per node.
struct AveragedField {
  std::vector<double> value;
  std::vector<double> flow_derivative;
};

AveragedField time_average_phi(const HamiltonianModel& model, const PhaseFunction& phi,
                               const std::vector<PhasePoint>& nodes, const AveragingOptions& opts);

/// Averages phi_plus and phi_minus along the same trajectories.
std::pair<AveragedField, AveragedField> time_average_pair(const HamiltonianModel& model,
                                                          const PhaseFunction& phi_plus,
                                                          const PhaseFunction& phi_minus,
                                                          const std::vector<PhasePoint>& nodes,
                                                          const AveragingOptions& opts);

struct G0Options {
  double R = -1.0;       // escape radius; < 0: support radius + 2
  double T_max = 40.0;
  double alpha = 0.25;
  double eta = 0.5;
  double delta = 0.05;   // energy cutoff psi(p / delta): 1 on |p| <= delta, 0 beyond 2 delta
  double tol = 1e-9;
};

/// G0 = chi_{T,alpha}(s) psi(p / delta) with the flow-time coordinate
/// s = (t_backward - t_forward) / 2 (H_p s = 1), so H_p G0 = chi'(s) psi.
/// T is chosen so every finite |s| lies in the identity zone. Nodes trapped in
/// either direction get G0 = H_p G0 = 0.
struct G0Field {
  std::vector<double> value;
  std::vector<double> flow_derivative;
  std::vector<signed char> nontrapped;
  double T = 0.0;
  double max_abs_s = 0.0;
};
G0Field build_G0(const HamiltonianModel& model, const std::vector<PhasePoint>& nodes, const G0Options& opts);

struct EscapeParams {
  double eps = 1e-3;
  double M = 1e3;
  double C0 = 1.0;
};

/// Per-node inputs of build_G. Empty optional vectors default to G0 = 0,
/// cutoffs identically 1 (zero flow derivative).
struct EscapeInputs {
  AveragedField phi_hat_plus;
  AveragedField phi_hat_minus;
  std::vector<double> g0, hp_g0;
  std::vector<double> chi_hat, hp_chi_hat;
  std::vector<double> chi0, hp_chi0;
};

struct EscapeField {
  std::vector<PhasePoint> nodes;
  EscapeParams params;
  std::vector<double> phi_hat_plus, phi_hat_minus;
  std::vector<double> G_hat, hp_G_hat;
  std::vector<double> G, hp_G;

  EscapeField scaled(double factor) const;
  void write_csv(std::ostream& os) const;
};

/// G = chi_hat G_hat + C0 log(1/eps) chi0 G0 with
/// G_hat = log(M eps + phi_hat_minus) - log(M eps + phi_hat_plus), and H_p G
/// by the chain rule. Throws ShapeMismatch.
EscapeField build_G(const std::vector<PhasePoint>& nodes, const EscapeInputs& in, const EscapeParams& params);

struct VerifyOptions {
  double delta0 = 0.1;         // floor -delta0 log(1/eps)
  double sup_ratio_bound = 10.0;  // sup |G| <= bound * log(1/eps)
};

struct EscapeReport {
  double C = 0.0;
  double eps = 0.0;
  std::size_t nodes = 0;
  std::size_t qualifying = 0;
  double min_qualifying = 0.0;   // min H_p G over nodes with d(., K)^2 >= C eps
  double threshold = 0.0;        // 1 / C
  bool inequality_pass = false;
  double global_min = 0.0;
  double floor = 0.0;
  bool floor_pass = false;
  double sup_G = 0.0;
  double sup_ratio = 0.0;
  bool sup_pass = false;
  bool pass = false;
  /// Smallest C' for which the inequality part would pass (min over the
  /// qualifying set shrinks as C' grows), or +inf if none below 1e6.
  double minimal_passing_C = 0.0;

  std::string to_json() const;
};

/// Distances from each node (flat phase coordinates) to the cloud; +inf for an empty cloud.
std::vector<double> distances_to_cloud(const std::vector<PhasePoint>& nodes, const PointCloud& cloud);

EscapeReport verify_escape(const EscapeField& field, const std::vector<double>& dist_to_K, double C,
                           const VerifyOptions& opts = {});
EscapeReport verify_escape(const EscapeField& field, const PointCloud& K_hat, double C,
                           const VerifyOptions& opts = {});

/// Fit of exp G(rho) / exp G(mu) <= C0 <(rho - mu)/sqrt eps>^N0 over random
/// node pairs: C0 from pairs with japanese bracket <= 2, N0 the smallest
/// exponent covering the remaining pairs.
struct OrderFunctionFit {
  double C0 = 1.0;
  double N0 = 0.0;
  std::size_t pairs = 0;
};
OrderFunctionFit fit_order_function(const EscapeField& field, std::size_t pairs, std::uint64_t seed);

}  // namespace reslab
