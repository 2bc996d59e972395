#include "reslab/escape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"
#include "reslab/quadrature.hpp"

namespace reslab {

namespace {

// Five-point Gauss–Legendre: exact for the degree-9 integrands of the ramp.
const GaussRule& gl5() {
  static const GaussRule rule = gauss_legendre(5);
  return rule;
}

// Antiderivative of (1 - s^2)^4 vanishing at s = -1.
double bump_cdf(double s) {
  s = std::clamp(s, -1.0, 1.0);
  const double s2 = s * s;
  return s * (1.0 + s2 * (-4.0 / 3.0 + s2 * (6.0 / 5.0 + s2 * (-4.0 / 7.0 + s2 / 9.0)))) + 128.0 / 315.0;
}

double bump_pdf(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return u * u * u * u;
}

constexpr double kBumpMass = 256.0 / 315.0;

}  // namespace

RampFunction::RampFunction(double T, double alpha, double eta) : T_(T), alpha_(alpha), eta_(eta) {}

RampFunction build_ramp(double T, double alpha, double eta) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::BadParams, "ramp needs T > 0");
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error(ErrorCode::BadParams, "ramp needs 0 < alpha < 1/2");
  if (eta <= 0.0) eta = 0.25 * alpha * T;
  return RampFunction(T, alpha, eta);
}

double RampFunction::sharp(double t) const {
  const double a = std::abs(t);
  double v = 0.0;
  if (a <= alpha_ * T_)
    v = a;
  else if (a < T_)
    v = alpha_ * (T_ - a) / (1.0 - alpha_);
  return t < 0 ? -v : v;
}

template <class F>
double RampFunction::convolve(double t, F&& piece) const {
  // Integrate piece(t - s) * rho_eta(s) over s in [-eta, eta], split at kinks.
  double cuts[6];
  int nc = 0;
  cuts[nc++] = -eta_;
  for (double k : {-T_, -alpha_ * T_, alpha_ * T_, T_}) {
    const double s = t - k;
    if (s > -eta_ && s < eta_) cuts[nc++] = s;
  }
  std::sort(cuts, cuts + nc);
  cuts[nc++] = eta_;
  const auto& g = gl5();
  double total = 0.0;
  for (int i = 0; i + 1 < nc; ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < 5; ++q) {
      const double s = mid + half * g.nodes[q];
      total += half * g.weights[q] * piece(t - s) * bump_pdf(s / eta_);
    }
  }
  return total / (kBumpMass * eta_);
}

double RampFunction::operator()(double t) const {
  if (std::abs(t) >= T_ + eta_) return 0.0;
  if (std::abs(t) <= alpha_ * T_ - eta_) return t;
  return convolve(t, [&](double u) { return sharp(u); });
}

double RampFunction::derivative(double t) const {
  if (std::abs(t) >= T_ + eta_) return 0.0;
  if (std::abs(t) <= alpha_ * T_ - eta_) return 1.0;
  const double down = -alpha_ / (1.0 - alpha_);
  return convolve(t, [&](double u) {
    const double a = std::abs(u);
    if (a < alpha_ * T_) return 1.0;
    if (a < T_) return down;
    return 0.0;
  });
}

AveragingProfile::AveragingProfile(double T) : T_(T) {
  if (!(T >= 2.0)) throw Error(ErrorCode::BadParams, "averaging horizon T must be >= 2");
}

double AveragingProfile::operator()(double t) const { return bump_cdf(t) - bump_cdf(t - T_); }

double AveragingProfile::derivative(double t) const { return bump_pdf(t) - bump_pdf(t - T_); }

double AveragingProfile::integral() const { return kBumpMass * T_; }

namespace {

struct AverageRule {
  std::vector<double> t, w, wd;  // nodes, weights for g, weights for -g'
};

AverageRule make_rule(const AveragingProfile& g, const AveragingOptions& opts) {
  const GaussRule gr = gauss_legendre(opts.gauss_points);
  AverageRule rule;
  auto add_interval = [&](double a, double b) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * opts.panels_per_unit)));
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * w;
      for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
        const double t = lo + 0.5 * w * (gr.nodes[q] + 1.0);
        const double wt = 0.5 * w * gr.weights[q];
        rule.t.push_back(t);
        rule.w.push_back(wt * g(t));
        rule.wd.push_back(-wt * g.derivative(t));
      }
    }
  };
  const double T = g.T();
  add_interval(-1.0, 1.0);
  if (T - 1.0 > 1.0) add_interval(1.0, T - 1.0);
  add_interval(T - 1.0, T + 1.0);
  return rule;
}

}  // namespace

std::pair<AveragedField, AveragedField> time_average_pair(const HamiltonianModel& model,
                                                          const PhaseFunction& phi_plus,
                                                          const PhaseFunction& phi_minus,
                                                          const std::vector<PhasePoint>& nodes,
                                                          const AveragingOptions& opts) {
  const AveragingProfile g(opts.T);
  const AverageRule rule = make_rule(g, opts);
  // Split nodes into the backward part (t < 0) and forward part.
  std::vector<double> back, fwd;
  std::vector<std::size_t> back_idx, fwd_idx;
  for (std::size_t i = 0; i < rule.t.size(); ++i) {
    if (rule.t[i] < 0.0) {
      back.push_back(rule.t[i]);
      back_idx.push_back(i);
    } else {
      fwd.push_back(rule.t[i]);
      fwd_idx.push_back(i);
    }
  }
  // Backward samples must be ordered in the integration direction.
  std::vector<std::size_t> border(back.size());
  for (std::size_t i = 0; i < border.size(); ++i) border[i] = back.size() - 1 - i;
  std::vector<double> back_sorted(back.size());
  for (std::size_t i = 0; i < border.size(); ++i) back_sorted[i] = back[border[i]];

  std::pair<AveragedField, AveragedField> out;
  for (auto* f : {&out.first, &out.second}) {
    f->value.assign(nodes.size(), 0.0);
    f->flow_derivative.assign(nodes.size(), 0.0);
  }
  const bool two = static_cast<bool>(phi_minus);
  parallel_for(nodes.size(), [&](std::size_t n) {
    double vp = 0.0, dp = 0.0, vm = 0.0, dm = 0.0;
    auto accumulate = [&](std::size_t qi, const PhasePoint& r) {
      const double a = phi_plus(r);
      vp += rule.w[qi] * a;
      dp += rule.wd[qi] * a;
      if (two) {
        const double b = phi_minus(r);
        vm += rule.w[qi] * b;
        dm += rule.wd[qi] * b;
      }
    };
    const Trajectory tf = integrate(model, nodes[n], 0.0, g.T() + 1.0, opts.tol, fwd);
    for (std::size_t i = 0; i < fwd.size(); ++i) accumulate(fwd_idx[i], tf.points[i].rho);
    const Trajectory tb = integrate(model, nodes[n], 0.0, -1.0, opts.tol, back_sorted);
    for (std::size_t i = 0; i < back_sorted.size(); ++i) accumulate(back_idx[border[i]], tb.points[i].rho);
    out.first.value[n] = vp;
    out.first.flow_derivative[n] = dp;
    out.second.value[n] = vm;
    out.second.flow_derivative[n] = dm;
  });
  return out;
}

AveragedField time_average_phi(const HamiltonianModel& model, const PhaseFunction& phi,
                               const std::vector<PhasePoint>& nodes, const AveragingOptions& opts) {
  return time_average_pair(model, phi, PhaseFunction{}, nodes, opts).first;
}

namespace {

double energy_cutoff(double u) {
  const double a = std::abs(u);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double v = 2.0 - a;  // 1 at a = 1, 0 at a = 2
  return 1.0 / (1.0 + std::exp(1.0 / v - 1.0 / (1.0 - v)));
}

}  // namespace

G0Field build_G0(const HamiltonianModel& model, const std::vector<PhasePoint>& nodes, const G0Options& opts) {
  const double R = opts.R < 0.0 ? model.support_radius() + 2.0 : opts.R;
  std::vector<double> s(nodes.size(), 0.0);
  G0Field out;
  out.value.assign(nodes.size(), 0.0);
  out.flow_derivative.assign(nodes.size(), 0.0);
  out.nontrapped.assign(nodes.size(), 0);
  parallel_for(nodes.size(), [&](std::size_t i) {
    const EscapeRecord rec = escape_record(model, nodes[i], R, opts.T_max, opts.tol);
    if (!rec.forward_trapped() && !rec.backward_trapped()) {
      out.nontrapped[i] = 1;
      s[i] = 0.5 * (rec.backward_escape_t - rec.forward_escape_t);
    }
  });
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (out.nontrapped[i]) out.max_abs_s = std::max(out.max_abs_s, std::abs(s[i]));
  out.T = (out.max_abs_s + opts.eta) / opts.alpha * (1.0 + 1e-9) + 1e-12;
  const RampFunction ramp = build_ramp(out.T, opts.alpha, opts.eta);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!out.nontrapped[i]) continue;
    const double psi = energy_cutoff(model.eval_p(nodes[i]) / opts.delta);
    out.value[i] = ramp(s[i]) * psi;
    out.flow_derivative[i] = ramp.derivative(s[i]) * psi;
  }
  return out;
}

EscapeField build_G(const std::vector<PhasePoint>& nodes, const EscapeInputs& in, const EscapeParams& params) {
  const std::size_t n = nodes.size();
  auto need = [&](const std::vector<double>& v, const char* name, bool optional) {
    if ((optional && v.empty()) || v.size() == n) return;
    throw Error(ErrorCode::ShapeMismatch, std::string("field '") + name + "' does not match the node count");
  };
  need(in.phi_hat_plus.value, "phi_hat_plus", false);
  need(in.phi_hat_plus.flow_derivative, "H_p phi_hat_plus", false);
  need(in.phi_hat_minus.value, "phi_hat_minus", false);
  need(in.phi_hat_minus.flow_derivative, "H_p phi_hat_minus", false);
  need(in.g0, "G0", true);
  need(in.hp_g0, "H_p G0", in.g0.empty());
  need(in.chi_hat, "chi_hat", true);
  need(in.hp_chi_hat, "H_p chi_hat", true);
  need(in.chi0, "chi0", true);
  need(in.hp_chi0, "H_p chi0", true);
  if (!(params.eps > 0.0 && params.eps < 1.0)) throw Error(ErrorCode::BadParams, "eps must lie in (0, 1)");
  if (!(params.M > 0.0)) throw Error(ErrorCode::BadParams, "M must be positive");

  EscapeField f;
  f.nodes = nodes;
  f.params = params;
  f.phi_hat_plus = in.phi_hat_plus.value;
  f.phi_hat_minus = in.phi_hat_minus.value;
  f.G_hat.resize(n);
  f.hp_G_hat.resize(n);
  f.G.resize(n);
  f.hp_G.resize(n);
  const double Me = params.M * params.eps;
  const double L = std::log(1.0 / params.eps);
  auto at = [](const std::vector<double>& v, std::size_t i, double dflt) { return v.empty() ? dflt : v[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    const double pp = in.phi_hat_plus.value[i], pm = in.phi_hat_minus.value[i];
    f.G_hat[i] = std::log(Me + pm) - std::log(Me + pp);
    f.hp_G_hat[i] =
        in.phi_hat_minus.flow_derivative[i] / (Me + pm) - in.phi_hat_plus.flow_derivative[i] / (Me + pp);
    const double ch = at(in.chi_hat, i, 1.0), dch = at(in.hp_chi_hat, i, 0.0);
    const double c0 = at(in.chi0, i, 1.0), dc0 = at(in.hp_chi0, i, 0.0);
    const double g0 = at(in.g0, i, 0.0), dg0 = at(in.hp_g0, i, 0.0);
    f.G[i] = ch * f.G_hat[i] + params.C0 * L * c0 * g0;
    f.hp_G[i] = ch * f.hp_G_hat[i] + dch * f.G_hat[i] + params.C0 * L * (c0 * dg0 + dc0 * g0);
  }
  return f;
}

EscapeField EscapeField::scaled(double factor) const {
  EscapeField out = *this;
  for (auto* v : {&out.G_hat, &out.hp_G_hat, &out.G, &out.hp_G})
    for (auto& x : *v) x *= factor;
  return out;
}

void EscapeField::write_csv(std::ostream& os) const {
  const int d = nodes.empty() ? 1 : nodes.front().dim;
  for (int i = 1; i <= d; ++i) os << "x" << i << ',';
  for (int i = 1; i <= d; ++i) os << "xi" << i << ',';
  os << "phi_hat_plus,phi_hat_minus,G,HpG\n";
  char buf[128];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto flat = nodes[i].flat();
    for (int k = 0; k < 2 * d; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,", flat[k]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", phi_hat_plus[i], phi_hat_minus[i], G[i], hp_G[i]);
    os << buf;
  }
}

std::vector<double> distances_to_cloud(const std::vector<PhasePoint>& nodes, const PointCloud& cloud) {
  std::vector<double> d(nodes.size(), std::numeric_limits<double>::infinity());
  if (cloud.empty()) return d;
  const KdTree tree(cloud);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto flat = nodes[i].flat();
    if (2 * nodes[i].dim != cloud.dim()) throw Error(ErrorCode::ShapeMismatch, "cloud and nodes differ in dimension");
    d[i] = tree.nearest(std::span<const double>(flat.data(), cloud.dim())).second;
  }
  return d;
}

EscapeReport verify_escape(const EscapeField& field, const std::vector<double>& dist_to_K, double C,
                           const VerifyOptions& opts) {
  if (dist_to_K.size() != field.nodes.size())
    throw Error(ErrorCode::ShapeMismatch, "distance list does not match the field");
  EscapeReport r;
  r.C = C;
  r.eps = field.params.eps;
  r.nodes = field.nodes.size();
  r.threshold = 1.0 / C;
  const double L = std::log(1.0 / r.eps);
  r.min_qualifying = std::numeric_limits<double>::infinity();
  r.global_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < field.nodes.size(); ++i) {
    const double d = dist_to_K[i];
    r.global_min = std::min(r.global_min, field.hp_G[i]);
    r.sup_G = std::max(r.sup_G, std::abs(field.G[i]));
    if (d * d >= C * r.eps) {
      ++r.qualifying;
      r.min_qualifying = std::min(r.min_qualifying, field.hp_G[i]);
    }
  }
  r.inequality_pass = r.min_qualifying >= r.threshold;
  r.floor = -opts.delta0 * L;
  r.floor_pass = r.global_min >= r.floor;
  r.sup_ratio = r.sup_G / L;
  r.sup_pass = r.sup_ratio <= opts.sup_ratio_bound;
  r.pass = r.inequality_pass && r.floor_pass && r.sup_pass;

  r.minimal_passing_C = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 600; ++k) {
    const double c = std::pow(10.0, k / 100.0);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < field.nodes.size(); ++i)
      if (dist_to_K[i] * dist_to_K[i] >= c * r.eps) m = std::min(m, field.hp_G[i]);
    if (m >= 1.0 / c) {
      r.minimal_passing_C = c;
      break;
    }
  }
  return r;
}

EscapeReport verify_escape(const EscapeField& field, const PointCloud& K_hat, double C, const VerifyOptions& opts) {
  return verify_escape(field, distances_to_cloud(field.nodes, K_hat), C, opts);
}

std::string EscapeReport::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
  };
  nlohmann::json j;
  j["C"] = C;
  j["eps"] = eps;
  j["nodes"] = nodes;
  j["qualifying_nodes"] = qualifying;
  j["min_HpG_qualifying"] = num(min_qualifying);
  j["threshold"] = threshold;
  j["inequality_pass"] = inequality_pass;
  j["global_min_HpG"] = num(global_min);
  j["floor"] = floor;
  j["floor_pass"] = floor_pass;
  j["sup_abs_G"] = sup_G;
  j["sup_ratio_to_log_inv_eps"] = sup_ratio;
  j["sup_pass"] = sup_pass;
  j["minimal_passing_C"] = num(minimal_passing_C);
  j["pass"] = pass;
  return j.dump(2);
}

OrderFunctionFit fit_order_function(const EscapeField& field, std::size_t pairs, std::uint64_t seed) {
  const std::size_t n = field.nodes.size();
  if (n < 2) throw Error(ErrorCode::DegenerateFit, "order-function fit needs at least two nodes");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const double se = std::sqrt(field.params.eps);
  std::vector<std::pair<double, double>> samples;  // (log bracket, G difference)
  samples.reserve(pairs);
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t a = pick(rng), b = pick(rng);
    const auto fa = field.nodes[a].flat(), fb = field.nodes[b].flat();
    double d2 = 0.0;
    for (int i = 0; i < 2 * field.nodes[a].dim; ++i) d2 += (fa[i] - fb[i]) * (fa[i] - fb[i]);
    const double bracket = std::sqrt(1.0 + d2 / (se * se));
    samples.emplace_back(std::log(bracket), field.G[a] - field.G[b]);
  }
  OrderFunctionFit fit;
  fit.pairs = samples.size();
  double logC = 0.0;
  for (const auto& [lb, dg] : samples)
    if (lb <= std::log(2.0)) logC = std::max(logC, dg);
  fit.C0 = std::exp(logC);
  for (const auto& [lb, dg] : samples)
    if (lb > std::log(2.0)) fit.N0 = std::max(fit.N0, (dg - logC) / lb);
  return fit;
}

}  // namespace reslab
