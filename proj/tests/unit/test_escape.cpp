#include <reslab/error.hpp>
#include <reslab/escape.hpp>
#include <reslab/flow.hpp>
#include <reslab/whitney.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace reslab;

namespace {

// g_T by direct quadrature of its derivative (independent of AveragingProfile).
double g_oracle(double t, double T) {
  auto gp = [T](double s) {
    if (std::abs(s) <= 1.0) return std::pow(1.0 - s * s, 4);
    if (std::abs(s - T) <= 1.0) return -std::pow(1.0 - (s - T) * (s - T), 4);
    return 0.0;
  };
  if (t <= -1.0) return 0.0;
  const int n = 4000;
  const double a = -1.0, b = std::min(t, T + 1.0), hstep = (b - a) / n;
  double s = gp(a) + gp(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * gp(a + i * hstep);
  return s * hstep / 3.0;
}

// int g_T(t) e^{c t} dt by composite Simpson on [-1, T + 1].
double weighted_integral(double T, double c) {
  const int n = 4000;
  const double a = -1.0, b = T + 1.0, hstep = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = a + i * hstep;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * g_oracle(t, T) * std::exp(c * t);
  }
  return s * hstep / 3.0;
}

std::vector<PhasePoint> linear_slice(int m, double w) {
  std::vector<PhasePoint> nodes;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x2 = -w + 2 * w * i / (m - 1), k2 = -w + 2 * w * j / (m - 1);
      nodes.push_back(PhasePoint::make2(0.0, x2, -x2 * k2, k2));
    }
  return nodes;
}

EscapeField linear_field(const std::vector<PhasePoint>& nodes, double T, EscapeParams params = {}) {
  const auto model = HamiltonianModel::linear_model();
  AveragingOptions ao;
  ao.T = T;
  auto [plus, minus] = time_average_pair(
      model, [](const PhasePoint& r) { return r.xi[1] * r.xi[1]; },
      [](const PhasePoint& r) { return r.x[1] * r.x[1]; }, nodes, ao);
  EscapeInputs in;
  in.phi_hat_plus = plus;
  in.phi_hat_minus = minus;
  return build_G(nodes, in, params);
}

}  // namespace

TEST(Ramp, Examples) {
  const auto chi = build_ramp(10.0, 0.2);
  EXPECT_DOUBLE_EQ(chi(0.0), 0.0);
  EXPECT_NEAR(chi(1.0), 1.0, 1e-13);
  double mn = INFINITY;
  for (double t = -12.0; t <= 12.0; t += 1e-3) mn = std::min(mn, chi.derivative(t));
  EXPECT_GE(mn, -0.4);
}

TEST(Ramp, BadParams) {
  for (auto [T, a] : std::vector<std::pair<double, double>>{{10, 0.0}, {10, 0.5}, {10, 0.7}, {0, 0.2}, {-1, 0.2}}) {
    try {
      build_ramp(T, a);
      FAIL() << T << ' ' << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadParams);
    }
  }
}

TEST(RampProperty, IdentitySupportAndDerivativeFloor) {
  for (double T : {3.0, 10.0, 25.0})
    for (double a : {0.05, 0.2, 0.4}) {
      const auto chi = build_ramp(T, a);
      const double eta = chi.eta();
      for (double t = -T - 2.0; t <= T + 2.0; t += 1e-3) {
        if (std::abs(t) <= a * T - eta) ASSERT_NEAR(chi(t), t, 1e-12);
        if (std::abs(t) >= T + eta) ASSERT_EQ(chi(t), 0.0);
        ASSERT_GE(chi.derivative(t), -2.0 * a);
      }
    }
}

TEST(Averaging, ConstantFieldGivesProfileIntegral) {
  const auto model = HamiltonianModel::schrodinger(Potential::gaussian_bump(0.6, 0.5));
  std::vector<PhasePoint> nodes{PhasePoint::make1(-1.0, 1.0), PhasePoint::make1(0.3, -0.9)};
  AveragingOptions ao;
  ao.T = 5.0;
  const auto f = time_average_phi(model, [](const PhasePoint&) { return 1.0; }, nodes, ao);
  const AveragingProfile g(5.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    EXPECT_NEAR(f.value[i], g.integral(), 1e-12);
    EXPECT_NEAR(f.value[i], 256.0 * 5.0 / 315.0, 1e-12);
    EXPECT_NEAR(f.flow_derivative[i], 0.0, 1e-12);
  }
}

TEST(Averaging, ProfileConstraints) {
  const AveragingProfile g(5.0);
  EXPECT_DOUBLE_EQ(g.derivative(0.0), 1.0);
  EXPECT_DOUBLE_EQ(g.derivative(5.0), -1.0);
  EXPECT_DOUBLE_EQ(g(-1.0), 0.0);
  EXPECT_NEAR(g(6.0), 0.0, 1e-14);
  for (double t = -1.0; t <= 1.0; t += 0.01) EXPECT_GE(g.derivative(t), 0.0);
  for (double t = 4.0; t <= 6.0; t += 0.01) EXPECT_LE(g.derivative(t), 0.0);
  for (double t = -1.0; t <= 6.0; t += 0.05) EXPECT_NEAR(g(t), g_oracle(t, 5.0), 1e-9);
}

TEST(Averaging, LinearModelClosedForm) {
  const double T = 5.0;
  const auto nodes = linear_slice(9, 1.0);
  const auto model = HamiltonianModel::linear_model();
  AveragingOptions ao;
  ao.T = T;
  const auto f = time_average_phi(model, [](const PhasePoint& r) { return r.xi[1] * r.xi[1]; }, nodes, ao);
  const double Im = weighted_integral(T, -2.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double phi = nodes[i].xi[1] * nodes[i].xi[1];
    EXPECT_NEAR(f.value[i], phi * Im, 1e-8 * (1.0 + phi));
    EXPECT_NEAR(f.flow_derivative[i], -2.0 * f.value[i], 1e-7 * (1.0 + phi));
    if (phi > 0) {
      EXPECT_GE(f.value[i] / phi, std::exp(-2.0 * (T + 1.0)));
      EXPECT_LE(f.value[i] / phi, 10.0);
    }
  }
}

TEST(Averaging, DoubleBarrierSignCheckNearK) {
  const auto model = HamiltonianModel::schrodinger(Potential::double_barrier());
  SeedGrid g;
  g.mode = SeedGrid::Mode::EnergyShell;
  g.x_box = {{-1.9, 1.9}};
  g.points_per_axis = 41;
  g.energies = 3;
  const auto nodes = generate_seeds(model, g, 0.05);
  // K is the union of the orbits through the nodes, sampled past the averaging window
  AveragingOptions ao;
  PointCloud K(2);
  const double reach = ao.T + 1.0;
  for (const auto& n : nodes)
    for (double t = -reach; t <= reach; t += 0.02) {
      const auto f = flow_to(model, n, t).flat();
      K.add(std::span<const double>(f.data(), 2));
    }
  const double eps = 1e-3;
  WhitneyOptions wo;
  wo.box = {{-3.0, 3.0}, {-2.0, 2.0}};
  const auto phi = whitney_phi(K, eps, wo);
  const PhaseFunction f = [&](const PhasePoint& r) {
    const auto s = r.flat();
    return phi(std::span<const double>(s.data(), 2));
  };
  auto [plus, minus] = time_average_pair(model, f, f, nodes, ao);
  const double C = 20.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (-plus.flow_derivative[i] + C * eps > 0 && minus.flow_derivative[i] + C * eps > 0) ++ok;
  EXPECT_GE(static_cast<double>(ok), 0.99 * static_cast<double>(nodes.size()));
}

TEST(BuildG, EqualAveragesGiveZero) {
  std::vector<PhasePoint> nodes{PhasePoint::make1(0, 1), PhasePoint::make1(1, 1)};
  EscapeInputs in;
  in.phi_hat_plus = {{0.3, 2.0}, {0.1, -1.0}};
  in.phi_hat_minus = in.phi_hat_plus;
  const auto f = build_G(nodes, in, {});
  for (double v : f.G_hat) EXPECT_EQ(v, 0.0);
}

TEST(BuildG, ShapeMismatch) {
  std::vector<PhasePoint> nodes{PhasePoint::make1(0, 1), PhasePoint::make1(1, 1)};
  EscapeInputs in;
  in.phi_hat_plus = {{0.3}, {0.1}};
  in.phi_hat_minus = {{0.3, 1.0}, {0.1, 0.0}};
  try {
    build_G(nodes, in, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(BuildG, LinearModelChainRule) {
  const auto nodes = linear_slice(21, 1.0);
  EscapeParams p;
  const auto f = linear_field(nodes, 5.0, p);
  const double Me = p.M * p.eps;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double a = f.phi_hat_minus[i], b = f.phi_hat_plus[i];
    EXPECT_NEAR(f.G_hat[i], std::log(Me + a) - std::log(Me + b), 1e-12);
    const double expect = 2.0 * a / (Me + a) + 2.0 * b / (Me + b);
    EXPECT_NEAR(f.hp_G_hat[i], expect, 1e-7);
    EXPECT_GE(f.hp_G_hat[i], 0.0);
  }
}

TEST(BuildGProperty, MonotoneInPhiMinus) {
  std::vector<PhasePoint> nodes(50, PhasePoint::make1(0, 1));
  EscapeInputs in;
  for (int i = 0; i < 50; ++i) {
    in.phi_hat_plus.value.push_back(0.01 * (i % 7) + 0.001);
    in.phi_hat_plus.flow_derivative.push_back(0.0);
    in.phi_hat_minus.value.push_back(0.02 * (i % 5) + 0.001);
    in.phi_hat_minus.flow_derivative.push_back(0.0);
  }
  const auto a = build_G(nodes, in, {});
  for (auto& v : in.phi_hat_minus.value) v *= 1.7;
  const auto b = build_G(nodes, in, {});
  for (std::size_t i = 0; i < nodes.size(); ++i) EXPECT_GE(b.G_hat[i], a.G_hat[i]);
}

TEST(Verify, LinearModelReportMatchesClosedFormOracle) {
  const double w = 1.0, C = 4.0;
  const auto nodes = linear_slice(61, w);
  EscapeParams p;
  const auto f = linear_field(nodes, 5.0, p);
  std::vector<double> dist;
  for (const auto& n : nodes) dist.push_back(std::hypot(n.x[1], n.xi[1]));
  const auto rep = verify_escape(f, dist, C);
  // closed form: phi_hat_+ = xi2^2 I(-2), phi_hat_- = x2^2 I(2)
  const double Ip = weighted_integral(5.0, -2.0), Im = weighted_integral(5.0, 2.0), Me = p.M * p.eps;
  double mn = INFINITY;
  std::size_t q = 0;
  for (const auto& n : nodes) {
    const double d2 = n.x[1] * n.x[1] + n.xi[1] * n.xi[1];
    if (d2 < C * p.eps) continue;
    ++q;
    const double a = n.x[1] * n.x[1] * Im, b = n.xi[1] * n.xi[1] * Ip;
    mn = std::min(mn, 2.0 * a / (Me + a) + 2.0 * b / (Me + b));
  }
  EXPECT_EQ(rep.qualifying, q);
  EXPECT_NEAR(rep.min_qualifying, mn, 1e-6);
  EXPECT_EQ(rep.inequality_pass, mn >= 1.0 / C);
  EXPECT_TRUE(rep.floor_pass);
  EXPECT_TRUE(rep.sup_pass);
  EXPECT_GT(rep.minimal_passing_C, 0.0);
}

TEST(Verify, ScalingIsLinear) {
  const auto nodes = linear_slice(31, 1.0);
  const auto f = linear_field(nodes, 5.0);
  std::vector<double> dist;
  for (const auto& n : nodes) dist.push_back(std::hypot(n.x[1], n.xi[1]));
  const auto r1 = verify_escape(f, dist, 4.0);
  const auto r2 = verify_escape(f.scaled(2.0), dist, 4.0);
  EXPECT_NEAR(r2.min_qualifying, 2.0 * r1.min_qualifying, 1e-12);
  EXPECT_NEAR(r2.sup_G, 2.0 * r1.sup_G, 1e-12);
}

TEST(Verify, NontrappingBumpPureG0) {
  const auto model = HamiltonianModel::schrodinger(Potential::gaussian_bump(0.6, 0.5));
  const double R0 = model.support_radius(), delta = 0.05;
  SeedGrid g;
  g.mode = SeedGrid::Mode::EnergyShell;
  g.x_box = {{-3.0 * R0, 3.0 * R0}};
  g.points_per_axis = 61;
  g.energies = 5;
  const auto nodes = generate_seeds(model, g, delta);
  G0Options go;
  go.delta = delta;
  const auto g0 = build_G0(model, nodes, go);
  for (auto t : g0.nontrapped) ASSERT_TRUE(t);
  EscapeInputs in;
  const std::vector<double> one(nodes.size(), 1.0), zero(nodes.size(), 0.0);
  in.phi_hat_plus = {one, zero};
  in.phi_hat_minus = {one, zero};
  in.g0 = g0.value;
  in.hp_g0 = g0.flow_derivative;
  EscapeParams p;
  const auto f = build_G(nodes, in, p);
  const auto rep = verify_escape(f, PointCloud(2), 4.0);
  EXPECT_EQ(rep.qualifying, nodes.size());
  EXPECT_TRUE(rep.inequality_pass);
  EXPECT_GE(rep.min_qualifying, 1.0);
}

TEST(G0, FlowDerivativeMatchesFiniteDifference) {
  const auto model = HamiltonianModel::schrodinger(Potential::gaussian_bump(0.6, 0.5));
  std::vector<PhasePoint> nodes{PhasePoint::make1(-1.0, 1.0), PhasePoint::make1(0.4, -1.05)};
  std::vector<PhasePoint> shifted;
  const double d = 1e-4;
  for (const auto& n : nodes) shifted.push_back(flow_to(model, n, d, 1e-12));
  for (const auto& n : nodes) shifted.push_back(flow_to(model, n, -d, 1e-12));
  G0Options go;
  go.T_max = 40.0;
  // one call so the ramp T (chosen from max |s|) is shared
  std::vector<PhasePoint> both = nodes;
  both.insert(both.end(), shifted.begin(), shifted.end());
  const auto b = build_G0(model, both, go);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double fd = (b.value[2 + i] - b.value[4 + i]) / (2 * d);
    EXPECT_NEAR(b.flow_derivative[i], fd, 1e-5);
  }
}

TEST(OrderFunction, LinearModelExponentBounded) {
  const auto nodes = linear_slice(41, 1.0);
  const auto f = linear_field(nodes, 5.0);
  const auto fit = fit_order_function(f, 3000, 17);
  EXPECT_TRUE(std::isfinite(fit.C0));
  EXPECT_TRUE(std::isfinite(fit.N0));
  EXPECT_LE(fit.N0, 8.0);
  EXPECT_EQ(fit.pairs, 3000u);
}

TEST(EscapeField, CsvHeader) {
  const auto nodes = linear_slice(3, 1.0);
  const auto f = linear_field(nodes, 3.0);
  std::ostringstream os;
  f.write_csv(os);
  const auto head = os.str().substr(0, os.str().find('\n'));
  for (const char* c : {"phi_hat_plus", "phi_hat_minus", "G", "HpG"}) EXPECT_NE(head.find(c), std::string::npos) << head;
}
