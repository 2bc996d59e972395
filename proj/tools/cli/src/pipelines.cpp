#include <reslab/cli/pipelines.hpp>

#include <reslab/counting.hpp>
#include <reslab/eig.hpp>
#include <reslab/error.hpp>
#include <reslab/escape.hpp>
#include <reslab/flow.hpp>
#include <reslab/fractal.hpp>
#include <reslab/openmap.hpp>
#include <reslab/parallel.hpp>
#include <reslab/scaledop.hpp>
#include <reslab/whitney.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace reslab::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void write_file(const fs::path& dir, const std::string& name, const std::function<void(std::ostream&)>& body) {
  if (dir.empty()) return;
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
  body(out);
}

void write_json(const fs::path& dir, const std::string& name, const json& j) {
  write_file(dir, name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::array<double, 2>> box_of(const json& v) {
  std::vector<std::array<double, 2>> b;
  for (const auto& e : v) b.push_back({e[0].get<double>(), e[1].get<double>()});
  return b;
}

std::vector<double> doubles(const json& v) { return v.get<std::vector<double>>(); }

SeedGrid seed_grid(const json& p) {
  SeedGrid g;
  g.mode = p.value("seed_mode", std::string("energy-shell")) == "rejection" ? SeedGrid::Mode::Rejection
                                                                             : SeedGrid::Mode::EnergyShell;
  if (p.contains("x_box")) g.x_box = box_of(p["x_box"]);
  if (p.contains("xi_box")) g.xi_box = box_of(p["xi_box"]);
  g.points_per_axis = p.value("points_per_axis", 40);
  g.angles = p.value("angles", 64);
  g.energies = p.value("energies", 1);
  return g;
}

Scheme scheme_of(const json& p) { return p.value("scheme", std::string("fd2")) == "sem" ? Scheme::SEM : Scheme::FD2; }

// Smallest N with mean spacing 2L / (N + 1) <= frac * h, at least 200.
int nodes_for(double L, double h, double frac) {
  const int N = static_cast<int>(std::ceil(2.0 * L / (frac * h))) - 1;
  return std::max(N, 200);
}

struct PairSolve {
  ResonanceSet rs;
  int unknowns = 0;
  ScaledOperator op1;
};

PairSolve solve_pair(const HamiltonianModel& model, double R0, double h, double th1, double th2, const Grid1D& grid,
                     const json& p, const Window& w, double tol) {
  AssembleOptions opts;
  opts.scheme = scheme_of(p);
  opts.sem_order = p.value("sem_order", 12);
  PairSolve out;
  out.op1 = assemble(model, build_contour(th1, R0), grid, h, opts);
  const Spectrum s1 = eigenvalues(out.op1.matrix);
  Spectrum s2;
  {
    const ScaledOperator op2 = assemble(model, build_contour(th2, R0), grid, h, opts);
    s2 = eigenvalues(op2.matrix);
  }
  out.unknowns = static_cast<int>(out.op1.matrix.rows());
  out.op1.matrix.resize(0, 0);
  out.rs = filter_resonances(s1, s2, w, tol, h, th1, th2);
  return out;
}

// Resonance CSVs of several h values share one header.
std::string csv_rows(const ResonanceSet& rs, bool header) {
  std::ostringstream os;
  rs.write_csv(os);
  std::string s = os.str();
  if (!header) {
    const auto nl = s.find('\n');
    s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
  }
  return s;
}

json resonance_list(const ResonanceSet& rs) {
  json a = json::array();
  for (const auto& z : rs.resonances) a.push_back({z.real(), z.imag()});
  return a;
}

double R0_of(const HamiltonianModel& model, const json& p) {
  if (p.contains("R0")) return p["R0"].get<double>();
  const double r = model.support_radius();
  if (!std::isfinite(r) || r <= 0.0) config_fail("params.R0 is required for a potential without compact support");
  return r;
}

// ---------------------------------------------------------------- flow-portrait

json flow_portrait(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  const auto model = build_model(cfg.model);
  const auto seeds = generate_seeds(model, seed_grid(p), p["delta"].get<double>());
  if (seeds.empty()) throw Error(ErrorCode::EmptyCloud, "seed grid produced no points on the energy shell");
  const double t_max = p["t_max"].get<double>();
  const int ns = p["samples"].get<int>();
  std::vector<double> times(ns);
  for (int i = 0; i < ns; ++i) times[i] = ns == 1 ? t_max : t_max * i / (ns - 1);
  std::vector<Trajectory> traj(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    traj[i] = integrate(model, seeds[i], 0.0, t_max, p["tol"].get<double>(), times);
  });
  const int n = model.dim();
  double drift = 0.0;
  std::size_t steps = 0;
  for (const auto& t : traj) {
    drift = std::max(drift, t.energy_drift);
    steps += t.accepted_steps;
  }
  write_file(dir, "trajectories.csv", [&](std::ostream& os) {
    os << "traj,t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= n; ++i) os << ",xi" << i;
    os << ",p\n";
    for (std::size_t k = 0; k < traj.size(); ++k)
      for (const auto& pt : traj[k].points) {
        os << k << ',' << g17(pt.t);
        const auto f = pt.rho.flat();
        for (int i = 0; i < 2 * n; ++i) os << ',' << g17(f[i]);
        os << ',' << g17(eval_p(model, pt.rho)) << '\n';
      }
  });
  return {{"trajectories", traj.size()},
          {"max_energy_drift", drift},
          {"mean_accepted_steps", static_cast<double>(steps) / static_cast<double>(traj.size())}};
}

// ---------------------------------------------------------------- trapped-dimension

json trapped_dimension(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  const auto source = p["source"].get<std::string>();
  PointCloud cloud(1);
  if (source == "cantor") {
    cloud = cantor_cloud(p["depth"].get<int>());
  } else if (source == "segment") {
    cloud = segment_cloud(p["points"].get<std::size_t>());
  } else if (source == "cantor-segment") {
    cloud = cantor_segment_product(p["depth"].get<int>(), p["points"].get<std::size_t>());
  } else {
    const auto model = build_model(cfg.model);
    TrappedSampleOptions o;
    o.delta = p["delta"].get<double>();
    o.R = p["R"].get<double>();
    o.T_max = p["T_max"].get<double>();
    o.tol = p["tol"].get<double>();
    cloud = sample_trapped_set(model, seed_grid(p), o);
  }
  write_file(dir, "cloud.csv", [&](std::ostream& os) { cloud.write_csv(os); });
  if (cloud.size() < 2) throw Error(ErrorCode::EmptyCloud, "sampled set has fewer than two points");

  const double start =
      p.contains("ladder_start") ? p["ladder_start"].get<double>() : p["ladder_fraction"].get<double>() * cloud.diameter();
  const auto ladder = geometric_ladder(start, p["ladder_ratio"].get<double>(), p["rungs"].get<int>());
  FitOptions fo;
  fo.randomized = p["randomized"].get<bool>();
  fo.seed = cfg.seed;
  const DimensionFit fit = fit_dimension(cloud, ladder, fo);
  write_file(dir, "dimension_fit.csv", [&](std::ostream& os) {
    os << "eps,count\n";
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i) os << g17(fit.epsilons[i]) << ',' << fit.counts[i] << '\n';
  });
  json j = json::parse(to_json(fit));
  j["points"] = cloud.size();
  j["source"] = source;
  write_json(dir, "dimension.json", j);
  return j;
}

// ---------------------------------------------------------------- escape-verify

json escape_linear(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  if (p["phi"] != "exact") config_fail("the linear model supports params.phi = \"exact\" only");
  const auto model = HamiltonianModel::linear_model();
  const int m = p["grid_points"].get<int>();
  const double w = p["half_width"].get<double>();
  std::vector<PhasePoint> nodes;
  std::vector<double> dist;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x2 = m == 1 ? 0.0 : -w + 2.0 * w * i / (m - 1);
      const double k2 = m == 1 ? 0.0 : -w + 2.0 * w * j / (m - 1);
      nodes.push_back(PhasePoint::make2(0.0, x2, -x2 * k2, k2));
      dist.push_back(std::hypot(x2, k2));
    }
  AveragingOptions ao;
  ao.T = p["T"].get<double>();
  auto [plus, minus] = time_average_pair(
      model, [](const PhasePoint& r) { return r.xi[1] * r.xi[1]; },
      [](const PhasePoint& r) { return r.x[1] * r.x[1]; }, nodes, ao);
  EscapeInputs in;
  in.phi_hat_plus = std::move(plus);
  in.phi_hat_minus = std::move(minus);
  EscapeParams ep{p["eps"].get<double>(), p["M"].get<double>(), p["C0"].get<double>()};
  const EscapeField field = build_G(nodes, in, ep);
  const EscapeReport rep = verify_escape(field, dist, p["C"].get<double>());
  const auto ofit = fit_order_function(field, p["order_pairs"].get<std::size_t>(), cfg.seed);
  write_file(dir, "escape_field.csv", [&](std::ostream& os) { field.write_csv(os); });
  json j = json::parse(rep.to_json());
  j["variant"] = "linear";
  j["order_function"] = {{"C0", ofit.C0}, {"N0", ofit.N0}, {"pairs", ofit.pairs}};
  write_json(dir, "escape_report.json", j);
  return j;
}

json escape_shell(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  const auto model = build_model(cfg.model);
  const int n = model.dim();
  SeedGrid g;
  g.mode = SeedGrid::Mode::EnergyShell;
  g.x_box = box_of(p["x_box"]);
  g.points_per_axis = p["grid_points"].get<int>();
  g.angles = p["angles"].get<int>();
  g.energies = p["energies"].get<int>();
  const double delta = p["delta"].get<double>();
  const auto nodes = generate_seeds(model, g, delta);
  if (nodes.empty()) throw Error(ErrorCode::EmptyCloud, "no grid node on the energy shell");

  const double R = model.support_radius() + 2.0;
  const double T_max = p["T_max"].get<double>();
  const double tol = p["tol"].get<double>();
  std::vector<EscapeRecord> rec(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { rec[i] = escape_record(model, nodes[i], R, T_max, tol); });
  PointCloud K(2 * n), gplus(2 * n), gminus(2 * n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto f = nodes[i].flat();
    const std::span<const double> s(f.data(), 2 * n);
    if (rec[i].trapped()) K.add(s);
    if (rec[i].backward_trapped()) gplus.add(s);
    if (rec[i].forward_trapped()) gminus.add(s);
  }

  const double eps = p["eps"].get<double>();
  const double T = p["T"].get<double>();
  // Flowed points leave the seed box; the regularized distance must cover them.
  const double speed = 2.0 * std::sqrt(model.energy_shift() + delta) + 1.0;
  std::vector<std::array<double, 2>> wbox = g.x_box;
  for (auto& b : wbox) {
    b[0] = std::min(b[0], -R) - speed * (T + 1.0) - 1.0;
    b[1] = std::max(b[1], R) + speed * (T + 1.0) + 1.0;
  }
  for (int i = 0; i < n; ++i) wbox.push_back({-speed, speed});

  auto make_phi = [&](const PointCloud& gamma) -> PhaseFunction {
    if (gamma.empty()) return [](const PhasePoint&) { return 1.0; };
    if (p["phi"] == "exact") {
      auto tree = std::make_shared<KdTree>(gamma);
      return [tree, eps, n](const PhasePoint& r) {
        const auto f = r.flat();
        const double d = tree->nearest(std::span<const double>(f.data(), 2 * n)).second;
        return d * d + eps;
      };
    }
    WhitneyOptions wo;
    wo.box = wbox;
    auto phi = std::make_shared<RegularizedDistance>(whitney_phi(gamma, eps, wo));
    return [phi, n](const PhasePoint& r) {
      const auto f = r.flat();
      return (*phi)(std::span<const double>(f.data(), 2 * n));
    };
  };
  AveragingOptions ao;
  ao.T = T;
  auto [plus, minus] = time_average_pair(model, make_phi(gplus), make_phi(gminus), nodes, ao);

  G0Options go;
  go.R = R;
  go.T_max = T_max;
  go.alpha = p["alpha"].get<double>();
  go.eta = p["eta"].get<double>();
  go.delta = delta;
  go.tol = tol;
  const G0Field g0 = build_G0(model, nodes, go);

  EscapeInputs in;
  in.phi_hat_plus = std::move(plus);
  in.phi_hat_minus = std::move(minus);
  in.g0 = g0.value;
  in.hp_g0 = g0.flow_derivative;
  EscapeParams ep{eps, p["M"].get<double>(), p["C0"].get<double>()};
  const EscapeField field = build_G(nodes, in, ep);
  const EscapeReport rep = verify_escape(field, K, p["C"].get<double>());
  write_file(dir, "escape_field.csv", [&](std::ostream& os) { field.write_csv(os); });
  write_file(dir, "trapped.csv", [&](std::ostream& os) { K.write_csv(os); });
  json j = json::parse(rep.to_json());
  j["variant"] = "shell";
  j["trapped_nodes"] = K.size();
  j["backward_trapped_nodes"] = gplus.size();
  j["forward_trapped_nodes"] = gminus.size();
  j["G0_T"] = g0.T;
  write_json(dir, "escape_report.json", j);
  return j;
}

// ---------------------------------------------------------------- resonances-1d

json resonances_1d(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  const auto model = build_model(cfg.model);
  const double h = p["h"].get<double>();
  const auto th = doubles(p["theta"]);
  const double R0 = R0_of(model, p);
  const double L = p.contains("half_width") ? p["half_width"].get<double>()
                                            : default_half_width(model, build_contour(std::min(th[0], th[1]), R0), h);
  const Grid1D grid{-L, L, p["N"].get<int>()};
  const auto wv = doubles(p["window"]);
  const Window w{wv[0], wv[1], wv[2], wv[3]};
  auto solve = solve_pair(model, R0, h, th[0], th[1], grid, p, w, p["filter_tol"].get<double>());
  write_file(dir, "resonances.csv", [&](std::ostream& os) { solve.rs.write_csv(os); });
  write_file(dir, "operator.json", [&](std::ostream& os) { os << solve.op1.header_json() << '\n'; });
  json j{{"h", h},
         {"theta", th},
         {"half_width", L},
         {"R0", R0},
         {"unknowns", solve.unknowns},
         {"count", solve.rs.resonances.size()},
         {"resonances", resonance_list(solve.rs)}};
  return j;
}

// ---------------------------------------------------------------- resonance-free

json resonance_free(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  const auto model = build_model(cfg.model);
  const double R0 = R0_of(model, p);
  const double M = p["M"].get<double>();

  // Nontrapping certificate on the energy shell.
  SeedGrid g;
  g.mode = SeedGrid::Mode::EnergyShell;
  g.x_box = p.contains("cert_box") ? box_of(p["cert_box"]) : std::vector<std::array<double, 2>>{{-3.0 * R0, 3.0 * R0}};
  g.points_per_axis = p["cert_points"].get<int>();
  g.energies = p["cert_energies"].get<int>();
  const auto seeds = generate_seeds(model, g, p["cert_delta"].get<double>());
  std::vector<char> trapped(seeds.size(), 0);
  const double T_cert = p["cert_T_max"].get<double>();
  parallel_for(seeds.size(), [&](std::size_t i) {
    const auto r = escape_record(model, seeds[i], R0 + 2.0, T_cert);
    trapped[i] = r.forward_trapped() || r.backward_trapped();
  });
  const auto n_trapped = std::count(trapped.begin(), trapped.end(), 1);
  const json cert{{"seeds", seeds.size()}, {"trapped", n_trapped}, {"nontrapping", n_trapped == 0}};
  write_json(dir, "nontrapping.json", cert);

  const auto hs = doubles(p["h"]);
  std::vector<PairSolve> solves(hs.size());
  std::vector<json> rows(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) {
    const double h = hs[i];
    const double radius = M * h * std::log(1.0 / h);
    const double th1 = p["theta_factor"].get<double>() * radius;
    const double th2 = th1 * p["theta2_ratio"].get<double>();
    const auto contour = build_contour(th1, R0);
    const double L = p.contains("half_width") ? p["half_width"].get<double>() : default_half_width(model, contour, h);
    const Grid1D grid{-L, L, nodes_for(L, h, p["spacing_fraction"].get<double>())};
    const double wf = p["window_factor"].get<double>() * radius;
    solves[i] = solve_pair(model, R0, h, th1, th2, grid, p, Window{-wf, wf, -wf, wf}, p["filter_tol"].get<double>());
    const auto chk = resonance_free_check(solves[i].rs, M, h);
    rows[i] = {{"h", h},         {"theta", {th1, th2}},   {"radius", chk.radius},
               {"free", chk.free}, {"margin", chk.margin}, {"count", solves[i].rs.resonances.size()},
               {"unknowns", solves[i].unknowns}, {"half_width", L}};
  });
  write_file(dir, "resonances.csv", [&](std::ostream& os) {
    for (std::size_t i = 0; i < solves.size(); ++i) os << csv_rows(solves[i].rs, i == 0);
  });
  bool all_free = true;
  for (const auto& r : rows) all_free = all_free && r["free"].get<bool>();
  json j{{"rows", rows}, {"all_free", all_free}, {"nontrapping", cert}, {"M", M}};
  write_json(dir, "resonance_free.json", j);
  return j;
}

// ---------------------------------------------------------------- weyl-count

CountingCurve curve_from(const std::vector<double>& hs, const std::vector<long>& counts, double C, double E) {
  std::vector<std::size_t> order(hs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return hs[a] > hs[b]; });
  CountingCurve c;
  c.C = C;
  c.E = E;
  for (auto i : order) {
    c.h.push_back(hs[i]);
    c.counts.push_back(counts[i]);
  }
  return c;
}

json weyl_count(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  const auto source = p["source"].get<std::string>();
  const auto hs = doubles(p["h"]);
  const double C = p["C"].get<double>();
  const double E = p["E"].get<double>();
  const double bound = p["bound"].get<double>();

  if (source == "resonances") {
    const auto model = build_model(cfg.model);
    if (model.dim() != 1) config_fail("weyl-count resonances needs a 1D model");
    const double R0 = R0_of(model, p);
    std::vector<long> counts(hs.size());
    std::vector<PairSolve> solves(hs.size());
    std::vector<json> rows(hs.size());
    parallel_for(hs.size(), [&](std::size_t i) {
      const double h = hs[i];
      const double th1 = p["theta_factor"].get<double>() * h;
      const double th2 = p["theta2_factor"].get<double>() * h;
      const auto contour = build_contour(th1, R0);
      const double L = p.contains("half_width") ? p["half_width"].get<double>() : default_half_width(model, contour, h);
      const Grid1D grid{-L, L, nodes_for(L, h, p["spacing_fraction"].get<double>())};
      const double wf = p["window_factor"].get<double>() * C * h;
      solves[i] = solve_pair(model, R0, h, th1, th2, grid, p, Window{E - wf, E + wf, -wf, wf},
                             p["filter_tol"].get<double>());
      counts[i] = count_in_disc(solves[i].rs, E, C, h);
      rows[i] = {{"h", h}, {"theta", {th1, th2}}, {"count", counts[i]}, {"unknowns", solves[i].unknowns},
                 {"resonances", resonance_list(solves[i].rs)}};
    });
    const auto curve = curve_from(hs, counts, C, E);
    write_file(dir, "counting_curve.csv", [&](std::ostream& os) { curve.write_csv(os); });
    write_file(dir, "resonances.csv", [&](std::ostream& os) {
      for (std::size_t i = 0; i < solves.size(); ++i) os << csv_rows(solves[i].rs, i == 0);
    });
    json j{{"source", source}, {"C", C}, {"E", E}, {"rows", rows}};
    j["max_count"] = *std::max_element(counts.begin(), counts.end());
    if (hs.size() >= 2) j["fit"] = json::parse(fit_weyl(curve).to_json());
    write_json(dir, "weyl.json", j);
    return j;
  }

  HamiltonianModel model = HamiltonianModel::schrodinger(Potential::zero(1), 1.0);
  LiouvilleSpec spec;
  SpectrumSource src;
  if (source == "circle-lattice") {
    spec.L = 2.0 * std::numbers::pi;
    spec.periodic = true;
    src = [bound](double h) { return circle_lattice_spectrum(h, bound); };
  } else if (source == "harmonic") {
    model = HamiltonianModel::schrodinger(Potential::quadratic(1.0), 1.0);
    src = [bound](double h) { return harmonic_spectrum(h, bound); };
  } else {
    model = build_model(cfg.model);
    const double L = p.value("half_width", 10.0);
    spec.L = L;
    const double frac = p["spacing_fraction"].get<double>();
    src = [model, L, frac](double h) { return numeric_bound_spectrum(model, L, h, frac); };
  }
  if (!cfg.model.empty() && source != "numeric-bound") model = build_model(cfg.model);
  if (p.contains("L")) spec.L = p["L"].get<double>();
  if (p.contains("periodic")) spec.periodic = p["periodic"].get<bool>();

  const WeylReport rep = check_infinitesimal_weyl(src, model, E, C, hs, spec);
  std::vector<double> rh;
  std::vector<long> rc;
  for (const auto& r : rep.rows) {
    rh.push_back(r.h);
    rc.push_back(r.count);
  }
  const auto curve = curve_from(rh, rc, C, E);
  write_file(dir, "counting_curve.csv", [&](std::ostream& os) { curve.write_csv(os); });
  json j = json::parse(rep.to_json());
  j["source"] = source;
  write_json(dir, "weyl.json", j);
  return j;
}

// ---------------------------------------------------------------- open-map

std::vector<ModulusCounting> open_map_counts(const std::vector<int>& ks, const std::vector<double>& r, bool opened) {
  std::vector<ModulusCounting> out(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    const auto map = build_open_map(ks[i], opened);
    out[i] = count_moduli(open_map_eigenvalues(map), r, map.k, map.N);
  });
  return out;
}

json open_map(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& p = cfg.params;
  const auto ks = p["k"].get<std::vector<int>>();
  const auto r = doubles(p["r"]);
  const double r_fit = p["r_fit"].get<double>();
  json j{{"k", ks}, {"r", r}, {"opened", p["opened"]}};

  const auto counts = open_map_counts(ks, r, p["opened"].get<bool>());
  write_file(dir, "counting.csv", [&](std::ostream& os) { write_counting_csv(os, counts); });
  if (ks.size() >= 2) {
    j["fit"] = json::parse(to_json(fit_weyl_exponent(counts, r_fit)));
    write_json(dir, "fit.json", j["fit"]);
  }
  if (p["control"].get<bool>()) {
    const auto ctrl = open_map_counts(ks, r, false);
    write_file(dir, "control_counting.csv", [&](std::ostream& os) { write_counting_csv(os, ctrl); });
    if (ks.size() >= 2) {
      j["control_fit"] = json::parse(to_json(fit_weyl_exponent(ctrl, r_fit)));
      write_json(dir, "control_fit.json", j["control_fit"]);
    }
  }
  return j;
}

}  // namespace

void preflight(const ExperimentConfig& cfg) {
  if (cfg.model.empty()) return;
  HamiltonianModel model = HamiltonianModel::linear_model();
  try {
    model = build_model(cfg.model);
  } catch (const Error& e) {
    config_fail(std::string("invalid model: ") + e.what());
  }
  const auto& p = cfg.params;
  const int n = model.dim();
  for (const char* key : {"x_box", "xi_box", "cert_box"})
    if (p.contains(key) && static_cast<int>(p[key].size()) != n)
      config_fail("params." + std::string(key) + " needs one [lo, hi] pair per model dimension (" +
                  std::to_string(n) + ")");
  const bool linear = model.kind() == HamiltonianModel::Kind::LinearModel;
  switch (cfg.kind) {
    case Kind::Resonances1D:
    case Kind::ResonanceFree:
      if (linear || n != 1) config_fail(std::string(kind_name(cfg.kind)) + " needs a 1D Schrodinger model");
      break;
    case Kind::EscapeVerify:
      if (!linear && p["phi"] == "whitney" && n != 1)
        config_fail("params.phi = \"whitney\" is limited to 1D models; use \"exact\"");
      if (linear && p["phi"] != "exact") config_fail("the linear model supports params.phi = \"exact\" only");
      break;
    default:
      break;
  }
}

json run_pipeline(const ExperimentConfig& cfg, const fs::path& out_dir) {
  switch (cfg.kind) {
    case Kind::FlowPortrait:
      return flow_portrait(cfg, out_dir);
    case Kind::TrappedDimension:
      return trapped_dimension(cfg, out_dir);
    case Kind::EscapeVerify:
      return cfg.model["type"] == "linear" ? escape_linear(cfg, out_dir) : escape_shell(cfg, out_dir);
    case Kind::Resonances1D:
      return resonances_1d(cfg, out_dir);
    case Kind::ResonanceFree:
      return resonance_free(cfg, out_dir);
    case Kind::WeylCount:
      return weyl_count(cfg, out_dir);
    case Kind::OpenMap:
      return open_map(cfg, out_dir);
  }
  return {};
}

}  // namespace reslab::cli
