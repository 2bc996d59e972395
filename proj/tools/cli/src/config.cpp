#include <reslab/cli/config.hpp>

#include <reslab/error.hpp>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace reslab::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

json from_toml(const toml::node& node, const std::string& where) {
  if (auto t = node.as_table()) {
    json out = json::object();
    for (auto&& [k, v] : *t) out[std::string(k.str())] = from_toml(v, where + "." + std::string(k.str()));
    return out;
  }
  if (auto a = node.as_array()) {
    json out = json::array();
    for (auto&& v : *a) out.push_back(from_toml(v, where));
    return out;
  }
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_boolean()) return v->get();
  if (auto v = node.as_string()) return v->get();
  fail("unsupported TOML value type at '" + where.substr(1) + "'");
}

enum class T { Number, Integer, Bool, String, NumberList, IntList, Box, Points };

struct Key {
  const char* name;
  T type;
  json def = nullptr;  // null and !required: optional, no default
  bool required = false;
};

Key req(const char* n, T t) { return {n, t, nullptr, true}; }
Key opt(const char* n, T t, json d = nullptr) { return {n, t, std::move(d), false}; }

bool is_number_list(const json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v)
    if (!e.is_number()) return false;
  return true;
}

void check_type(const json& v, T t, const std::string& path) {
  auto bad = [&](const char* what) { fail("key '" + path + "' must be " + what); };
  switch (t) {
    case T::Number:
      if (!v.is_number()) bad("a number");
      break;
    case T::Integer:
      if (!v.is_number_integer()) bad("an integer");
      break;
    case T::Bool:
      if (!v.is_boolean()) bad("a boolean");
      break;
    case T::String:
      if (!v.is_string()) bad("a string");
      break;
    case T::NumberList:
      if (!is_number_list(v) || v.empty()) bad("a non-empty array of numbers");
      break;
    case T::IntList:
      if (!v.is_array() || v.empty()) bad("a non-empty array of integers");
      for (const auto& e : v)
        if (!e.is_number_integer()) bad("a non-empty array of integers");
      break;
    case T::Box:
      if (!v.is_array() || v.empty()) bad("an array of [lo, hi] pairs");
      for (const auto& e : v)
        if (!is_number_list(e) || e.size() != 2 || !(e[0].get<double>() < e[1].get<double>()))
          bad("an array of [lo, hi] pairs with lo < hi");
      break;
    case T::Points:
      if (!v.is_array() || v.empty()) bad("an array of coordinate arrays");
      for (const auto& e : v)
        if (!is_number_list(e) || e.empty() || e.size() > 2) bad("an array of 1- or 2-component coordinate arrays");
      break;
  }
}

json check_section(const json& in, const std::vector<Key>& keys, const std::string& section) {
  if (!in.is_object()) fail("'" + section + "' must be a table");
  json out = json::object();
  for (auto it = in.begin(); it != in.end(); ++it) {
    bool known = false;
    for (const auto& k : keys) known = known || it.key() == k.name;
    if (!known) fail("unknown key '" + section + "." + it.key() + "'");
  }
  for (const auto& k : keys) {
    const std::string path = section + "." + k.name;
    if (in.contains(k.name)) {
      json v = in.at(k.name);
      check_type(v, k.type, path);
      if (k.type == T::Number) v = v.get<double>();
      out[k.name] = v;
    } else if (k.required) {
      fail("missing required key '" + path + "'");
    } else if (!k.def.is_null()) {
      out[k.name] = k.def;
    }
  }
  return out;
}

std::vector<Key> model_keys(const std::string& type) {
  std::vector<Key> k{req("type", T::String)};
  if (type != "linear") k.push_back(opt("energy_shift", T::Number, 1.0));
  if (type == "zero") {
    k.push_back(opt("dim", T::Integer, 1));
  } else if (type == "square-barrier") {
    k.insert(k.end(), {req("a", T::Number), req("b", T::Number), req("height", T::Number)});
  } else if (type == "gaussian-bump") {
    k.insert(k.end(), {req("amplitude", T::Number), req("width", T::Number),
                       opt("center", T::NumberList, json::array({0.0, 0.0})), opt("dim", T::Integer, 1)});
  } else if (type == "sum-of-bumps") {
    k.insert(k.end(), {req("amplitudes", T::NumberList), req("widths", T::NumberList), req("centers", T::Points),
                       opt("dim", T::Integer, 1)});
  } else if (type == "double-barrier") {
    k.insert(k.end(), {opt("amplitude", T::Number, 2.0), opt("separation", T::Number, 4.0),
                       opt("width", T::Number, 0.3)});
  } else if (type == "three-bump") {
    k.insert(k.end(),
             {opt("amplitude", T::Number, 4.0), opt("width", T::Number, 0.6), opt("side", T::Number, 2.0)});
  } else if (type == "quadratic") {
    k.insert(k.end(), {req("coefficient", T::Number), opt("dim", T::Integer, 1)});
  } else if (type == "custom-table") {
    k.insert(k.end(), {req("xs", T::NumberList), req("vs", T::NumberList)});
  } else if (type != "linear") {
    fail("unknown model.type '" + type + "'");
  }
  return k;
}

json check_model(const json& in) {
  if (!in.is_object()) fail("'model' must be a table");
  if (!in.contains("type")) fail("missing required key 'model.type'");
  if (!in.at("type").is_string()) fail("key 'model.type' must be a string");
  json m = check_section(in, model_keys(in.at("type").get<std::string>()), "model");
  if (m.contains("dim")) {
    const int d = m["dim"].get<int>();
    if (d != 1 && d != 2) fail("model.dim must be 1 or 2");
  }
  if (m["type"] == "sum-of-bumps") {
    const auto n = m["amplitudes"].size();
    if (m["widths"].size() != n || m["centers"].size() != n)
      fail("model.amplitudes, model.widths and model.centers must have equal length");
  }
  if (m["type"] == "custom-table" && m["xs"].size() != m["vs"].size())
    fail("model.xs and model.vs must have equal length");
  return m;
}

const std::vector<Key>& seed_keys() {
  static const std::vector<Key> k{opt("x_box", T::Box), opt("xi_box", T::Box),
                                  opt("seed_mode", T::String, "energy-shell")};
  return k;
}

std::vector<Key> params_keys(Kind kind) {
  std::vector<Key> k;
  switch (kind) {
    case Kind::FlowPortrait:
      k = seed_keys();
      k.insert(k.end(), {req("t_max", T::Number), opt("tol", T::Number, 1e-10), opt("samples", T::Integer, 200),
                         opt("points_per_axis", T::Integer, 5), opt("angles", T::Integer, 8),
                         opt("energies", T::Integer, 1), opt("delta", T::Number, 0.05)});
      break;
    case Kind::TrappedDimension:
      k = seed_keys();
      k.insert(k.end(), {opt("source", T::String, "flow"), opt("depth", T::Integer, 10),
                         opt("points", T::Integer, 1025), opt("points_per_axis", T::Integer, 50),
                         opt("angles", T::Integer, 64), opt("energies", T::Integer, 1),
                         opt("delta", T::Number, 0.05), opt("T_max", T::Number, 4.0), opt("R", T::Number, -1.0),
                         opt("tol", T::Number, 1e-9), opt("ladder_start", T::Number),
                         opt("ladder_fraction", T::Number, 0.125),
                         opt("ladder_ratio", T::Number, std::numbers::sqrt2 / 2.0), opt("rungs", T::Integer, 10),
                         opt("randomized", T::Bool, false)});
      break;
    case Kind::EscapeVerify:
      k = {opt("eps", T::Number, 1e-3),       opt("M", T::Number, 1e3),
           opt("C0", T::Number, 1.0),         opt("C", T::Number, 4.0),
           opt("T", T::Number, 5.0),          opt("grid_points", T::Integer, 61),
           opt("half_width", T::Number, 1.0), opt("phi", T::String),
           opt("x_box", T::Box),              opt("delta", T::Number, 0.05),
           opt("energies", T::Integer, 3),    opt("angles", T::Integer, 32),
           opt("T_max", T::Number, 40.0),
           opt("alpha", T::Number, 0.25),     opt("eta", T::Number, 0.5),
           opt("tol", T::Number, 1e-9),       opt("order_pairs", T::Integer, 2000)};
      break;
    case Kind::Resonances1D:
      k = {req("h", T::Number),          req("theta", T::NumberList),    req("N", T::Integer),
           opt("half_width", T::Number), opt("R0", T::Number),           opt("scheme", T::String, "fd2"),
           opt("sem_order", T::Integer, 12), req("window", T::NumberList), opt("filter_tol", T::Number, 1e-6)};
      break;
    case Kind::ResonanceFree:
      k = {req("h", T::NumberList),
           opt("M", T::Number, 1.0),
           opt("theta_factor", T::Number, 2.0),
           opt("theta2_ratio", T::Number, 1.2),
           opt("spacing_fraction", T::Number, 0.25),
           opt("half_width", T::Number),
           opt("R0", T::Number),
           opt("scheme", T::String, "fd2"),
           opt("sem_order", T::Integer, 12),
           opt("filter_tol", T::Number, 1e-6),
           opt("window_factor", T::Number, 2.0),
           opt("cert_points", T::Integer, 40),
           opt("cert_energies", T::Integer, 40),
           opt("cert_delta", T::Number, 0.2),
           opt("cert_T_max", T::Number, 40.0),
           opt("cert_box", T::Box)};
      break;
    case Kind::WeylCount:
      k = {req("source", T::String),
           req("h", T::NumberList),
           req("C", T::Number),
           opt("E", T::Number, 0.0),
           opt("L", T::Number),
           opt("periodic", T::Bool),
           opt("bound", T::Number, 4.0),
           opt("half_width", T::Number),
           opt("R0", T::Number),
           opt("spacing_fraction", T::Number, 0.25),
           opt("theta_factor", T::Number, 3.0),
           opt("theta2_factor", T::Number, 3.6),
           opt("window_factor", T::Number, 2.0),
           opt("filter_tol", T::Number, 1e-6),
           opt("scheme", T::String, "fd2"),
           opt("sem_order", T::Integer, 12)};
      break;
    case Kind::OpenMap:
      k = {req("k", T::IntList), opt("r", T::NumberList, json::array({0.5})), opt("r_fit", T::Number, 0.5),
           opt("opened", T::Bool, true), opt("control", T::Bool, false)};
      break;
  }
  return k;
}

void require_enum(const json& p, const char* key, std::initializer_list<const char*> allowed) {
  if (!p.contains(key)) return;
  const auto v = p.at(key).get<std::string>();
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return;
    list += std::string(list.empty() ? "" : ", ") + a;
  }
  fail("params." + std::string(key) + " must be one of: " + list);
}

void require_positive(const json& p, const char* key) {
  if (!p.contains(key)) return;
  const auto& v = p.at(key);
  if (v.is_array()) {
    for (const auto& e : v)
      if (!(e.get<double>() > 0.0)) fail("params." + std::string(key) + " entries must be positive");
  } else if (!(v.get<double>() > 0.0)) {
    fail("params." + std::string(key) + " must be positive");
  }
}

void check_params(Kind kind, json& p, const json& model) {
  const std::string mtype = model.is_object() && model.contains("type") ? model["type"].get<std::string>() : "";
  require_enum(p, "seed_mode", {"energy-shell", "rejection"});
  require_enum(p, "scheme", {"fd2", "sem"});
  for (const char* key : {"t_max", "tol", "h", "N", "eps", "M", "C", "T", "points_per_axis", "angles", "energies",
                          "grid_points", "rungs", "samples", "spacing_fraction", "filter_tol", "half_width"})
    require_positive(p, key);
  auto need_box = [&](const char* key) {
    if (!p.contains(key)) fail("missing required key 'params." + std::string(key) + "'");
  };
  switch (kind) {
    case Kind::FlowPortrait:
    case Kind::TrappedDimension: {
      if (kind == Kind::TrappedDimension) {
        require_enum(p, "source", {"flow", "cantor", "segment", "cantor-segment"});
        if (p["source"] != "flow") break;
      }
      need_box("x_box");
      if (p["seed_mode"] == "rejection" || mtype == "linear") need_box("xi_box");
      break;
    }
    case Kind::EscapeVerify:
      require_enum(p, "phi", {"exact", "whitney"});
      if (!p.contains("phi")) p["phi"] = mtype == "linear" ? "exact" : "whitney";
      if (mtype != "linear") need_box("x_box");
      break;
    case Kind::Resonances1D:
      if (p["theta"].size() != 2) fail("params.theta must hold exactly two angles");
      if (p["window"].size() != 4) fail("params.window must be [re_min, re_max, im_min, im_max]");
      break;
    case Kind::ResonanceFree:
      break;
    case Kind::WeylCount:
      require_enum(p, "source", {"circle-lattice", "harmonic", "numeric-bound", "resonances"});
      break;
    case Kind::OpenMap:
      for (const auto& k : p["k"]) {
        const int v = k.get<int>();
        if (v < 1 || v > 7) fail("params.k entries must lie in [1, 7]");
      }
      for (const auto& r : p["r"]) {
        const double v = r.get<double>();
        if (!(v >= 0.0 && v < 1.0)) fail("params.r entries must lie in [0, 1)");
      }
      break;
  }
}

bool model_needed(Kind kind, const json& params) {
  switch (kind) {
    case Kind::OpenMap:
      return false;
    case Kind::TrappedDimension:
      return params.value("source", std::string("flow")) == "flow";
    case Kind::WeylCount: {
      const auto s = params.value("source", std::string());
      return s == "numeric-bound" || s == "resonances";
    }
    default:
      return true;
  }
}

Kind parse_kind(const std::string& s) {
  for (Kind k : {Kind::FlowPortrait, Kind::TrappedDimension, Kind::EscapeVerify, Kind::Resonances1D,
                 Kind::ResonanceFree, Kind::WeylCount, Kind::OpenMap})
    if (s == kind_name(k)) return k;
  fail("unknown experiment kind '" + s + "'");
}

std::array<double, 2> point2(const json& v) {
  std::array<double, 2> p{};
  for (std::size_t i = 0; i < v.size() && i < 2; ++i) p[i] = v[i].get<double>();
  return p;
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::FlowPortrait: return "flow-portrait";
    case Kind::TrappedDimension: return "trapped-dimension";
    case Kind::EscapeVerify: return "escape-verify";
    case Kind::Resonances1D: return "resonances-1d";
    case Kind::ResonanceFree: return "resonance-free";
    case Kind::WeylCount: return "weyl-count";
    case Kind::OpenMap: return "open-map";
  }
  return "?";
}

json parse_config_text(std::string_view text, bool is_json) {
  if (is_json) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      fail(std::string("JSON parse error: ") + e.what());
    }
  }
  try {
    const toml::table t = toml::parse(text);
    return from_toml(t, "");
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
    fail(os.str());
  }
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.extension() == ".json");
}

ExperimentConfig validate_config(const json& raw) {
  if (!raw.is_object()) fail("config root must be a table");
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    bool known = false;
    for (const char* k : {"kind", "seed", "output_dir", "model", "params"}) known = known || it.key() == k;
    if (!known) fail("unknown key '" + it.key() + "'");
  }
  if (!raw.contains("kind")) fail("missing required key 'kind'");
  if (!raw["kind"].is_string()) fail("key 'kind' must be a string");

  ExperimentConfig cfg;
  cfg.kind = parse_kind(raw["kind"].get<std::string>());
  if (raw.contains("seed")) {
    if (!raw["seed"].is_number_integer() || raw["seed"].get<std::int64_t>() < 0)
      fail("key 'seed' must be a non-negative integer");
    cfg.seed = raw["seed"].get<std::uint64_t>();
  }
  if (raw.contains("output_dir")) {
    if (!raw["output_dir"].is_string()) fail("key 'output_dir' must be a string");
    cfg.output_dir = raw["output_dir"].get<std::string>();
  } else {
    cfg.output_dir = std::string("out/") + kind_name(cfg.kind);
  }

  const json params_in = raw.contains("params") ? raw["params"] : json::object();
  cfg.model = json::object();
  if (raw.contains("model")) {
    cfg.model = check_model(raw["model"]);
  } else if (model_needed(cfg.kind, params_in)) {
    fail("missing required table 'model'");
  }
  cfg.params = check_section(params_in, params_keys(cfg.kind), "params");
  check_params(cfg.kind, cfg.params, cfg.model);
  return cfg;
}

HamiltonianModel build_model(const json& m) {
  const auto type = m.at("type").get<std::string>();
  if (type == "linear") return HamiltonianModel::linear_model();
  const double e0 = m.value("energy_shift", 1.0);
  const int dim = m.value("dim", 1);
  Potential pot = Potential::zero(dim);
  if (type == "square-barrier") {
    pot = Potential::square_barrier(m["a"].get<double>(), m["b"].get<double>(), m["height"].get<double>());
  } else if (type == "gaussian-bump") {
    pot = Potential::gaussian_bump(m["amplitude"].get<double>(), m["width"].get<double>(), point2(m["center"]), dim);
  } else if (type == "sum-of-bumps") {
    std::vector<Bump> bumps;
    for (std::size_t i = 0; i < m["amplitudes"].size(); ++i)
      bumps.push_back({point2(m["centers"][i]), m["amplitudes"][i].get<double>(), m["widths"][i].get<double>()});
    pot = Potential::sum_of_bumps(std::move(bumps), dim);
  } else if (type == "double-barrier") {
    pot = Potential::double_barrier(m["amplitude"].get<double>(), m["separation"].get<double>(),
                                    m["width"].get<double>());
  } else if (type == "three-bump") {
    pot = Potential::three_bump(m["amplitude"].get<double>(), m["width"].get<double>(), m["side"].get<double>());
  } else if (type == "quadratic") {
    pot = Potential::quadratic(m["coefficient"].get<double>(), dim);
  } else if (type == "custom-table") {
    pot = Potential::custom_table(m["xs"].get<std::vector<double>>(), m["vs"].get<std::vector<double>>());
  }
  return HamiltonianModel::schrodinger(std::move(pot), e0);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = kind_name(cfg.kind);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["model"] = cfg.model;
  j["params"] = cfg.params;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace reslab::cli
