#include <reslab/cli/run.hpp>

#include <reslab/cli/pipelines.hpp>
#include <reslab/error.hpp>

#include <Eigen/Core>
#include <toml.hpp>

#include <chrono>
#include <ctime>
#include <fstream>

#ifndef RESLAB_VERSION
#define RESLAB_VERSION "unknown"
#endif

namespace reslab::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_failure(const fs::path& dir, const std::string& code, const std::string& what) {
  std::ofstream out(dir / "failure.json", std::ios::binary);
  out << json{{"error", code}, {"message", what}}.dump(2) << '\n';
}

}  // namespace

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg, const std::string& status, double wall_time_s) {
  json m;
  m["kind"] = kind_name(cfg.kind);
  m["seed"] = cfg.seed;
  m["config_hash"] = config_hash(cfg);
  m["config"] = to_json(cfg);
  m["status"] = status;
  m["written_utc"] = utc_now();
  if (wall_time_s >= 0.0) m["wall_time_s"] = wall_time_s;
  m["versions"] = {{"reslab", RESLAB_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"tomlplusplus", std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) + "." +
                                        std::to_string(TOML_LIB_PATCH)},
                   {"compiler", __VERSION__}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest in " + dir.string());
  out << m.dump(2) << '\n';
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::optional<fs::path>& out_dir) {
  RunOutcome r;
  r.out_dir = out_dir ? *out_dir : fs::path(cfg.output_dir);
  try {
    preflight(cfg);
  } catch (const Error& e) {
    r.exit_code = kExitConfig;
    r.message = e.what();
    return r;
  }
  std::error_code ec;
  fs::create_directories(r.out_dir, ec);
  if (ec) {
    r.exit_code = kExitNumeric;
    r.message = "cannot create " + r.out_dir.string() + ": " + ec.message();
    return r;
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  write_manifest(r.out_dir, cfg, "running", -1.0);
  try {
    r.summary = run_pipeline(cfg, r.out_dir);
    std::ofstream(r.out_dir / "summary.json", std::ios::binary) << r.summary.dump(2) << '\n';
    write_manifest(r.out_dir, cfg, "ok", elapsed());
  } catch (const Error& e) {
    r.exit_code = e.code() == ErrorCode::ConfigError ? kExitConfig : kExitNumeric;
    r.message = e.what();
    write_failure(r.out_dir, std::string(to_string(e.code())), e.what());
    write_manifest(r.out_dir, cfg, "failed", elapsed());
  } catch (const std::exception& e) {
    r.exit_code = kExitNumeric;
    r.message = e.what();
    write_failure(r.out_dir, "Unexpected", e.what());
    write_manifest(r.out_dir, cfg, "failed", elapsed());
  }
  return r;
}

RunOutcome run_config_file(const fs::path& config, const std::optional<fs::path>& out_dir) {
  ExperimentConfig cfg;
  try {
    cfg = validate_config(load_config_file(config));
  } catch (const Error& e) {
    RunOutcome r;
    r.exit_code = kExitConfig;
    r.message = e.what();
    return r;
  }
  return run_experiment(cfg, out_dir);
}

}  // namespace reslab::cli
