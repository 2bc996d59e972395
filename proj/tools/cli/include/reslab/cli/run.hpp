#pragma once

#include <reslab/cli/config.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace reslab::cli {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

struct RunOutcome {
  int exit_code = kExitOk;
  json summary;
  std::string message;
  std::filesystem::path out_dir;
};

/// Validated config -> manifest.json (written first), artifacts, summary.json.
/// Numeric failures leave failure.json next to the partial artifacts.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir = {});

/// `run <config>`: load, validate, run. Config errors leave no artifacts.
RunOutcome run_config_file(const std::filesystem::path& config,
                           const std::optional<std::filesystem::path>& out_dir = {});

/// Writes manifest.json; wall_time_s < 0 marks a run still in progress.
void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg, const std::string& status,
                    double wall_time_s);

}  // namespace reslab::cli
