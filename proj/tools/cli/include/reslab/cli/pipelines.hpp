#pragma once

#include <reslab/cli/config.hpp>

#include <filesystem>

namespace reslab::cli {

/// Model-dependent config checks (dimension of boxes, model kind per
/// experiment). Throws ConfigError; runs before any artifact is written.
void preflight(const ExperimentConfig& cfg);

/// Executes the experiment and returns its summary. Artifacts go to out_dir;
/// an empty path skips every file write. Numeric failures propagate as
/// reslab::Error after whatever partial artifacts were already written.
json run_pipeline(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace reslab::cli
