#pragma once

#include <reslab/model.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace reslab::cli {

using json = nlohmann::json;

enum class Kind { FlowPortrait, TrappedDimension, EscapeVerify, Resonances1D, ResonanceFree, WeylCount, OpenMap };

const char* kind_name(Kind k);

/// A validated experiment: defaults filled in, unknown keys rejected.
struct ExperimentConfig {
  Kind kind = Kind::FlowPortrait;
  std::uint64_t seed = 0;
  std::string output_dir;
  json model;    // empty object when the kind needs no model
  json params;
};

/// TOML (default) or JSON text to a json tree. Throws ConfigError.
json parse_config_text(std::string_view text, bool is_json);
/// By extension: .json is JSON, anything else TOML. Throws ConfigError / IoError.
json load_config_file(const std::filesystem::path& path);

/// Schema check. Throws ConfigError naming the offending key.
ExperimentConfig validate_config(const json& raw);

/// Model section to a HamiltonianModel.
HamiltonianModel build_model(const json& model);

/// Validated config as canonical JSON (sorted keys, defaults included).
json to_json(const ExperimentConfig& cfg);
/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace reslab::cli
