#include <reslab/cli/config.hpp>
#include <reslab/cli/plotdata.hpp>
#include <reslab/cli/run.hpp>
#include <reslab/error.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  using namespace reslab::cli;
  CLI::App app{"reslab: resonance and trapped-set experiments"};
  app.require_subcommand(1);

  std::string run_cfg, run_out;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", run_cfg, "TOML or JSON experiment config")->required();
  run->add_option("-o,--output", run_out, "Override output_dir");

  std::string val_cfg;
  auto* validate = app.add_subcommand("validate", "Check a config against the schema");
  validate->add_option("config", val_cfg, "TOML or JSON experiment config")->required();

  std::string artifact, kind, plot_out;
  auto* plot = app.add_subcommand("emit-plot", "Convert an artifact to plot-ready CSV");
  plot->add_option("artifact", artifact, "Artifact CSV")->required();
  plot->add_option("kind", kind, "counting-curve | resonance-set | dimension-fit | modulus-counting")->required();
  plot->add_option("-o,--output", plot_out, "Write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    std::optional<std::filesystem::path> out;
    if (!run_out.empty()) out = run_out;
    const RunOutcome r = run_config_file(run_cfg, out);
    if (r.exit_code == kExitOk) {
      std::cout << r.summary.dump(2) << '\n';
    } else {
      std::cerr << "reslab: " << r.message << '\n';
    }
    return r.exit_code;
  }
  if (*validate) {
    try {
      const auto cfg = validate_config(load_config_file(val_cfg));
      std::cout << to_json(cfg).dump(2) << '\n';
      return kExitOk;
    } catch (const reslab::Error& e) {
      std::cerr << "reslab: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  try {
    if (plot_out.empty()) {
      emit_plotdata(artifact, kind, std::cout);
    } else {
      std::ofstream os(plot_out, std::ios::binary);
      emit_plotdata(artifact, kind, os);
    }
  } catch (const reslab::Error& e) {
    std::cerr << "reslab: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
