#include "specinv/config.hpp"
#include "specinv/error.hpp"
#include "specinv/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string stage;
  std::string input;
  std::optional<double> perimeter;
};

specinv::PipelineConfig resolve_config(const Options& o) {
  using specinv::ErrorCode;
  if (!o.config_path.empty() && !o.preset.empty())
    throw specinv::Error(ErrorCode::ConfigInvalid, "--config and --preset are mutually exclusive");
  if (o.config_path.empty() && o.preset.empty())
    throw specinv::Error(ErrorCode::ConfigInvalid, "one of --config or --preset is required");
  specinv::PipelineConfig c = o.config_path.empty() ? specinv::preset(o.preset) : specinv::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  return c;
}

int run(const Options& o, const std::string& command) {
  if (command == "presets") {
    for (const auto& name : specinv::preset_names()) std::cout << name << '\n';
    return 0;
  }
  if (command == "lift" && !o.input.empty()) {
    specinv::SignRecoveryOptions sign;
    if (!o.config_path.empty() || !o.preset.empty()) sign = resolve_config(o).sign;
    specinv::lift_trace_file(o.input, o.perimeter, sign, o.out);
    return 0;
  }

  specinv::Pipeline pipeline(resolve_config(o), o.out);
  std::string stage = command == "run" ? o.stage : command;
  if (stage.empty()) {
    pipeline.run_all();
    return 0;
  }
  const auto parsed = specinv::parse_stage(stage);
  if (!parsed) throw specinv::Error(specinv::ErrorCode::ConfigInvalid, "unknown stage '" + stage + "'");
  pipeline.run_stage(*parsed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse spectral toolkit for Neumann Schroedinger operators"};
  app.set_version_flag("--version", SPECINV_VERSION);
  app.require_subcommand(0, 1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--preset", o.preset, "bundled configuration name");
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--seed", o.seed, "override the configuration seed");
  app.add_option("--stage", o.stage, "run a single stage (with 'run')");

  app.add_subcommand("run", "run every enabled stage (default)");
  app.add_subcommand("forward", "eigensystem.csv from the configured operator");
  app.add_subcommand("synthesize", "theta.csv from eigensystem.csv");
  app.add_subcommand("extract", "extracted.csv from theta.csv");
  auto* lift = app.add_subcommand("lift", "traces_signed.csv and zeros.csv from extracted.csv or --input");
  lift->add_option("--input", o.input, "CSV with columns node, arclength, sqtrace")->check(CLI::ExistingFile);
  lift->add_option("--perimeter", o.perimeter, "curve length for --input (default: uniform spacing)");
  app.add_subcommand("ndmap", "ndmap_<lambda>.csv from eigensystem.csv");
  app.add_subcommand("reconstruct", "reconstruction.json and q_estimate.csv");
  app.add_subcommand("probe", "probe.json for the configured potential pair");
  app.add_subcommand("presets", "list bundled configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : specinv::exit_code(specinv::ErrorCode::ConfigInvalid);
  }

  const auto chosen = app.get_subcommands();
  const std::string command = chosen.empty() ? "run" : chosen.front()->get_name();
  try {
    return run(o, command);
  } catch (const specinv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return specinv::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
