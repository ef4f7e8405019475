#pragma once

#include "specinv/config.hpp"
#include "specinv/core_model.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace specinv {

enum class Stage { Forward, Synthesize, Extract, Lift, NdMap, Reconstruct, Probe };

std::string_view stage_name(Stage stage) noexcept;
std::optional<Stage> parse_stage(std::string_view name) noexcept;

/// File-backed pipeline. Every stage reads the previous stage's files from the
/// output directory, so a chain of single-stage runs reproduces run_all()
/// byte for byte.
///
///   forward     -> eigensystem.csv
///   synthesize  -> theta.csv
///   extract     -> extracted.csv
///   lift        -> traces_signed.csv, zeros.csv
///   ndmap       -> ndmap_<lambda>.csv
///   reconstruct -> reconstruction.json, q_estimate.csv
///   probe       -> probe.json
class Pipeline {
 public:
  Pipeline(PipelineConfig config, std::filesystem::path out_dir);

  void run_stage(Stage stage);
  /// Every stage the configuration enables, then run_manifest.json and timings.json.
  void run_all();

  const PipelineConfig& config() const noexcept { return config_; }
  const std::shared_ptr<const Domain>& domain() const noexcept { return domain_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void forward();
  void synthesize();
  void extract();
  void lift();
  void ndmap();
  void reconstruct();
  void probe();

  std::filesystem::path file(const std::string& name) const { return out_ / name; }
  void record_output(const std::string& name);

  PipelineConfig config_;
  std::filesystem::path out_;
  std::shared_ptr<const Domain> domain_;
  std::vector<std::string> outputs_;
  std::vector<std::string> warnings_;
};

/// Convenience wrapper for Pipeline(config, out).run_all().
void run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir);

/// Lift a standalone squared-trace CSV with columns node, arclength, sqtrace
/// on a closed curve. Without `perimeter` the nodes are taken as uniformly
/// spaced. Writes traces_signed.csv and zeros.csv into out_dir.
void lift_trace_file(const std::filesystem::path& input, std::optional<double> perimeter,
                     const SignRecoveryOptions& options, const std::filesystem::path& out_dir);

/// Name of the N-D map file for a given lambda.
std::string nd_file_name(double lambda);

}  // namespace specinv
