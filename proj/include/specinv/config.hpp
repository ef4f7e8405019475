#pragma once

#include "specinv/core_model.hpp"
#include "specinv/sign_recovery.hpp"
#include "specinv/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace specinv {

/// One term `coefficient * basis(x, y)` of a potential. Basis names are a
/// fixed vocabulary: "1", "x", "y", "x^2", "y^2", "sin(x)", "cos(x)",
/// "sin(y)", "cos(y)", "sin(pi*x/a)", "cos(pi*x/a)", "sin(pi*y/b)", "cos(pi*y/b)".
struct PotentialTerm {
  double coefficient = 0.0;
  std::string basis;
};

struct PotentialSpec {
  std::vector<PotentialTerm> terms;  // empty means q = 0
};

ScalarField basis_function(const std::string& name, const DomainSpec& domain);
Potential make_potential(const Grid& grid, const PotentialSpec& spec);

/// Boundary data for the probe: explicit nodal values or a seeded random draw.
using BoundaryData = std::variant<std::string, std::vector<double>>;

struct PipelineConfig {
  std::string name = "custom";
  DomainSpec domain;
  PotentialSpec potential;
  std::size_t j_max = 0;  // 0 = full discrete basis
  double lambda_min = -0.5;
  double lambda_max = 10.5;
  double lambda_step = 0.02;
  ExtractionOptions extraction;
  SignRecoveryOptions sign;
  std::vector<double> nd_lambdas;
  std::size_t nd_j_cut = 0;  // 0 = every available pair

  struct Reconstruction {
    bool enabled = false;
    std::vector<std::string> basis;
    std::vector<double> initial;
    double reg_weight = 0.0;
    int max_iter = 50;
    bool use_signed_traces = false;
  } reconstruction;

  struct Probe {
    bool enabled = false;
    PotentialSpec q2;
    double lambda = -1.0;
    BoundaryData f = std::string("random");
    BoundaryData g = std::string("random");
  } probe;

  std::uint64_t seed = 1;

  /// Throws ConfigInvalid on non-positive tolerances or a grid too coarse for eps_gap.
  void validate() const;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Bundled configuration; throws ConfigInvalid for an unknown name.
PipelineConfig preset(const std::string& name);

/// Uniform draws in [-1, 1) from a 64-bit seed, identical across platforms.
std::vector<double> seeded_uniform(std::uint64_t seed, std::size_t count);

}  // namespace specinv
