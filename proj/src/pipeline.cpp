#include "specinv/pipeline.hpp"

#include "specinv/csv.hpp"
#include "specinv/error.hpp"
#include "specinv/forward_solver.hpp"
#include "specinv/inverse.hpp"
#include "specinv/sign_recovery.hpp"
#include "specinv/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>

namespace specinv {

using nlohmann::json;

namespace {

constexpr Stage kAllStages[] = {Stage::Forward, Stage::Synthesize, Stage::Extract,    Stage::Lift,
                                Stage::NdMap,   Stage::Reconstruct, Stage::Probe};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingInput, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd boundary_data(const BoundaryData& spec, const std::vector<double>& draws, std::size_t offset,
                              std::size_t count) {
  if (const auto* values = std::get_if<std::vector<double>>(&spec)) {
    if (values->size() != count)
      throw Error(ErrorCode::ConfigInvalid, "probe data has " + std::to_string(values->size()) +
                                                " values, boundary has " + std::to_string(count));
    return Eigen::Map<const Eigen::VectorXd>(values->data(), static_cast<Eigen::Index>(count));
  }
  return Eigen::Map<const Eigen::VectorXd>(draws.data() + offset, static_cast<Eigen::Index>(count));
}

}  // namespace

std::string_view stage_name(Stage stage) noexcept {
  switch (stage) {
    case Stage::Forward: return "forward";
    case Stage::Synthesize: return "synthesize";
    case Stage::Extract: return "extract";
    case Stage::Lift: return "lift";
    case Stage::NdMap: return "ndmap";
    case Stage::Reconstruct: return "reconstruct";
    case Stage::Probe: return "probe";
  }
  return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) noexcept {
  for (Stage s : kAllStages)
    if (stage_name(s) == name) return s;
  return std::nullopt;
}

std::string nd_file_name(double lambda) { return "ndmap_" + csv::format_real(lambda) + ".csv"; }

Pipeline::Pipeline(PipelineConfig config, std::filesystem::path out_dir)
    : config_(std::move(config)), out_(std::move(out_dir)) {
  config_.validate();
  domain_ = std::make_shared<const Domain>(build_domain(config_.domain));
  std::filesystem::create_directories(out_);
}

void Pipeline::record_output(const std::string& name) {
  if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
}

void Pipeline::run_stage(Stage stage) {
  switch (stage) {
    case Stage::Forward: forward(); break;
    case Stage::Synthesize: synthesize(); break;
    case Stage::Extract: extract(); break;
    case Stage::Lift: lift(); break;
    case Stage::NdMap: ndmap(); break;
    case Stage::Reconstruct: reconstruct(); break;
    case Stage::Probe: probe(); break;
  }
}

void Pipeline::run_all() {
  std::vector<Stage> stages{Stage::Forward, Stage::Synthesize, Stage::Extract, Stage::Lift};
  if (!config_.nd_lambdas.empty()) stages.push_back(Stage::NdMap);
  if (config_.reconstruction.enabled) stages.push_back(Stage::Reconstruct);
  if (config_.probe.enabled) stages.push_back(Stage::Probe);

  json timings = json::object();
  json names = json::array();
  for (Stage s : stages) {
    const auto start = std::chrono::steady_clock::now();
    run_stage(s);
    timings[std::string(stage_name(s))] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    names.push_back(std::string(stage_name(s)));
  }

  json manifest;
  manifest["tool"] = "specinv";
  manifest["version"] = SPECINV_VERSION;
  manifest["config"] = config_to_json(config_);
  manifest["stages"] = names;
  manifest["outputs"] = outputs_;
  manifest["warnings"] = warnings_;
  write_json(file("run_manifest.json"), manifest);
  // Wall-clock data lives apart from the manifest so reruns stay byte-identical.
  write_json(file("timings.json"), timings);
}

void Pipeline::forward() {
  const DiscreteOperator op = assemble_operator(domain_, make_potential(domain_->grid, config_.potential));
  const EigenSystem eig = eigensolve(op, config_.j_max);
  csv::write(file("eigensystem.csv"), csv::eigensystem_table(eig));
  record_output("eigensystem.csv");
}

void Pipeline::synthesize() {
  const EigenSystem eig = csv::eigensystem_from_table(csv::read(file("eigensystem.csv")), domain_->grid.size());
  const Eigen::VectorXd grid = make_lambda_grid(config_.lambda_min, config_.lambda_max, config_.lambda_step);
  csv::write(file("theta.csv"), csv::theta_table(synthesize_theta(eig, grid)));
  record_output("theta.csv");
}

void Pipeline::extract() {
  const SpectralSamples samples = csv::theta_from_table(csv::read(file("theta.csv")));
  std::optional<ThetaSynthesizer> exact;
  if (std::filesystem::exists(file("eigensystem.csv")))
    exact.emplace(csv::eigensystem_from_table(csv::read(file("eigensystem.csv")), domain_->grid.size()));
  const ExtractedData data = extract_eigendata(samples, config_.extraction, exact ? &*exact : nullptr);
  for (const auto& w : data.warnings) {
    std::cerr << "warning: " << w << '\n';
    warnings_.push_back(w);
  }
  csv::write(file("extracted.csv"), csv::extracted_table(data));
  record_output("extracted.csv");
}

void Pipeline::lift() {
  const ExtractedData data = csv::extracted_from_table(csv::read(file("extracted.csv")));
  const BoundaryMesh& mesh = domain_->boundary;
  std::vector<SignedTrace> traces;
  for (std::size_t j = 0; j < data.count(); ++j) {
    const Eigen::VectorXd sq = data.squared_traces.row(static_cast<Eigen::Index>(j)).transpose();
    if (mesh.closed) {
      try {
        traces.push_back(lift_sign(mesh, sq, config_.sign));
      } catch (const Error& e) {
        std::string what = e.what();
        what.erase(0, what.find(": ") + 2);
        throw Error(e.code(), "trace " + std::to_string(j + 1) + ": " + what);
      }
    } else {
      SignedTrace t;
      t.values = positive_root(sq);
      traces.push_back(std::move(t));
    }
  }
  csv::write(file("traces_signed.csv"), csv::signed_traces_table(traces, mesh));
  csv::write(file("zeros.csv"), csv::zeros_table(traces));
  record_output("traces_signed.csv");
  record_output("zeros.csv");
}

void Pipeline::ndmap() {
  const EigenSystem eig = csv::eigensystem_from_table(csv::read(file("eigensystem.csv")), domain_->grid.size());
  const std::size_t cut = config_.nd_j_cut == 0 ? eig.count() : std::min(config_.nd_j_cut, eig.count());
  for (double lambda : config_.nd_lambdas) {
    const NDOperator nd = nd_map(eig, lambda, cut, domain_->boundary);
    const std::string name = nd_file_name(lambda);
    csv::write(file(name), csv::nd_table(nd));
    record_output(name);
  }
}

void Pipeline::reconstruct() {
  const auto& rc = config_.reconstruction;
  const Grid& grid = domain_->grid;

  ReconstructionData data;
  data.spectral = csv::extracted_from_table(csv::read(file("extracted.csv")));
  if (rc.use_signed_traces)
    data.signed_traces = csv::signed_traces_from_table(csv::read(file("traces_signed.csv")), domain_->boundary.size());

  ParameterBasis basis;
  for (const auto& name : rc.basis) basis.functions.push_back(make_potential(grid, PotentialSpec{{{1.0, name}}}));

  ReconstructionOptions options;
  options.reg_weight = rc.reg_weight;
  options.max_iter = rc.max_iter;
  options.use_signed_traces = rc.use_signed_traces;
  const ReconstructionProblem problem(domain_, std::move(basis), std::move(data), options);

  Eigen::VectorXd initial = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rc.basis.size()));
  for (std::size_t k = 0; k < rc.initial.size(); ++k) initial(static_cast<Eigen::Index>(k)) = rc.initial[k];
  const ReconstructionResult result = reconstruct_potential(problem, initial);

  json report;
  report["basis"] = rc.basis;
  report["initial"] = to_std(initial);
  report["coefficients"] = to_std(result.coefficients);
  report["misfit_history"] = result.misfit_history;
  report["data_misfit"] = result.data_misfit;
  report["iterations"] = result.iterations;
  report["reg_weight"] = result.reg_weight;
  report["use_signed_traces"] = rc.use_signed_traces;

  // The generating potential is known when every term lies in the basis.
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(initial.size());
  bool representable = true;
  for (const auto& term : config_.potential.terms) {
    const auto it = std::find(rc.basis.begin(), rc.basis.end(), term.basis);
    if (it == rc.basis.end()) {
      representable = false;
      break;
    }
    truth(it - rc.basis.begin()) += term.coefficient;
  }
  if (representable) {
    report["truth_coefficients"] = to_std(truth);
    report["misfit_at_truth"] = problem.data_misfit(truth);
    report["max_coefficient_error"] = (result.coefficients - truth).cwiseAbs().maxCoeff();
  }
  write_json(file("reconstruction.json"), report);
  record_output("reconstruction.json");

  csv::Table q;
  q.header = {"node", "x", "y", "q"};
  for (std::size_t n = 0; n < grid.size(); ++n)
    q.rows.push_back({static_cast<double>(n), grid.x(n), grid.y(n), result.q_estimate.values(static_cast<Eigen::Index>(n))});
  csv::write(file("q_estimate.csv"), q);
  record_output("q_estimate.csv");
}

void Pipeline::probe() {
  const auto& pc = config_.probe;
  const std::size_t nb = domain_->boundary.size();
  const std::vector<double> draws = seeded_uniform(config_.seed, 2 * nb);
  const Eigen::VectorXd f = boundary_data(pc.f, draws, 0, nb);
  const Eigen::VectorXd g = boundary_data(pc.g, draws, nb, nb);
  const Potential q1 = make_potential(domain_->grid, config_.potential);
  const Potential q2 = make_potential(domain_->grid, pc.q2);
  const ProbeReport r = orthogonality_probe(domain_, q1, q2, pc.lambda, f, g);

  json report;
  report["lambda"] = pc.lambda;
  report["f"] = to_std(f);
  report["g"] = to_std(g);
  report["orthogonality_value"] = r.orthogonality_value;
  report["boundary_term"] = r.boundary_term;
  report["boundary_term_imposed"] = r.boundary_term_imposed;
  report["green_residual"] = r.green_residual;
  write_json(file("probe.json"), report);
  record_output("probe.json");
}

void run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  Pipeline(config, out_dir).run_all();
}

void lift_trace_file(const std::filesystem::path& input, std::optional<double> perimeter,
                     const SignRecoveryOptions& options, const std::filesystem::path& out_dir) {
  const csv::Table t = csv::read(input);
  if (t.header.size() != 3) throw Error(ErrorCode::ConfigInvalid, "trace CSV needs columns node, arclength, sqtrace");
  if (t.rows.size() < 8) throw Error(ErrorCode::ConfigInvalid, "trace CSV needs at least 8 nodes");
  BoundaryMesh mesh;
  mesh.closed = true;
  Eigen::VectorXd sq(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    mesh.nodes.push_back(i);
    mesh.arclength.push_back(t.rows[i][1]);
    sq(static_cast<Eigen::Index>(i)) = t.rows[i][2];
  }
  for (std::size_t i = 1; i < mesh.size(); ++i)
    if (!(mesh.arclength[i] > mesh.arclength[i - 1]))
      throw Error(ErrorCode::ConfigInvalid, "arclength must be strictly increasing");
  mesh.perimeter = perimeter ? *perimeter
                             : mesh.arclength.back() + (mesh.arclength.back() - mesh.arclength.front()) /
                                                           static_cast<double>(mesh.size() - 1);
  if (!(mesh.perimeter > mesh.arclength.back() - mesh.arclength.front()))
    throw Error(ErrorCode::ConfigInvalid, "perimeter must exceed the arclength span");
  const std::size_t n = mesh.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? mesh.arclength[i + 1] : mesh.arclength.front() + mesh.perimeter;
    const double prev = i > 0 ? mesh.arclength[i - 1] : mesh.arclength.back() - mesh.perimeter;
    mesh.weights.push_back(0.5 * (next - prev));
  }

  std::filesystem::create_directories(out_dir);
  const std::vector<SignedTrace> traces{lift_sign(mesh, sq, options)};
  csv::write(out_dir / "traces_signed.csv", csv::signed_traces_table(traces, mesh));
  csv::write(out_dir / "zeros.csv", csv::zeros_table(traces));
}

}  // namespace specinv
