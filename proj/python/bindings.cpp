#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "specinv/config.hpp"
#include "specinv/error.hpp"
#include "specinv/forward_solver.hpp"
#include "specinv/inverse.hpp"
#include "specinv/pipeline.hpp"
#include "specinv/sign_recovery.hpp"
#include "specinv/spectral.hpp"

namespace py = pybind11;
using namespace specinv;

namespace {

using DomainPtr = std::shared_ptr<Domain>;

Potential as_potential(const DomainPtr& d, const Eigen::VectorXd& q) {
  Potential p{q};
  check_shape(d->grid, p);
  return p;
}

DiscreteOperator make_operator(const DomainPtr& d, const Eigen::VectorXd& q) {
  return assemble_operator(d, as_potential(d, q));
}

SignRecoveryOptions sign_options(double tau_rel, int window, int m_max, double min_confidence) {
  SignRecoveryOptions o;
  o.tau_rel = tau_rel;
  o.window = window;
  o.m_max = m_max;
  o.min_confidence = min_confidence;
  return o;
}

py::dict signed_trace_dict(const SignedTrace& t) {
  py::list zeros;
  for (const auto& z : t.zeros)
    zeros.append(py::dict(py::arg("location") = z.location, py::arg("order") = z.order,
                          py::arg("confidence") = z.confidence));
  return py::dict(py::arg("values") = t.values, py::arg("zeros") = zeros, py::arg("seed_node") = t.seed_node);
}

PipelineConfig config_from(const std::string& preset_or_json) {
  if (!preset_or_json.empty() && preset_or_json.front() == '{')
    return config_from_json(nlohmann::json::parse(preset_or_json));
  return preset(preset_or_json);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inverse spectral toolkit for Neumann Schroedinger operators";
  m.attr("__version__") = SPECINV_VERSION;

  static py::handle error_type = py::exception<Error>(m, "SpecinvError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(error_name(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<Domain, DomainPtr>(m, "Domain")
      .def_static("interval", [](double a, int n) { return std::make_shared<Domain>(build_domain(DomainSpec::interval(a, n))); },
                  py::arg("length"), py::arg("n"))
      .def_static(
          "rectangle",
          [](double a, std::optional<double> b, int n_a, int n_b) {
            const DomainSpec spec = b ? DomainSpec::rectangle(a, *b, n_a, n_b) : DomainSpec::rectangle(a, n_a, n_b);
            return std::make_shared<Domain>(build_domain(spec));
          },
          py::arg("a"), py::arg("b") = py::none(), py::arg("n_a"), py::arg("n_b"),
          "Rectangle [0,a] x [0,b]; b defaults to a * 2**0.25.")
      .def_property_readonly("size", [](const Domain& d) { return d.grid.size(); })
      .def_property_readonly("x", [](const Domain& d) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(d.grid.size()));
        for (std::size_t n = 0; n < d.grid.size(); ++n) x(static_cast<Eigen::Index>(n)) = d.grid.x(n);
        return x;
      })
      .def_property_readonly("y", [](const Domain& d) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(d.grid.size()));
        for (std::size_t n = 0; n < d.grid.size(); ++n) y(static_cast<Eigen::Index>(n)) = d.grid.y(n);
        return y;
      })
      .def_property_readonly("boundary_nodes", [](const Domain& d) { return d.boundary.nodes; })
      .def_property_readonly("arclength", [](const Domain& d) { return d.boundary.arclength; })
      .def_property_readonly("boundary_weights", [](const Domain& d) { return d.boundary.weights; })
      .def_property_readonly("perimeter", [](const Domain& d) { return d.boundary.perimeter; });

  m.def(
      "sample_potential",
      [](const DomainPtr& d, const std::function<double(double, double)>& f) {
        return sample_potential(d->grid, f).values;
      },
      py::arg("domain"), py::arg("formula"), "Nodal values of formula(x, y).");

  py::class_<EigenSystem>(m, "EigenSystem")
      .def_readonly("eigenvalues", &EigenSystem::eigenvalues)
      .def_readonly("vectors", &EigenSystem::vectors)
      .def_readonly("traces", &EigenSystem::traces)
      .def_readonly("dof", &EigenSystem::dof)
      .def_property_readonly("complete", &EigenSystem::complete);

  m.def(
      "eigensolve",
      [](const DomainPtr& d, const Eigen::VectorXd& q, std::size_t j_max) { return eigensolve(make_operator(d, q), j_max); },
      py::arg("domain"), py::arg("q"), py::arg("j_max") = 0,
      "Lowest j_max Neumann eigenpairs, M-orthonormal; j_max = 0 returns the full basis.");

  m.def(
      "solve_neumann_bvp",
      [](const DomainPtr& d, const Eigen::VectorXd& q, double lambda, const Eigen::VectorXd& f) {
        const BvpSolution s = solve_neumann_bvp(make_operator(d, q), lambda, f);
        return py::make_tuple(s.interior, s.trace);
      },
      py::arg("domain"), py::arg("q"), py::arg("lambda_"), py::arg("f"), "Returns (interior, trace).");

  py::class_<SpectralSamples>(m, "SpectralSamples")
      .def_readonly("lambda_grid", &SpectralSamples::lambda_grid)
      .def_readonly("theta", &SpectralSamples::theta);

  py::class_<ExtractedData>(m, "ExtractedData")
      .def_readonly("eigenvalues", &ExtractedData::eigenvalues)
      .def_readonly("squared_traces", &ExtractedData::squared_traces)
      .def_readonly("warnings", &ExtractedData::warnings);

  m.def("make_lambda_grid", &make_lambda_grid, py::arg("min"), py::arg("max"), py::arg("step"));
  m.def("synthesize_theta", &synthesize_theta, py::arg("eig"), py::arg("lambda_grid"));
  m.def(
      "extract_eigendata",
      [](const SpectralSamples& s, double eps_gap, double jump_tol, const EigenSystem* refine) {
        ExtractionOptions o;
        o.eps_gap = eps_gap;
        o.jump_tol = jump_tol;
        if (refine == nullptr) return extract_eigendata(s, o);
        const ThetaSynthesizer exact(*refine);
        return extract_eigendata(s, o, &exact);
      },
      py::arg("samples"), py::arg("eps_gap") = 0.1, py::arg("jump_tol") = 0.0, py::arg("refine") = nullptr,
      "Eigenvalues and squared traces from theta samples; `refine` enables bisection on the exact theta.");

  m.def(
      "lift_sign",
      [](const Eigen::VectorXd& squared, double perimeter, double tau_rel, int window, int m_max,
         double min_confidence) {
        const BoundaryMesh mesh = BoundaryMesh::uniform_closed(static_cast<std::size_t>(squared.size()), perimeter);
        return signed_trace_dict(lift_sign(mesh, squared, sign_options(tau_rel, window, m_max, min_confidence)));
      },
      py::arg("squared"), py::arg("perimeter"), py::arg("tau_rel") = 1e-8, py::arg("window") = 5,
      py::arg("m_max") = 6, py::arg("min_confidence") = 2.0,
      "Signed f from f^2 sampled uniformly on a closed curve of the given length.");

  m.def(
      "estimate_order",
      [](const Eigen::VectorXd& squared, double perimeter, double location, int window, int m_max,
         double min_confidence) {
        const BoundaryMesh mesh = BoundaryMesh::uniform_closed(static_cast<std::size_t>(squared.size()), perimeter);
        const ZeroAnnotation z = estimate_order(mesh, squared, location, window, m_max, min_confidence);
        return py::make_tuple(z.order, z.confidence);
      },
      py::arg("squared"), py::arg("perimeter"), py::arg("location"), py::arg("window") = 5, py::arg("m_max") = 6,
      py::arg("min_confidence") = 2.0, "Returns (order, confidence).");

  m.def("verify_square_uniqueness", &verify_square_uniqueness, py::arg("f"), py::arg("g"));

  m.def(
      "nd_map",
      [](const EigenSystem& eig, double lambda, std::size_t j_cut, const DomainPtr& d) {
        return nd_map(eig, lambda, j_cut == 0 ? eig.count() : j_cut, d->boundary).map;
      },
      py::arg("eig"), py::arg("lambda_"), py::arg("j_cut"), py::arg("domain"),
      "N-D matrix from the truncated resolvent kernel; j_cut = 0 uses every pair.");
  m.def(
      "nd_map_direct",
      [](const DomainPtr& d, const Eigen::VectorXd& q, double lambda) {
        return nd_map_direct(make_operator(d, q), lambda).map;
      },
      py::arg("domain"), py::arg("q"), py::arg("lambda_"));

  m.def(
      "orthogonality_probe",
      [](const DomainPtr& d, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2, double lambda,
         const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        const ProbeReport r = orthogonality_probe(d, as_potential(d, q1), as_potential(d, q2), lambda, f, g);
        return py::dict(py::arg("orthogonality_value") = r.orthogonality_value,
                        py::arg("boundary_term") = r.boundary_term, py::arg("green_residual") = r.green_residual,
                        py::arg("boundary_term_imposed") = r.boundary_term_imposed);
      },
      py::arg("domain"), py::arg("q1"), py::arg("q2"), py::arg("lambda_"), py::arg("f"), py::arg("g"));

  m.def(
      "distinguishability_test",
      [](const DomainPtr& d, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2, const std::vector<double>& lambdas,
         std::size_t j_max, double eps_gap) {
        const DiscrepancyReport r =
            distinguishability_test(d, as_potential(d, q1), as_potential(d, q2), lambdas, j_max, eps_gap);
        return py::dict(py::arg("nd_discrepancy") = r.nd_discrepancy,
                        py::arg("eigenvalue_discrepancy") = r.eigenvalue_discrepancy,
                        py::arg("trace_discrepancy") = r.trace_discrepancy,
                        py::arg("spectral_discrepancy") = r.spectral_discrepancy,
                        py::arg("max_discrepancy") = r.max_discrepancy);
      },
      py::arg("domain"), py::arg("q1"), py::arg("q2"), py::arg("lambdas"), py::arg("j_max"), py::arg("eps_gap") = 1e-6);

  m.def("preset_names", &preset_names);
  m.def(
      "preset_json", [](const std::string& name) { return config_to_json(preset(name)).dump(2); }, py::arg("name"));
  m.def(
      "run_pipeline",
      [](const std::string& config, const std::filesystem::path& out, std::optional<std::uint64_t> seed) {
        PipelineConfig c = config_from(config);
        if (seed) c.seed = *seed;
        py::gil_scoped_release release;
        run_pipeline(c, out);
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none(),
      "Run every enabled stage for a preset name or a JSON configuration string.");
}
