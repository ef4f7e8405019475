#include <doctest.h>

#include "oracles.hpp"
#include "specinv/error.hpp"
#include "specinv/forward_solver.hpp"
#include "specinv/inverse.hpp"
#include "specinv/spectral.hpp"

#include <cmath>
#include <memory>

using namespace specinv;

namespace {

std::shared_ptr<const Domain> interval(int n) {
  return std::make_shared<const Domain>(build_domain(DomainSpec::interval(oracle::kPi, n)));
}

Potential field(const Domain& d, double (*f)(double)) {
  return sample_potential(d.grid, [f](double x, double) { return f(x); });
}

double zero_fn(double) { return 0.0; }
double one_fn(double) { return 1.0; }
double sin_fn(double x) { return std::sin(x); }
double cos_fn(double x) { return 0.2 * std::cos(x); }

Potential scaled_sin(const Domain& d, double base_amplitude, double eps) {
  Potential p = field(d, sin_fn);
  p.values *= eps;
  p.values.array() += base_amplitude;
  return p;
}

}  // namespace

TEST_CASE("probe with identical potentials vanishes") {
  auto d = interval(201);
  const Potential q = field(*d, cos_fn);
  const ProbeReport r = orthogonality_probe(d, q, q, -1.0, Eigen::Vector2d(0.3, -0.8), Eigen::Vector2d(1.0, 0.4));
  CHECK(std::abs(r.orthogonality_value) <= 1e-10);
}

TEST_CASE("probe: imposed Green identity is exact, one-sided residual is second order") {
  const Eigen::Vector2d f(0.3, -0.8), g(1.0, 0.4);
  double previous = 0.0;
  for (int n : {101, 201, 401}) {
    auto d = interval(n);
    const Potential q1 = field(*d, zero_fn);
    Potential q2 = field(*d, sin_fn);
    q2.values *= 0.1;
    const ProbeReport r = orthogonality_probe(d, q1, q2, -1.0, f, g);
    CHECK(std::abs(r.orthogonality_value) > 1e-4);
    CHECK(std::abs(r.orthogonality_value - r.boundary_term_imposed) <= 1e-12);
    if (previous > 0.0) {
      const double ratio = previous / r.green_residual;
      CAPTURE(n);
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
    previous = r.green_residual;
  }
}

TEST_CASE("probe on the rectangle") {
  auto d = std::make_shared<const Domain>(build_domain(DomainSpec::rectangle(oracle::kPi, 15, 15)));
  const Potential q1 = sample_potential(d->grid, [](double x, double y) { return 0.5 + 0.0 * x * y; });
  const Potential q2 = sample_potential(d->grid, [](double x, double y) { return 0.5 + 0.2 * std::cos(x) * std::sin(y); });
  const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(d->boundary.size()), -1.0, 1.0);
  const Eigen::VectorXd g = f.array().square();
  const ProbeReport r = orthogonality_probe(d, q1, q2, -0.5, f, g);
  CHECK(std::abs(r.orthogonality_value - r.boundary_term_imposed) <= 1e-11 * std::max(1.0, std::abs(r.orthogonality_value)));
}

TEST_CASE("distinguishability witness") {
  auto d = interval(201);
  const std::vector<double> lambdas{-1.0, -0.5};
  const Potential q1 = field(*d, one_fn);
  const DiscrepancyReport same = distinguishability_test(d, q1, q1, lambdas, 6);
  CHECK(same.max_discrepancy <= 1e-10);

  const DiscrepancyReport big = distinguishability_test(d, q1, scaled_sin(*d, 1.0, 0.3), lambdas, 6);
  CHECK(big.max_discrepancy >= 1e-3);

  const double a = distinguishability_test(d, q1, scaled_sin(*d, 1.0, 0.02), lambdas, 6).max_discrepancy;
  const double b = distinguishability_test(d, q1, scaled_sin(*d, 1.0, 0.01), lambdas, 6).max_discrepancy;
  CHECK(a / b >= 1.7);
  CHECK(a / b <= 2.3);
}

TEST_CASE("distinguishability requires a simple spectrum") {
  auto d = std::make_shared<const Domain>(build_domain(DomainSpec::rectangle(oracle::kPi, oracle::kPi, 11, 11)));
  const Potential q{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d->grid.size()))};
  CHECK_THROWS_AS(distinguishability_test(d, q, q, {-1.0}, 5, 1e-6), Error);
}

TEST_CASE("two-parameter reconstruction from synthesized spectral data") {
  auto d = interval(101);
  ParameterBasis basis;
  basis.functions = {field(*d, one_fn), field(*d, sin_fn)};
  Eigen::Vector2d truth(0.8, 0.25);
  const Potential q = basis.evaluate(truth);

  const EigenSystem eig = eigensolve(assemble_operator(d, q), 0);
  const SpectralSamples s = synthesize_theta(eig, make_lambda_grid(-0.5, 20.5, 0.05));
  ExtractionOptions opt;
  opt.eps_gap = 0.2;
  const ThetaSynthesizer exact(eig);
  ReconstructionData data;
  data.spectral = extract_eigendata(s, opt, &exact);

  const ReconstructionProblem problem(d, basis, data, ReconstructionOptions{});
  CHECK(problem.data_misfit(truth) <= 1e-12);
  const ReconstructionResult r = reconstruct_potential(problem, Eigen::Vector2d::Zero());
  CHECK((r.coefficients - truth).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(r.misfit_history.front() > r.misfit_history.back());
  for (std::size_t k = 1; k < r.misfit_history.size(); ++k) CHECK(r.misfit_history[k] < r.misfit_history[k - 1]);

  SUBCASE("Tikhonov weight pulls towards zero") {
    ReconstructionOptions reg;
    reg.reg_weight = 1.0;
    const ReconstructionProblem damped(d, basis, data, reg);
    const ReconstructionResult rr = reconstruct_potential(damped, Eigen::Vector2d::Zero());
    CHECK(rr.coefficients.norm() < r.coefficients.norm());
    CHECK(rr.data_misfit > r.data_misfit);
  }

  SUBCASE("N-D maps alone also determine the coefficients") {
    ReconstructionData nd;
    nd.nd_maps = {nd_map_direct(assemble_operator(d, q), -1.0), nd_map_direct(assemble_operator(d, q), -2.0)};
    const ReconstructionProblem p(d, basis, nd, ReconstructionOptions{});
    const ReconstructionResult rn = reconstruct_potential(p, Eigen::Vector2d::Zero());
    CHECK((rn.coefficients - truth).cwiseAbs().maxCoeff() <= 1e-6);
  }

  CHECK_THROWS_AS(reconstruct_potential(problem, Eigen::Vector3d::Zero()), Error);
}

TEST_CASE("reconstruction needs data") {
  auto d = interval(31);
  ParameterBasis basis;
  basis.functions = {field(*d, one_fn)};
  CHECK_THROWS_AS(ReconstructionProblem(d, basis, ReconstructionData{}, ReconstructionOptions{}), Error);
}
