#include <doctest.h>

#include "oracles.hpp"
#include "specinv/error.hpp"
#include "specinv/forward_solver.hpp"
#include "specinv/spectral.hpp"

#include <cmath>
#include <memory>

using namespace specinv;

namespace {

std::shared_ptr<const Domain> make(const DomainSpec& s) { return std::make_shared<const Domain>(build_domain(s)); }

Potential zero(const Domain& d) { return Potential{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.grid.size()))}; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ConfigInvalid;
}

}  // namespace

TEST_CASE("theta is a left-continuous staircase") {
  auto d = make(DomainSpec::interval(oracle::kPi, 101));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 0);
  Eigen::VectorXd grid(3);
  grid << -1.0, eig.eigenvalues(1), eig.eigenvalues(1) + 1e-9;
  const SpectralSamples s = synthesize_theta(eig, grid);
  CHECK(s.theta.row(0).norm() == 0.0);
  CHECK(s.theta(1, 0) == doctest::Approx(eig.traces(0, 0) * eig.traces(0, 0)));
  CHECK(s.theta(2, 0) == doctest::Approx(eig.traces(0, 0) * eig.traces(0, 0) + eig.traces(0, 1) * eig.traces(0, 1)));

  const ThetaSynthesizer exact(eig);
  CHECK(exact.count_below(eig.eigenvalues(1)) == 1);
  CHECK((exact.theta(grid(2)) - s.theta.row(2).transpose()).norm() == 0.0);
}

TEST_CASE("truncated eigensystems cannot cover a long grid") {
  auto d = make(DomainSpec::interval(oracle::kPi, 101));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 3);
  CHECK(code_of([&] { synthesize_theta(eig, make_lambda_grid(0.0, 10.0, 0.05)); }) == ErrorCode::TruncationInsufficient);
  CHECK_NOTHROW(synthesize_theta(eig, make_lambda_grid(0.0, 3.5, 0.05)));
}

TEST_CASE("lambda grid includes its endpoint") {
  const Eigen::VectorXd g = make_lambda_grid(-0.5, 10.5, 0.05);
  CHECK(g.size() == 221);
  CHECK(g(g.size() - 1) == doctest::Approx(10.5));
}

TEST_CASE("extraction round trip on the interval") {
  auto d = make(DomainSpec::interval(oracle::kPi, 201));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 0);
  const SpectralSamples s = synthesize_theta(eig, make_lambda_grid(-0.5, 10.5, 0.05));
  ExtractionOptions opt;
  opt.eps_gap = 0.2;

  const ExtractedData coarse = extract_eigendata(s, opt);
  REQUIRE(coarse.count() == 4);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(coarse.eigenvalues(j) - eig.eigenvalues(j)) <= 0.025);

  const ThetaSynthesizer exact(eig);
  const ExtractedData fine = extract_eigendata(s, opt, &exact);
  REQUIRE(fine.count() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(fine.eigenvalues(j) - eig.eigenvalues(j)) <= 1e-6);
    for (int p = 0; p < 2; ++p) CHECK(std::abs(fine.squared_traces(j, p) - eig.traces(p, j) * eig.traces(p, j)) <= 1e-10);
  }
  CHECK(fine.warnings.empty());
}

TEST_CASE("extraction preconditions") {
  auto d = make(DomainSpec::interval(oracle::kPi, 101));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 0);
  const SpectralSamples s = synthesize_theta(eig, make_lambda_grid(-0.5, 5.5, 0.05));
  ExtractionOptions opt;
  opt.eps_gap = 0.1;
  CHECK(code_of([&] { extract_eigendata(s, opt); }) == ErrorCode::UnresolvedGrid);
  opt.eps_gap = 1.5;
  // 0 and 1 are closer than eps_gap.
  CHECK(code_of([&] { extract_eigendata(s, opt); }) == ErrorCode::DegenerateSpectrum);
}

TEST_CASE("square domain spectrum is flagged as degenerate") {
  auto d = make(DomainSpec::rectangle(oracle::kPi, oracle::kPi, 21, 21));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 0);
  const SpectralSamples s = synthesize_theta(eig, make_lambda_grid(-0.5, 10.5, 0.05));
  ExtractionOptions opt;
  opt.eps_gap = 0.2;
  const ThetaSynthesizer exact(eig);
  CHECK(code_of([&] { extract_eigendata(s, opt, &exact); }) == ErrorCode::DegenerateSpectrum);
}

TEST_CASE("resolvent kernel") {
  auto d = make(DomainSpec::rectangle(oracle::kPi, 9, 11));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 0);
  const Eigen::MatrixXd g = resolvent_kernel(eig, -1.0, eig.count());
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(resolvent_kernel(eig, -1.0, 0).norm() == 0.0);
  CHECK(code_of([&] { resolvent_kernel(eig, eig.eigenvalues(2), eig.count()); }) == ErrorCode::NearEigenvalue);
  // Excluded eigenvalues do not trigger the guard.
  CHECK_NOTHROW(resolvent_kernel(eig, eig.eigenvalues(2), 2));
}

TEST_CASE("spectral N-D map equals direct solves") {
  for (const DomainSpec& spec : {DomainSpec::interval(oracle::kPi, 201), DomainSpec::rectangle(oracle::kPi, 15, 17)}) {
    auto d = make(spec);
    const Potential q = sample_potential(d->grid, [](double x, double y) { return 0.5 + 0.3 * std::cos(x) * std::cos(y); });
    const DiscreteOperator op = assemble_operator(d, q);
    const EigenSystem eig = eigensolve(op, 0);
    for (double lambda : {-1.0, 0.3}) {
      const NDOperator a = nd_map(eig, lambda, eig.count(), d->boundary);
      const NDOperator b = nd_map_direct(op, lambda);
      CHECK((a.map - b.map).norm() <= 1e-8 * b.map.norm());
      const Eigen::MatrixXd sym = b.weight_normalized();
      CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * sym.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("interval N-D map against the hyperbolic closed form") {
  auto d = make(DomainSpec::interval(oracle::kPi, 201));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 0);
  const NDOperator nd = nd_map(eig, -1.0, eig.count(), d->boundary);
  CHECK((nd.map - oracle::interval_nd_closed_form(oracle::kPi)).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("constant shift of q shifts the spectral parameter") {
  auto d = make(DomainSpec::rectangle(oracle::kPi, 11, 11));
  const Potential q = sample_potential(d->grid, [](double x, double) { return std::sin(x); });
  Potential shifted = q;
  shifted.values.array() += 0.7;
  const NDOperator a = nd_map_direct(assemble_operator(d, q), -1.7);
  const NDOperator b = nd_map_direct(assemble_operator(d, shifted), -1.0);
  CHECK((a.map - b.map).norm() <= 1e-12 * a.map.norm());

  const EigenSystem ea = eigensolve(assemble_operator(d, q), 10);
  const EigenSystem eb = eigensolve(assemble_operator(d, shifted), 10);
  CHECK(((eb.eigenvalues - ea.eigenvalues).array() - 0.7).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("truncating the kernel loses accuracy monotonically in the tail") {
  auto d = make(DomainSpec::rectangle(oracle::kPi, 13, 13));
  const EigenSystem eig = eigensolve(assemble_operator(d, zero(*d)), 0);
  const NDOperator full = nd_map(eig, -1.0, eig.count(), d->boundary);
  const double e10 = (nd_map(eig, -1.0, 10, d->boundary).map - full.map).norm();
  const double e40 = (nd_map(eig, -1.0, 40, d->boundary).map - full.map).norm();
  CHECK(e40 < e10);
}
