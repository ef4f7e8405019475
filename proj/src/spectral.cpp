#include "specinv/spectral.hpp"

#include "specinv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace specinv {

ThetaSynthesizer::ThetaSynthesizer(const EigenSystem& eig)
    : eigenvalues_(eig.eigenvalues), squared_(eig.traces.cwiseAbs2()) {}

Eigen::VectorXd ThetaSynthesizer::theta(double lambda) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(squared_.rows());
  for (Eigen::Index j = 0; j < eigenvalues_.size() && eigenvalues_(j) < lambda; ++j) out += squared_.col(j);
  return out;
}

std::size_t ThetaSynthesizer::count_below(double lambda) const {
  std::size_t n = 0;
  for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j)
    if (eigenvalues_(j) < lambda) ++n;
  return n;
}

Eigen::VectorXd make_lambda_grid(double min, double max, double step) {
  if (!(step > 0.0) || !(max > min)) throw Error(ErrorCode::PreconditionViolated, "lambda grid needs min < max, step > 0");
  const auto n = static_cast<Eigen::Index>(std::floor((max - min) / step + 0.5)) + 1;
  Eigen::VectorXd grid(n);
  for (Eigen::Index k = 0; k < n; ++k) grid(k) = min + step * static_cast<double>(k);
  return grid;
}

SpectralSamples synthesize_theta(const EigenSystem& eig, const Eigen::VectorXd& lambda_grid) {
  if (lambda_grid.size() == 0) throw Error(ErrorCode::PreconditionViolated, "empty lambda grid");
  for (Eigen::Index k = 1; k < lambda_grid.size(); ++k)
    if (!(lambda_grid(k) > lambda_grid(k - 1))) throw Error(ErrorCode::PreconditionViolated, "lambda grid not ascending");
  const double top = lambda_grid(lambda_grid.size() - 1);
  if (!eig.complete() && !(eig.count() > 0 && eig.eigenvalues(eig.eigenvalues.size() - 1) > top)) {
    std::ostringstream msg;
    msg << "eigensystem truncated at " << eig.count() << " pairs does not extend past lambda = " << top;
    throw Error(ErrorCode::TruncationInsufficient, msg.str());
  }

  SpectralSamples out;
  out.lambda_grid = lambda_grid;
  out.theta.resize(lambda_grid.size(), eig.traces.rows());
  Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(eig.traces.rows());
  Eigen::Index j = 0;
  for (Eigen::Index k = 0; k < lambda_grid.size(); ++k) {
    while (j < eig.eigenvalues.size() && eig.eigenvalues(j) < lambda_grid(k)) {
      running += eig.traces.col(j).cwiseAbs2().transpose();
      ++j;
    }
    out.theta.row(k) = running;
  }
  return out;
}

ExtractedData extract_eigendata(const SpectralSamples& samples, const ExtractionOptions& options,
                                const ThetaSource* refine) {
  const Eigen::VectorXd& grid = samples.lambda_grid;
  const Eigen::MatrixXd& theta = samples.theta;
  if (grid.size() < 2 || theta.rows() != grid.size() || theta.cols() == 0)
    throw Error(ErrorCode::ShapeMismatch, "spectral samples do not match the lambda grid");
  if (!(options.eps_gap > 0.0)) throw Error(ErrorCode::PreconditionViolated, "eps_gap must be positive");
  for (Eigen::Index k = 1; k < grid.size(); ++k) {
    const double step = grid(k) - grid(k - 1);
    if (!(step > 0.0)) throw Error(ErrorCode::PreconditionViolated, "lambda grid not ascending");
    if (!(step < 0.5 * options.eps_gap)) {
      std::ostringstream msg;
      msg << "grid step " << step << " at lambda = " << grid(k - 1) << " is not below eps_gap/2 = "
          << 0.5 * options.eps_gap;
      throw Error(ErrorCode::UnresolvedGrid, msg.str());
    }
  }

  double tol = options.jump_tol;
  if (!(tol > 0.0)) tol = std::max(1e-12 * theta.maxCoeff(), std::numeric_limits<double>::min());

  std::vector<double> lambdas;
  std::vector<Eigen::RowVectorXd> amplitudes;
  for (Eigen::Index k = 0; k + 1 < grid.size(); ++k) {
    const Eigen::RowVectorXd delta = (theta.row(k + 1) - theta.row(k)).cwiseMax(0.0);
    Eigen::Index peak = 0;
    if (!(delta.maxCoeff(&peak) > tol)) continue;

    double lo = grid(k);
    double hi = grid(k + 1);
    if (refine != nullptr) {
      const std::size_t inside = refine->count_below(hi) - refine->count_below(lo);
      if (inside > 1) {
        std::ostringstream msg;
        msg << inside << " eigenvalues inside (" << lo << ", " << hi << "]; simple spectrum required";
        throw Error(ErrorCode::DegenerateSpectrum, msg.str());
      }
      const double base = refine->theta(lo)(peak);
      const double half = 0.5 * delta(peak);
      for (int it = 0; it < options.bisection_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (refine->theta(mid)(peak) - base > half)
          hi = mid;
        else
          lo = mid;
      }
    }
    const double estimate = 0.5 * (lo + hi);
    if (!lambdas.empty() && estimate - lambdas.back() < options.eps_gap) {
      std::ostringstream msg;
      msg << "eigenvalues " << lambdas.back() << " and " << estimate << " are closer than eps_gap = "
          << options.eps_gap;
      throw Error(ErrorCode::DegenerateSpectrum, msg.str());
    }
    lambdas.push_back(estimate);
    amplitudes.push_back(delta);
  }

  ExtractedData out;
  out.eigenvalues = Eigen::Map<const Eigen::VectorXd>(lambdas.data(), static_cast<Eigen::Index>(lambdas.size()));
  out.squared_traces.resize(static_cast<Eigen::Index>(amplitudes.size()), theta.cols());
  for (std::size_t j = 0; j < amplitudes.size(); ++j) out.squared_traces.row(static_cast<Eigen::Index>(j)) = amplitudes[j];

  if (refine != nullptr) {
    const std::size_t expected = refine->count_below(grid(grid.size() - 1)) - refine->count_below(grid(0));
    if (expected != lambdas.size()) {
      std::ostringstream msg;
      msg << "MissedJumpRisk: " << expected << " eigenvalues in grid range, " << lambdas.size()
          << " jumps visible on the sampled boundary";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

Eigen::MatrixXd resolvent_kernel(const EigenSystem& eig, double lambda, std::size_t j_cut, double eps_gap) {
  if (j_cut > eig.count())
    throw Error(ErrorCode::PreconditionViolated, "j_cut exceeds the number of available eigenpairs");
  const Eigen::Index nb = eig.traces.rows();
  if (j_cut == 0) return Eigen::MatrixXd::Zero(nb, nb);
  const auto cut = static_cast<Eigen::Index>(j_cut);
  Eigen::VectorXd inv_gap(cut);
  for (Eigen::Index j = 0; j < cut; ++j) {
    const double gap = eig.eigenvalues(j) - lambda;
    if (std::abs(gap) <= eps_gap) {
      std::ostringstream msg;
      msg << "lambda = " << lambda << " is within " << eps_gap << " of eigenvalue " << j + 1;
      throw Error(ErrorCode::NearEigenvalue, msg.str());
    }
    inv_gap(j) = 1.0 / gap;
  }
  const auto phi = eig.traces.leftCols(cut);
  Eigen::MatrixXd g = phi * inv_gap.asDiagonal() * phi.transpose();
  // Exact symmetry regardless of summation order.
  return 0.5 * (g + g.transpose());
}

Eigen::MatrixXd NDOperator::weight_normalized() const {
  const Eigen::VectorXd sw = weights.cwiseSqrt();
  return sw.asDiagonal() * map * sw.cwiseInverse().asDiagonal();
}

NDOperator nd_map(const EigenSystem& eig, double lambda, std::size_t j_cut, const BoundaryMesh& boundary,
                  double eps_gap) {
  if (static_cast<std::size_t>(eig.traces.rows()) != boundary.size())
    throw Error(ErrorCode::ShapeMismatch, "eigensystem traces do not match the boundary mesh");
  NDOperator nd;
  nd.lambda = lambda;
  nd.weights = Eigen::Map<const Eigen::VectorXd>(boundary.weights.data(), static_cast<Eigen::Index>(boundary.size()));
  nd.map = resolvent_kernel(eig, lambda, j_cut, eps_gap) * nd.weights.asDiagonal();
  return nd;
}

NDOperator nd_map_direct(const DiscreteOperator& op, double lambda) {
  NDOperator nd;
  nd.lambda = lambda;
  const BoundaryMesh& mesh = op.boundary();
  nd.weights = Eigen::Map<const Eigen::VectorXd>(mesh.weights.data(), static_cast<Eigen::Index>(mesh.size()));
  nd.map = ShiftedSolver(op, lambda).nd_matrix();
  return nd;
}

}  // namespace specinv
