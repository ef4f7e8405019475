#include "specinv/inverse.hpp"

#include "specinv/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specinv {

namespace {

void check_simple(const Eigen::VectorXd& values, std::size_t count, double eps_gap, const char* who) {
  const auto n = std::min<Eigen::Index>(values.size(), static_cast<Eigen::Index>(count));
  for (Eigen::Index j = 1; j < n; ++j) {
    if (values(j) - values(j - 1) < eps_gap) {
      std::ostringstream msg;
      msg << who << ": eigenvalues " << j << " and " << j + 1 << " (" << values(j - 1) << ", " << values(j)
          << ") are not separated by " << eps_gap;
      throw Error(ErrorCode::DegenerateSpectrum, msg.str());
    }
  }
}

double sign_agnostic_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

}  // namespace

ProbeReport orthogonality_probe(std::shared_ptr<const Domain> domain, const Potential& q1, const Potential& q2,
                                double lambda, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const DiscreteOperator op1 = assemble_operator(domain, q1);
  const DiscreteOperator op2 = assemble_operator(domain, q2);
  const ShiftedSolver s1(op1, lambda);
  const ShiftedSolver s2(op2, lambda);
  const BvpSolution u1 = s1.solve(f);
  const BvpSolution u2 = s2.solve(f);
  const BvpSolution v1 = s1.solve(g);

  const Eigen::VectorXd p = q2.values - q1.values;
  const Eigen::VectorXd w_trace = u1.trace - u2.trace;
  const Eigen::VectorXd dn_v1 = normal_derivative(*domain, v1.interior);

  ProbeReport report;
  report.orthogonality_value = domain_integral(domain->grid, p.cwiseProduct(u2.interior).cwiseProduct(v1.interior));
  report.boundary_term = boundary_integral(domain->boundary, w_trace.cwiseProduct(dn_v1));
  report.boundary_term_imposed = boundary_integral(domain->boundary, w_trace.cwiseProduct(g));
  report.green_residual = std::abs(report.orthogonality_value - report.boundary_term);
  return report;
}

DiscrepancyReport distinguishability_test(std::shared_ptr<const Domain> domain, const Potential& q1,
                                          const Potential& q2, const std::vector<double>& lambdas, std::size_t j_max,
                                          double eps_gap) {
  const DiscreteOperator op1 = assemble_operator(domain, q1);
  const DiscreteOperator op2 = assemble_operator(domain, q2);

  DiscrepancyReport report;
  for (double lambda : lambdas) {
    const NDOperator a = nd_map_direct(op1, lambda);
    const NDOperator b = nd_map_direct(op2, lambda);
    report.nd_discrepancy = std::max(report.nd_discrepancy, (a.map - b.map).norm());
  }

  if (j_max > 0) {
    const std::size_t solve_count = std::min(j_max + 1, op1.dof());
    const EigenSystem e1 = eigensolve(op1, solve_count);
    const EigenSystem e2 = eigensolve(op2, solve_count);
    check_simple(e1.eigenvalues, solve_count, eps_gap, "q1");
    check_simple(e2.eigenvalues, solve_count, eps_gap, "q2");
    for (std::size_t j = 0; j < std::min(j_max, solve_count); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double dl = std::abs(e1.eigenvalues(jj) - e2.eigenvalues(jj));
      const double dt = sign_agnostic_distance(e1.traces.col(jj), e2.traces.col(jj));
      report.eigenvalue_discrepancy = std::max(report.eigenvalue_discrepancy, dl);
      report.trace_discrepancy = std::max(report.trace_discrepancy, dt);
      report.spectral_discrepancy = std::max(report.spectral_discrepancy, dl + dt);
    }
  }
  report.max_discrepancy = std::max(report.nd_discrepancy, report.spectral_discrepancy);
  return report;
}

Potential ParameterBasis::evaluate(const Eigen::VectorXd& coefficients) const {
  if (static_cast<std::size_t>(coefficients.size()) != functions.size())
    throw Error(ErrorCode::ShapeMismatch, "coefficient count does not match the basis");
  if (functions.empty()) throw Error(ErrorCode::PreconditionViolated, "empty parameter basis");
  Potential q;
  q.values = Eigen::VectorXd::Zero(functions.front().values.size());
  for (std::size_t k = 0; k < functions.size(); ++k)
    q.values += coefficients(static_cast<Eigen::Index>(k)) * functions[k].values;
  return q;
}

ReconstructionProblem::ReconstructionProblem(std::shared_ptr<const Domain> domain, ParameterBasis basis,
                                             ReconstructionData data, ReconstructionOptions options)
    : domain_(std::move(domain)), basis_(std::move(basis)), data_(std::move(data)), options_(options) {
  if (basis_.size() == 0) throw Error(ErrorCode::PreconditionViolated, "empty parameter basis");
  for (const Potential& fn : basis_.functions) check_shape(domain_->grid, fn);
  if (!data_.spectral && data_.nd_maps.empty())
    throw Error(ErrorCode::PreconditionViolated, "reconstruction needs spectral data or N-D maps");
  if (data_.spectral) {
    const ExtractedData& s = *data_.spectral;
    if (static_cast<std::size_t>(s.squared_traces.cols()) != domain_->boundary.size() ||
        static_cast<std::size_t>(s.squared_traces.rows()) != s.count())
      throw Error(ErrorCode::ShapeMismatch, "extracted data does not match the boundary");
    if (data_.eigenvalue_weights.size() == 0)
      data_.eigenvalue_weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.count()));
    if (static_cast<std::size_t>(data_.eigenvalue_weights.size()) != s.count())
      throw Error(ErrorCode::ShapeMismatch, "eigenvalue weight count");
    if (options_.use_signed_traces) {
      if (!data_.signed_traces) throw Error(ErrorCode::PreconditionViolated, "signed variant needs signed traces");
      if (data_.signed_traces->rows() != s.squared_traces.rows() || data_.signed_traces->cols() != s.squared_traces.cols())
        throw Error(ErrorCode::ShapeMismatch, "signed traces do not match the extracted data");
    }
  }
}

Eigen::VectorXd ReconstructionProblem::data_residual(const Eigen::VectorXd& c) const {
  const DiscreteOperator op = assemble_operator(domain_, basis_.evaluate(c));
  std::vector<double> r;

  if (data_.spectral) {
    const ExtractedData& s = *data_.spectral;
    const std::size_t count = s.count();
    const std::size_t solve_count = std::min(count + 1, op.dof());
    const EigenSystem eig = eigensolve(op, solve_count);
    check_simple(eig.eigenvalues, solve_count, options_.eps_gap, "trial potential");
    for (std::size_t j = 0; j < count; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      r.push_back(std::sqrt(data_.eigenvalue_weights(jj)) * (eig.eigenvalues(jj) - s.eigenvalues(jj)));
    }
    for (std::size_t j = 0; j < count; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const Eigen::VectorXd trial = eig.traces.col(jj);
      if (options_.use_signed_traces) {
        const Eigen::VectorXd target = data_.signed_traces->row(jj).transpose();
        const double sign = trial.dot(target) < 0.0 ? -1.0 : 1.0;
        for (Eigen::Index i = 0; i < trial.size(); ++i) r.push_back(sign * trial(i) - target(i));
      } else {
        for (Eigen::Index i = 0; i < trial.size(); ++i) r.push_back(trial(i) * trial(i) - s.squared_traces(jj, i));
      }
    }
  }
  for (const NDOperator& target : data_.nd_maps) {
    const NDOperator trial = nd_map_direct(op, target.lambda);
    const Eigen::MatrixXd diff = trial.map - target.map;
    r.insert(r.end(), diff.data(), diff.data() + diff.size());
  }
  return Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

Eigen::VectorXd ReconstructionProblem::residual(const Eigen::VectorXd& c) const {
  const Eigen::VectorXd d = data_residual(c);
  if (!(options_.reg_weight > 0.0)) return d;
  Eigen::VectorXd r(d.size() + c.size());
  r << d, std::sqrt(options_.reg_weight) * c;
  return r;
}

double ReconstructionProblem::objective(const Eigen::VectorXd& c) const { return residual(c).squaredNorm(); }

double ReconstructionProblem::data_misfit(const Eigen::VectorXd& c) const { return data_residual(c).squaredNorm(); }

Eigen::MatrixXd ReconstructionProblem::jacobian(const Eigen::VectorXd& c, const Eigen::VectorXd& r0) const {
  Eigen::MatrixXd jac(r0.size(), c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double step = options_.fd_step_rel * std::max(1.0, std::abs(c(k)));
    Eigen::VectorXd shifted = c;
    shifted(k) += step;
    jac.col(k) = (residual(shifted) - r0) / step;
  }
  return jac;
}

ReconstructionResult reconstruct_potential(const ReconstructionProblem& problem, const Eigen::VectorXd& initial) {
  const ReconstructionOptions& opt = problem.options();
  if (static_cast<std::size_t>(initial.size()) != problem.basis().size())
    throw Error(ErrorCode::ShapeMismatch, "initial coefficient count does not match the basis");

  ReconstructionResult result;
  result.reg_weight = opt.reg_weight;
  Eigen::VectorXd c = initial;
  Eigen::VectorXd r = problem.residual(c);
  double value = r.squaredNorm();
  result.misfit_history.push_back(value);

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const Eigen::MatrixXd jac = problem.jacobian(c, r);
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
    const double predicted = value - (r + jac * step).squaredNorm();
    // Stationary to the accuracy of the finite-difference Jacobian.
    if (predicted <= 1e-6 * value + 1e-28 || step.norm() <= 1e-9 * (1.0 + c.norm())) break;

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial_c, trial_r;
    double trial_value = value;
    for (int halving = 0; halving <= opt.max_halvings; ++halving, t *= 0.5) {
      trial_c = c + t * step;
      trial_r = problem.residual(trial_c);
      trial_value = trial_r.squaredNorm();
      if (trial_value < value) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "no decreasing step after " << opt.max_halvings << " halvings at iteration " << iter
          << " (objective " << value << ")";
      throw Error(ErrorCode::DivergedLineSearch, msg.str());
    }
    const double decrease = (value - trial_value) / value;
    c = trial_c;
    r = trial_r;
    value = trial_value;
    result.misfit_history.push_back(value);
    ++result.iterations;
    if (decrease < opt.rel_tol) break;
  }

  result.coefficients = c;
  result.q_estimate = problem.basis().evaluate(c);
  result.data_misfit = problem.data_misfit(c);
  return result;
}

}  // namespace specinv
