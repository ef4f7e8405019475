#include "specinv/forward_solver.hpp"

#include "lapack.hpp"
#include "specinv/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace specinv {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Mass-weighted 1D ghost-node Neumann stiffness: rows [1,-1], [-1,2,-1], [-1,1] over h.
Eigen::SparseMatrix<double> neumann_stiffness_1d(int n, double h) {
  Triplets t;
  for (int i = 0; i < n; ++i) {
    const double diag = (i == 0 || i == n - 1) ? 1.0 : 2.0;
    t.emplace_back(i, i, diag / h);
    if (i > 0) t.emplace_back(i, i - 1, -1.0 / h);
    if (i < n - 1) t.emplace_back(i, i + 1, -1.0 / h);
  }
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

Eigen::SparseMatrix<double> kron(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& b) {
  Triplets t;
  for (int ca = 0; ca < a.outerSize(); ++ca)
    for (Eigen::SparseMatrix<double>::InnerIterator ia(a, ca); ia; ++ia)
      for (int cb = 0; cb < b.outerSize(); ++cb)
        for (Eigen::SparseMatrix<double>::InnerIterator ib(b, cb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
  Eigen::SparseMatrix<double> out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

Eigen::SparseMatrix<double> diagonal(const Eigen::VectorXd& d) {
  Eigen::SparseMatrix<double> m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Ones(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) m.insert(i, i) = d(i);
  m.makeCompressed();
  return m;
}

}  // namespace

Eigen::VectorXd DiscreteOperator::neumann_load(const Eigen::VectorXd& f) const {
  const BoundaryMesh& mesh = boundary();
  if (static_cast<std::size_t>(f.size()) != mesh.size())
    throw Error(ErrorCode::ShapeMismatch, "Neumann data has " + std::to_string(f.size()) + " values, boundary has " +
                                              std::to_string(mesh.size()));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof()));
  for (std::size_t p = 0; p < mesh.size(); ++p)
    b(static_cast<Eigen::Index>(mesh.nodes[p])) += mesh.weights[p] * f(static_cast<Eigen::Index>(p));
  return b;
}

Eigen::VectorXd DiscreteOperator::restrict_to_boundary(const Eigen::VectorXd& u) const {
  const BoundaryMesh& mesh = boundary();
  Eigen::VectorXd h(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t p = 0; p < mesh.size(); ++p)
    h(static_cast<Eigen::Index>(p)) = u(static_cast<Eigen::Index>(mesh.nodes[p]));
  return h;
}

DiscreteOperator assemble_operator(std::shared_ptr<const Domain> domain, const Potential& q) {
  const Grid& grid = domain->grid;
  check_shape(grid, q);

  DiscreteOperator op;
  op.mass_weights = grid.mass_weights();
  const auto ka = neumann_stiffness_1d(grid.n_a(), grid.h_a());
  if (grid.is_rectangle()) {
    // x varies fastest, so the flat operator is M_b (x) K_a + K_b (x) M_a.
    const auto kb = neumann_stiffness_1d(grid.n_b(), grid.h_b());
    op.stiffness = kron(diagonal(grid.axis_weights_b()), ka) + kron(kb, diagonal(grid.axis_weights_a()));
  } else {
    op.stiffness = ka;
  }
  op.stiffness += diagonal(op.mass_weights.cwiseProduct(q.values));
  op.stiffness.makeCompressed();
  op.potential = q;
  op.domain = std::move(domain);
  return op;
}

EigenSystem eigensolve(const DiscreteOperator& op, std::size_t j_max) {
  const std::size_t n = op.dof();
  if (j_max == 0) j_max = n;
  if (j_max > n)
    throw Error(ErrorCode::PreconditionViolated,
                "j_max " + std::to_string(j_max) + " exceeds DOF count " + std::to_string(n));

  // Symmetric form M^{-1/2} K M^{-1/2}; eigenvectors map back by M^{-1/2}.
  const Eigen::VectorXd inv_sqrt_m = op.mass_weights.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd s = inv_sqrt_m.asDiagonal() * Eigen::MatrixXd(op.stiffness) * inv_sqrt_m.asDiagonal();
  auto eig = lapack::lowest_eigenpairs(std::move(s), static_cast<int>(j_max));

  EigenSystem out;
  out.dof = n;
  out.eigenvalues = std::move(eig.values);
  out.vectors = inv_sqrt_m.asDiagonal() * eig.vectors;
  const BoundaryMesh& mesh = op.boundary();
  out.traces.resize(static_cast<Eigen::Index>(mesh.size()), static_cast<Eigen::Index>(j_max));
  for (std::size_t p = 0; p < mesh.size(); ++p)
    out.traces.row(static_cast<Eigen::Index>(p)) = out.vectors.row(static_cast<Eigen::Index>(mesh.nodes[p]));
  return out;
}

struct ShiftedSolver::Impl {
  lapack::LuFactor lu;
};

ShiftedSolver::ShiftedSolver(const DiscreteOperator& op, double lambda, double rcond_min)
    : op_(&op), lambda_(lambda) {
  Eigen::MatrixXd a = Eigen::MatrixXd(op.stiffness);
  a.diagonal() -= lambda * op.mass_weights;
  impl_ = std::make_unique<Impl>(Impl{lapack::LuFactor(std::move(a))});
  if (impl_->lu.singular() || impl_->lu.rcond() < rcond_min)
    throw Error(ErrorCode::NearSingular, "K - lambda M is near singular at lambda = " + std::to_string(lambda) +
                                             " (rcond " + std::to_string(impl_->lu.rcond()) + ")");
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;
ShiftedSolver& ShiftedSolver::operator=(ShiftedSolver&&) noexcept = default;

double ShiftedSolver::rcond() const noexcept { return impl_->lu.rcond(); }

Eigen::VectorXd ShiftedSolver::solve_load(const Eigen::VectorXd& b) const {
  if (static_cast<std::size_t>(b.size()) != op_->dof()) throw Error(ErrorCode::ShapeMismatch, "load vector size");
  return impl_->lu.solve(b);
}

BvpSolution ShiftedSolver::solve(const Eigen::VectorXd& f) const {
  BvpSolution sol;
  sol.interior = solve_load(op_->neumann_load(f));
  sol.trace = op_->restrict_to_boundary(sol.interior);
  return sol;
}

Eigen::MatrixXd ShiftedSolver::nd_matrix() const {
  const BoundaryMesh& mesh = op_->boundary();
  const auto nb = static_cast<Eigen::Index>(mesh.size());
  Eigen::MatrixXd loads = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(op_->dof()), nb);
  for (Eigen::Index p = 0; p < nb; ++p)
    loads(static_cast<Eigen::Index>(mesh.nodes[static_cast<std::size_t>(p)]), p) += mesh.weights[static_cast<std::size_t>(p)];
  const Eigen::MatrixXd u = impl_->lu.solve(loads);
  Eigen::MatrixXd nd(nb, nb);
  for (Eigen::Index p = 0; p < nb; ++p) nd.row(p) = u.row(static_cast<Eigen::Index>(mesh.nodes[static_cast<std::size_t>(p)]));
  return nd;
}

BvpSolution solve_neumann_bvp(const DiscreteOperator& op, double lambda, const Eigen::VectorXd& f) {
  return ShiftedSolver(op, lambda).solve(f);
}

Eigen::VectorXd normal_derivative(const Domain& domain, const Eigen::VectorXd& u) {
  const Grid& g = domain.grid;
  const BoundaryMesh& mesh = domain.boundary;
  if (static_cast<std::size_t>(u.size()) != g.size()) throw Error(ErrorCode::ShapeMismatch, "nodal vector size");
  auto at = [&](int i, int k) { return u(static_cast<Eigen::Index>(g.index(i, k))); };
  // Outward derivative at index `edge` (0 or n-1) along one axis; `get(j)` reads the line.
  auto one_sided = [](auto get, int edge, int n, double h) {
    if (edge == 0) return (3.0 * get(0) - 4.0 * get(1) + get(2)) / (2.0 * h);
    return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * h);
  };

  Eigen::VectorXd dn(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t p = 0; p < mesh.size(); ++p) {
    const std::size_t node = mesh.nodes[p];
    const int i = static_cast<int>(node % static_cast<std::size_t>(g.n_a()));
    const int k = static_cast<int>(node / static_cast<std::size_t>(g.n_a()));
    double sum = 0.0;
    int count = 0;
    if (i == 0 || i == g.n_a() - 1) {
      sum += one_sided([&](int j) { return at(j, k); }, i, g.n_a(), g.h_a());
      ++count;
    }
    if (g.is_rectangle() && (k == 0 || k == g.n_b() - 1)) {
      sum += one_sided([&](int j) { return at(i, j); }, k, g.n_b(), g.h_b());
      ++count;
    }
    dn(static_cast<Eigen::Index>(p)) = sum / count;
  }
  return dn;
}

}  // namespace specinv
