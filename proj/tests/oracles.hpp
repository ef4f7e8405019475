#pragma once

// Reference computations written independently of the library code paths.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Eigenvalue k of the 1D ghost-node Neumann Laplacian with n nodes and spacing h.
// Eigenvectors are cos(k pi i / (n - 1)), so the value is exact for the scheme.
inline double fd_neumann_eigenvalue(int k, int n, double h) {
  const double s = std::sin(k * kPi / (2.0 * (n - 1)));
  return 4.0 * s * s / (h * h);
}

// Lowest `count` eigenvalues of the separable rectangle scheme, ascending.
inline std::vector<double> fd_rectangle_eigenvalues(int n_a, double h_a, int n_b, double h_b, std::size_t count) {
  std::vector<double> all;
  for (int i = 0; i < n_a; ++i)
    for (int k = 0; k < n_b; ++k) all.push_back(fd_neumann_eigenvalue(i, n_a, h_a) + fd_neumann_eigenvalue(k, n_b, h_b));
  std::sort(all.begin(), all.end());
  all.resize(std::min(count, all.size()));
  return all;
}

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i + 1
};

// Symmetrized 1D operator -u'' + q u on [0, L] with mirror Neumann ends:
// stiffness rows (1,-1), (-1,2,-1), (-1,1) over h, lumped mass h/2 at the ends.
inline Tridiagonal interval_operator(int n, double length, const std::vector<double>& q) {
  const double h = length / (n - 1);
  Tridiagonal t;
  t.diag.resize(n);
  t.off.resize(n - 1);
  auto mass = [&](int i) { return (i == 0 || i == n - 1) ? h / 2.0 : h; };
  for (int i = 0; i < n; ++i) {
    const double k = (i == 0 || i == n - 1) ? 1.0 / h : 2.0 / h;
    t.diag[i] = k / mass(i) + q[i];
  }
  for (int i = 0; i + 1 < n; ++i) t.off[i] = (-1.0 / h) / std::sqrt(mass(i) * mass(i + 1));
  return t;
}

// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
inline int sturm_count(const Tridiagonal& t, double x) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1];
    d = t.diag[i] - x - (i == 0 ? 0.0 : b2 / d);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

// Eigenvalue with index k (0-based) by bisection to absolute width tol.
inline double sturm_eigenvalue(const Tridiagonal& t, int k, double tol = 1e-13) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < t.diag.size() ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(t, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// N-D map of -u'' + u = 0 on [0, L] with outward normal data (f0, fL).
inline Eigen::Matrix2d interval_nd_closed_form(double length) {
  Eigen::Matrix2d m;
  m << std::cosh(length), 1.0, 1.0, std::cosh(length);
  return m / std::sinh(length);
}

// f(t) = sum_{k=1..K} a_k cos kt + b_k sin kt with a_k, b_k uniform in [-1, 1),
// sampled at n equispaced points of [0, 2 pi).
struct BandLimited {
  std::vector<double> a, b;

  double operator()(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      s += a[k] * std::cos((k + 1) * t) + b[k] * std::sin((k + 1) * t);
    return s;
  }
};

inline BandLimited band_limited(std::uint64_t seed, int terms = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandLimited f;
  for (int k = 0; k < terms; ++k) {
    f.a.push_back(u(rng));
    f.b.push_back(u(rng));
  }
  return f;
}

inline Eigen::VectorXd sample_periodic(const BandLimited& f, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = f(2.0 * kPi * i / n);
  return v;
}

inline double sup_up_to_sign(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

}  // namespace oracle
