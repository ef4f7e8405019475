#pragma once

#include "specinv/core_model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace specinv {

struct SignRecoveryOptions {
  double tau_rel = 1e-8;        // zero threshold relative to max f^2
  int window = 5;               // nodes per side used by the local fits
  int m_max = 6;                // largest vanishing order considered
  double min_confidence = 2.0;  // best/second-best residual separation
};

/// A zero of the trace: refined arclength, vanishing order and fit confidence.
struct ZeroAnnotation {
  double location = 0.0;
  int order = 0;
  double confidence = 0.0;
};

struct DetectedZero {
  double location = 0.0;
  /// The zero lies after this node and no later than the next one (cyclic order).
  std::size_t after_node = 0;
  /// Whether the smoothest local reconstruction changes sign across the zero.
  bool sign_change = false;
  int window_left = 0;
  int window_right = 0;
};

/// Maximal cyclic node range [first, last] on which f^2 stays away from zero.
struct Component {
  std::size_t first = 0;
  std::size_t last = 0;
};

struct ZeroDetection {
  std::vector<DetectedZero> zeros;  // ascending by after_node
  std::vector<Component> components;
};

/// Zeros of f on a closed curve from samples of f^2.
///
/// Every local minimum of f^2 is tested by fitting a polynomial to sqrt(f^2)
/// both as is and with a sign flip across the minimum; the better fit decides
/// whether the function crosses zero there and gives the sub-grid location.
/// Throws ZeroFunction when f^2 vanishes identically.
ZeroDetection detect_zeros(const BoundaryMesh& mesh, const Eigen::VectorXd& squared,
                           const SignRecoveryOptions& options = {});

/// Vanishing order m at a zero from a log-log fit of f^2 against |s - location|
/// with slope fixed to 2m, m = 1..m_max. Throws OrderAmbiguous when slope
/// 2(m_max + 1) fits better still or when the best/second-best residual
/// ratio is below min_confidence.
ZeroAnnotation estimate_order(const BoundaryMesh& mesh, const Eigen::VectorXd& squared, double location,
                              int window_left, int window_right, int m_max, double min_confidence = 2.0);
ZeroAnnotation estimate_order(const BoundaryMesh& mesh, const Eigen::VectorXd& squared, double location, int window,
                              int m_max, double min_confidence = 2.0);

struct SignedTrace {
  Eigen::VectorXd values;
  std::vector<ZeroAnnotation> zeros;
  std::size_t seed_node = 0;
};

/// Recover f from f^2 on a closed curve: positive on the component holding
/// the maximum of f^2, multiplied by (-1)^m across each zero of order m.
/// Throws ParityInconsistent when the signs do not close around the curve.
SignedTrace lift_sign(const BoundaryMesh& mesh, const Eigen::VectorXd& squared, const SignRecoveryOptions& options = {});

/// Nonnegative root, used where the boundary has no continuation path.
Eigen::VectorXd positive_root(const Eigen::VectorXd& squared);

/// True iff g equals f or -f nodewise (1e-10 relative). Requires f^2 == g^2
/// to 1e-12 relative, else PreconditionViolated.
bool verify_square_uniqueness(const Eigen::VectorXd& f, const Eigen::VectorXd& g);

}  // namespace specinv
