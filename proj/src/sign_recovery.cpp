#include "specinv/sign_recovery.hpp"

#include "specinv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace specinv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Curve {
  const BoundaryMesh& mesh;
  std::size_t n;

  std::size_t wrap(long i) const {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
  }
  // Arclength of node (k + d) measured from node k, unwrapped across the seam.
  double offset(std::size_t k, long d) const {
    double t = mesh.arclength[wrap(static_cast<long>(k) + d)] - mesh.arclength[k];
    if (d > 0 && t <= 0.0) t += mesh.perimeter;
    if (d < 0 && t >= 0.0) t -= mesh.perimeter;
    return t;
  }
  double wrap_arclength(double s) const {
    s = std::fmod(s, mesh.perimeter);
    return s < 0.0 ? s + mesh.perimeter : s;
  }
  // Signed offset s - location folded into (-P/2, P/2].
  double signed_distance(double s, double location) const {
    double t = std::fmod(s - location, mesh.perimeter);
    if (t > 0.5 * mesh.perimeter) t -= mesh.perimeter;
    if (t <= -0.5 * mesh.perimeter) t += mesh.perimeter;
    return t;
  }
};

struct PolyFit {
  Eigen::VectorXd coeffs;  // in the scaled variable t / scale
  double scale = 1.0;
  double residual = kInf;

  double operator()(double t) const {
    const double u = t / scale;
    double v = 0.0;
    for (Eigen::Index i = coeffs.size(); i-- > 0;) v = v * u + coeffs(i);
    return v;
  }
};

PolyFit fit_polynomial(const Eigen::VectorXd& t, const Eigen::VectorXd& y, int degree) {
  PolyFit fit;
  fit.scale = std::max(t.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  Eigen::MatrixXd a(t.size(), degree + 1);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      a(i, d) = p;
      p *= t(i) / fit.scale;
    }
  }
  fit.coeffs = a.colPivHouseholderQr().solve(y);
  fit.residual = (a * fit.coeffs - y).norm() / std::sqrt(static_cast<double>(t.size()));
  return fit;
}

double bisect_root(const PolyFit& p, double lo, double hi) {
  double flo = p(lo);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = p(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_min(const PolyFit& p, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = p(c), fd = p(d);
  for (int it = 0; it < 100; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = p(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = p(d);
    }
  }
  return 0.5 * (a + b);
}

void check_squared(const BoundaryMesh& mesh, const Eigen::VectorXd& squared) {
  if (!mesh.closed) throw Error(ErrorCode::PreconditionViolated, "sign recovery needs a closed boundary curve");
  if (static_cast<std::size_t>(squared.size()) != mesh.size())
    throw Error(ErrorCode::ShapeMismatch, "squared trace does not match the boundary mesh");
  if (mesh.size() < 8) throw Error(ErrorCode::PreconditionViolated, "closed curve needs at least 8 nodes");
  if (!squared.allFinite()) throw Error(ErrorCode::NonFiniteValue, "squared trace is not finite");
  const double top = squared.maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorCode::ZeroFunction, "squared trace vanishes identically");
  if (squared.minCoeff() < -1e-12 * top) throw Error(ErrorCode::PreconditionViolated, "squared trace is negative");
}

struct LocalTest {
  DetectedZero zero;
  bool is_zero = false;
};

// Classify the local minimum of f^2 at node k using `left`/`right` nodes on each side.
LocalTest test_minimum(const Curve& c, const Eigen::VectorXd& root, double max_sq, std::size_t k, int left, int right,
                       double tau_rel) {
  const int count = left + right + 1;
  if (left < 2 || right < 2 || count < 7) {
    std::ostringstream msg;
    msg << "local minimum at arclength " << c.mesh.arclength[k] << " has only " << left << "/" << right
        << " nodes of clearance";
    throw Error(ErrorCode::OrderAmbiguous, msg.str());
  }
  const int degree = std::min(5, count - 2);
  Eigen::VectorXd t(count), even(count), odd_after(count), odd_before(count);
  for (int d = -left; d <= right; ++d) {
    const auto i = static_cast<Eigen::Index>(d + left);
    t(i) = c.offset(k, d);
    even(i) = root(static_cast<Eigen::Index>(c.wrap(static_cast<long>(k) + d)));
    odd_after(i) = d <= 0 ? even(i) : -even(i);
    odd_before(i) = d < 0 ? even(i) : -even(i);
  }
  const PolyFit fe = fit_polynomial(t, even, degree);
  const PolyFit fa = fit_polynomial(t, odd_after, degree);
  const PolyFit fb = fit_polynomial(t, odd_before, degree);

  LocalTest out;
  out.zero.window_left = left;
  out.zero.window_right = right;
  const double t_prev = t(left - 1), t_next = t(left + 1);
  double loc = 0.0;
  if (std::min(fa.residual, fb.residual) < fe.residual) {
    const bool after = fa.residual <= fb.residual;
    const PolyFit& p = after ? fa : fb;
    const double lo = after ? 0.0 : t_prev;
    const double hi = after ? t_next : 0.0;
    if (p(lo) * p(hi) <= 0.0) {
      loc = bisect_root(p, lo, hi);
    } else {
      const double rl = even(after ? left : left - 1), rh = even(after ? left + 1 : left);
      loc = lo + (hi - lo) * rl / (rl + rh);
    }
    out.zero.after_node = after ? k : c.wrap(static_cast<long>(k) - 1);
    out.zero.sign_change = true;
    out.is_zero = true;
  } else {
    loc = golden_min(fe, t_prev, t_next);
    const double v = fe(loc);
    out.is_zero = root(static_cast<Eigen::Index>(k)) * root(static_cast<Eigen::Index>(k)) < tau_rel * max_sq ||
                  v * v < tau_rel * max_sq;
    out.zero.after_node = loc < 0.0 ? c.wrap(static_cast<long>(k) - 1) : k;
    out.zero.sign_change = false;
  }
  out.zero.location = c.wrap_arclength(c.mesh.arclength[k] + loc);
  return out;
}

std::vector<std::size_t> local_minima(const Curve& c, const Eigen::VectorXd& sq, double max_sq) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.n; ++i) {
    const double v = sq(static_cast<Eigen::Index>(i));
    const double prev = sq(static_cast<Eigen::Index>(c.wrap(static_cast<long>(i) - 1)));
    const double next = sq(static_cast<Eigen::Index>(c.wrap(static_cast<long>(i) + 1)));
    if (v <= prev && v < next && v < 0.25 * max_sq) out.push_back(i);
  }
  return out;
}

// Clearance (in nodes, each side) around every entry of a cyclic sorted node list.
std::vector<std::pair<int, int>> clearances(const Curve& c, const std::vector<std::size_t>& nodes, int window) {
  std::vector<std::pair<int, int>> out;
  const long n = static_cast<long>(c.n);
  const int half = static_cast<int>((c.n - 1) / 2);
  for (std::size_t z = 0; z < nodes.size(); ++z) {
    int left = std::min(window, half), right = std::min(window, half);
    if (nodes.size() > 1) {
      const long prev = static_cast<long>(nodes[(z + nodes.size() - 1) % nodes.size()]);
      const long next = static_cast<long>(nodes[(z + 1) % nodes.size()]);
      const long here = static_cast<long>(nodes[z]);
      const long gap_prev = ((here - prev) % n + n) % n;
      const long gap_next = ((next - here) % n + n) % n;
      left = static_cast<int>(std::min<long>(left, gap_prev - 1));
      right = static_cast<int>(std::min<long>(right, gap_next - 1));
    }
    out.emplace_back(left, right);
  }
  return out;
}

}  // namespace

ZeroDetection detect_zeros(const BoundaryMesh& mesh, const Eigen::VectorXd& squared,
                           const SignRecoveryOptions& options) {
  check_squared(mesh, squared);
  const Curve c{mesh, mesh.size()};
  const Eigen::VectorXd sq = squared.cwiseMax(0.0);
  const Eigen::VectorXd root = sq.cwiseSqrt();
  const double max_sq = sq.maxCoeff();

  // Pass 1 classifies every candidate with windows bounded by all candidates;
  // pass 2 refits the accepted zeros with windows bounded only by each other.
  const std::vector<std::size_t> candidates = local_minima(c, sq, max_sq);
  std::vector<std::size_t> accepted;
  {
    const auto clear = clearances(c, candidates, options.window);
    for (std::size_t z = 0; z < candidates.size(); ++z) {
      // A candidate squeezed by a neighbour gets the benefit of the wider pass-2 window.
      auto [l, r] = clear[z];
      if (l < 2 || r < 2 || l + r < 6) {
        accepted.push_back(candidates[z]);
        continue;
      }
      if (test_minimum(c, root, max_sq, candidates[z], l, r, options.tau_rel).is_zero) accepted.push_back(candidates[z]);
    }
  }

  ZeroDetection out;
  const auto clear = clearances(c, accepted, options.window);
  for (std::size_t z = 0; z < accepted.size(); ++z) {
    const LocalTest test = test_minimum(c, root, max_sq, accepted[z], clear[z].first, clear[z].second, options.tau_rel);
    if (test.is_zero) out.zeros.push_back(test.zero);
  }
  std::sort(out.zeros.begin(), out.zeros.end(),
            [](const DetectedZero& a, const DetectedZero& b) { return a.after_node < b.after_node; });

  if (out.zeros.empty()) {
    out.components.push_back({0, c.n - 1});
  } else {
    for (std::size_t z = 0; z < out.zeros.size(); ++z) {
      const std::size_t first = c.wrap(static_cast<long>(out.zeros[z].after_node) + 1);
      const std::size_t last = out.zeros[(z + 1) % out.zeros.size()].after_node;
      out.components.push_back({first, last});
    }
  }
  return out;
}

ZeroAnnotation estimate_order(const BoundaryMesh& mesh, const Eigen::VectorXd& squared, double location,
                              int window_left, int window_right, int m_max, double min_confidence) {
  check_squared(mesh, squared);
  if (m_max < 1) throw Error(ErrorCode::PreconditionViolated, "m_max must be at least 1");
  const Curve c{mesh, mesh.size()};
  const double max_sq = squared.maxCoeff();
  const double floor = 1e-26 * max_sq;

  std::size_t nearest = 0;
  double best_dist = kInf;
  for (std::size_t i = 0; i < c.n; ++i) {
    const double d = std::abs(c.signed_distance(mesh.arclength[i], location));
    if (d < best_dist) {
      best_dist = d;
      nearest = i;
    }
  }
  const double spacing = mesh.perimeter / static_cast<double>(c.n);

  std::vector<double> xs, ys;
  for (long d = -window_left; d <= window_right; ++d) {
    const std::size_t i = c.wrap(static_cast<long>(nearest) + d);
    const double t = c.signed_distance(mesh.arclength[i], location);
    const double v = squared(static_cast<Eigen::Index>(i));
    if (v <= floor || std::abs(t) < 1e-9 * spacing) continue;
    xs.push_back(std::log(std::abs(t)));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 3) {
    std::ostringstream msg;
    msg << "too few usable samples around the zero at " << location;
    throw Error(ErrorCode::OrderAmbiguous, msg.str());
  }

  // Candidate m_max + 1 is a sentinel: if it wins, the order is beyond reach.
  std::vector<double> residuals;
  for (int m = 1; m <= m_max + 1; ++m) {
    double mean = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mean += ys[i] - 2.0 * m * xs[i];
    mean /= static_cast<double>(xs.size());
    double res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - 2.0 * m * xs[i] - mean;
      res += e * e;
    }
    residuals.push_back(res);
  }
  const auto best = static_cast<std::size_t>(std::min_element(residuals.begin(), residuals.end()) - residuals.begin());
  double second = kInf;
  for (std::size_t m = 0; m < residuals.size(); ++m)
    if (m != best) second = std::min(second, residuals[m]);

  ZeroAnnotation ann;
  ann.location = location;
  ann.order = static_cast<int>(best) + 1;
  ann.confidence = residuals[best] > 0.0 ? second / residuals[best] : kInf;
  if (ann.order > m_max) {
    std::ostringstream msg;
    msg << "order at " << location << " exceeds m_max = " << m_max;
    throw Error(ErrorCode::OrderAmbiguous, msg.str());
  }
  if (ann.confidence < min_confidence) {
    std::ostringstream msg;
    msg << "order at " << location << " is ambiguous: m = " << ann.order << " with confidence " << ann.confidence;
    throw Error(ErrorCode::OrderAmbiguous, msg.str());
  }
  return ann;
}

ZeroAnnotation estimate_order(const BoundaryMesh& mesh, const Eigen::VectorXd& squared, double location, int window,
                              int m_max, double min_confidence) {
  return estimate_order(mesh, squared, location, window, window, m_max, min_confidence);
}

SignedTrace lift_sign(const BoundaryMesh& mesh, const Eigen::VectorXd& squared, const SignRecoveryOptions& options) {
  const ZeroDetection detection = detect_zeros(mesh, squared, options);
  const std::size_t n = mesh.size();

  SignedTrace out;
  std::vector<int> flip_after(n, 1);
  int total_order = 0;
  for (const DetectedZero& z : detection.zeros) {
    ZeroAnnotation ann = estimate_order(mesh, squared, z.location, z.window_left, z.window_right, options.m_max,
                                        options.min_confidence);
    if ((ann.order % 2 == 1) != z.sign_change) {
      std::ostringstream msg;
      msg << "zero at " << z.location << ": fitted order " << ann.order << " disagrees with the local "
          << (z.sign_change ? "sign change" : "touching") << " shape";
      throw Error(ErrorCode::OrderAmbiguous, msg.str());
    }
    if (ann.order % 2 == 1) flip_after[z.after_node] = -flip_after[z.after_node];
    total_order += ann.order;
    out.zeros.push_back(ann);
  }
  if (total_order % 2 != 0) {
    std::ostringstream msg;
    msg << "orders around the closed curve sum to " << total_order << "; the sign does not return to +1";
    throw Error(ErrorCode::ParityInconsistent, msg.str());
  }
  std::sort(out.zeros.begin(), out.zeros.end(),
            [](const ZeroAnnotation& a, const ZeroAnnotation& b) { return a.location < b.location; });

  const Eigen::VectorXd root = squared.cwiseMax(0.0).cwiseSqrt();
  Eigen::Index seed = 0;
  squared.maxCoeff(&seed);
  out.seed_node = static_cast<std::size_t>(seed);
  out.values.resize(static_cast<Eigen::Index>(n));
  int sign = 1;
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t node = (out.seed_node + d) % n;
    if (d > 0) sign *= flip_after[(node + n - 1) % n];
    out.values(static_cast<Eigen::Index>(node)) = sign * root(static_cast<Eigen::Index>(node));
  }
  return out;
}

Eigen::VectorXd positive_root(const Eigen::VectorXd& squared) { return squared.cwiseMax(0.0).cwiseSqrt(); }

bool verify_square_uniqueness(const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  if (f.size() != g.size()) throw Error(ErrorCode::ShapeMismatch, "functions live on different meshes");
  const double scale = f.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw Error(ErrorCode::ZeroFunction, "f vanishes identically");
  if ((f.cwiseAbs2() - g.cwiseAbs2()).cwiseAbs().maxCoeff() > 1e-12 * scale * scale)
    throw Error(ErrorCode::PreconditionViolated, "f^2 and g^2 differ");
  const double tol = 1e-10 * scale;
  return (g - f).cwiseAbs().maxCoeff() <= tol || (g + f).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace specinv
