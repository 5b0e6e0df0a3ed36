#include "rons/hilbert.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace rons {

int spatial_dimension(const Domain& domain) {
  return std::holds_alternative<Plane>(domain) ? 2 : 1;
}

std::string describe(const Domain& domain) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PeriodicInterval>) {
          os << "periodic-interval(length=" << d.length << ", origin=" << d.origin << ")";
        } else if constexpr (std::is_same_v<T, RealLine>) {
          os << "real-line(half_width=" << d.half_width << ", center=" << d.center << ")";
        } else {
          os << "plane(half_width=" << d.half_width_x << "x" << d.half_width_y << ", center=("
             << d.center.x() << ", " << d.center.y() << "))";
        }
      },
      domain);
  return os.str();
}

void validate(const Domain& domain) {
  bool ok = std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PeriodicInterval>) {
          return std::isfinite(d.length) && d.length > 0.0;
        } else if constexpr (std::is_same_v<T, RealLine>) {
          return std::isfinite(d.half_width) && d.half_width > 0.0;
        } else {
          return std::isfinite(d.half_width_x) && std::isfinite(d.half_width_y) &&
                 d.half_width_x > 0.0 && d.half_width_y > 0.0;
        }
      },
      domain);
  if (!ok) throw ValidationError("domain extents must be positive: " + describe(domain));
}

QuadratureRule::QuadratureRule(Domain domain, Points nodes, Eigen::VectorXd weights)
    : domain_(std::move(domain)), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  validate(domain_);
  if (nodes_.rows() != weights_.size()) throw AlignmentError("node/weight count mismatch");
  if (weights_.size() < 2) throw ValidationError("quadrature rule needs at least 2 nodes");
  if (nodes_.cols() != spatial_dimension(domain_)) {
    throw ValidationError("node dimension does not match domain " + describe(domain_));
  }
  if ((weights_.array() <= 0.0).any()) throw ValidationError("quadrature weights must be positive");
}

namespace {

struct ReferenceNodes {
  Eigen::VectorXd z;  // roots of P_n in [0, 1), one per symmetric pair
  Eigen::VectorXd w;
};

ReferenceNodes compute_reference(int n) {
  const int m = (n + 1) / 2;
  ReferenceNodes ref{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  // P_k = a_k z P_{k-1} - b_k P_{k-2}
  Eigen::VectorXd a(n + 1), b(n + 1);
  for (int k = 1; k <= n; ++k) {
    a(k) = (2.0 * k - 1.0) / k;
    b(k) = (k - 1.0) / k;
  }
  // Returns P_n(z) and sets dp = P_n'(z).
  auto legendre = [&](double z, double& dp) {
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = a(k) * z * p1 - b(k) * p2;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    return p0;
  };
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dz = legendre(z, dp) / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    legendre(z, dp);
    ref.z(i) = z;
    ref.w(i) = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return ref;
}

// Tracking rules request the same orders over and over; the Newton solve is
// O(n^2), so reference nodes are computed once per order.
std::shared_ptr<const ReferenceNodes> reference_nodes(int n) {
  static std::mutex mutex;
  static std::unordered_map<int, std::shared_ptr<const ReferenceNodes>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto ref = std::make_shared<const ReferenceNodes>(compute_reference(n));
  std::lock_guard lock(mutex);
  return cache.emplace(n, std::move(ref)).first->second;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ValidationError("Gauss-Legendre order must be positive");
  const auto ref = reference_nodes(n);
  Eigen::VectorXd x(n), w(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (Eigen::Index i = 0; i < ref->z.size(); ++i) {
    x(i) = mid - half * ref->z(i);
    x(n - 1 - i) = mid + half * ref->z(i);
    w(i) = half * ref->w(i);
    w(n - 1 - i) = half * ref->w(i);
  }
  return {x, w};
}

QuadratureRule make_plane_rule(const Plane& plane, int nx, int ny) {
  if (nx < 2 || ny < 2) throw ValidationError("plane rule needs at least 2 nodes per axis");
  validate(Domain{plane});
  const auto [gx, wx] = gauss_legendre(nx, plane.center.x() - plane.half_width_x,
                                       plane.center.x() + plane.half_width_x);
  const auto [gy, wy] = gauss_legendre(ny, plane.center.y() - plane.half_width_y,
                                       plane.center.y() + plane.half_width_y);
  Points nodes(static_cast<Eigen::Index>(nx) * ny, 2);
  Eigen::VectorXd weights(static_cast<Eigen::Index>(nx) * ny);
  Eigen::Index k = 0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j, ++k) {
      nodes(k, 0) = gx(i);
      nodes(k, 1) = gy(j);
      weights(k) = wx(i) * wy(j);
    }
  }
  return QuadratureRule(plane, std::move(nodes), std::move(weights));
}

QuadratureRule make_rule(const Domain& domain, int resolution) {
  if (resolution < 2) throw ValidationError("resolution must be at least 2");
  validate(domain);
  return std::visit(
      [&](const auto& d) -> QuadratureRule {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PeriodicInterval>) {
          const double h = d.length / resolution;
          Points nodes(resolution, 1);
          for (int i = 0; i < resolution; ++i) nodes(i, 0) = d.origin + i * h;
          return QuadratureRule(d, std::move(nodes), Eigen::VectorXd::Constant(resolution, h));
        } else if constexpr (std::is_same_v<T, RealLine>) {
          auto [x, w] = gauss_legendre(resolution, d.center - d.half_width, d.center + d.half_width);
          return QuadratureRule(d, Points(x), std::move(w));
        } else {
          return make_plane_rule(d, resolution, resolution);
        }
      },
      domain);
}

}  // namespace rons
