#ifndef RONS_HILBERT_HPP
#define RONS_HILBERT_HPP

#include <complex>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "rons/errors.hpp"

namespace rons {

// Sampled fields: one value per quadrature node.
template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Column j holds the j-th field of a family of fields sampled on the same nodes.
template <typename Scalar>
using FieldMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealField = Field<double>;
using ComplexField = Field<std::complex<double>>;

// Quadrature nodes, one row per node, one column per spatial dimension.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;

struct PeriodicInterval {
  double length;
  double origin = 0.0;
};

// The real line, truncated to [center - half_width, center + half_width].
struct RealLine {
  double half_width;
  double center = 0.0;
};

// The plane, truncated to an axis-aligned box.
struct Plane {
  double half_width_x;
  double half_width_y;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
};

using Domain = std::variant<PeriodicInterval, RealLine, Plane>;

int spatial_dimension(const Domain& domain);
std::string describe(const Domain& domain);
void validate(const Domain& domain);

// Nodes and positive weights defining the discrete inner product on a domain.
class QuadratureRule {
 public:
  QuadratureRule(Domain domain, Points nodes, Eigen::VectorXd weights);

  const Domain& domain() const { return domain_; }
  const Points& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }
  int dimension() const { return static_cast<int>(nodes_.cols()); }

 private:
  Domain domain_;
  Points nodes_;
  Eigen::VectorXd weights_;
};

// Gauss-Legendre nodes and weights on [a, b].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a, double b);

// Equispaced trapezoid rule for periodic domains; Gauss-Legendre on the
// truncation box (tensor product in 2D, resolution^2 nodes) otherwise.
QuadratureRule make_rule(const Domain& domain, int resolution);

// Anisotropic tensor Gauss-Legendre rule on a plane box.
QuadratureRule make_plane_rule(const Plane& plane, int nx, int ny);

namespace detail {
template <typename DerivedA, typename DerivedB>
void check_aligned(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                   const QuadratureRule& rule) {
  if (a.size() != rule.size() || b.size() != rule.size()) {
    throw AlignmentError("field length (" + std::to_string(a.size()) + ", " +
                         std::to_string(b.size()) + ") does not match rule size " +
                         std::to_string(rule.size()));
  }
}
}  // namespace detail

// Real part of the weighted Hermitian pairing, sum_i w_i Re(a_i conj(b_i)).
template <typename DerivedA, typename DerivedB>
double inner_product(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                     const QuadratureRule& rule) {
  detail::check_aligned(a, b, rule);
  return (rule.weights().array() * (a.array() * b.array().conjugate()).real()).sum();
}

template <typename Derived>
double norm_sq(const Eigen::MatrixBase<Derived>& a, const QuadratureRule& rule) {
  detail::check_aligned(a, a, rule);
  return (rule.weights().array() * a.array().abs2()).sum();
}

// Matrix of pairwise inner products between the columns of a and b.
template <typename DerivedA, typename DerivedB>
Eigen::MatrixXd gram(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                     const QuadratureRule& rule) {
  if (a.rows() != rule.size() || b.rows() != rule.size()) {
    throw AlignmentError("field matrix rows do not match rule size " + std::to_string(rule.size()));
  }
  return (a.adjoint() * (rule.weights().asDiagonal() * b)).real();
}

// Inner products of every column of a with the single field b.
template <typename DerivedA, typename DerivedB>
Eigen::VectorXd project(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                        const QuadratureRule& rule) {
  if (a.rows() != rule.size() || b.size() != rule.size()) {
    throw AlignmentError("field matrix rows do not match rule size " + std::to_string(rule.size()));
  }
  return (a.adjoint() * (rule.weights().asDiagonal() * b)).real();
}

}  // namespace rons

#endif  // RONS_HILBERT_HPP
