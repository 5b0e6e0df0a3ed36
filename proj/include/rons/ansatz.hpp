#ifndef RONS_ANSATZ_HPP
#define RONS_ANSATZ_HPP

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rons/hilbert.hpp"

namespace rons {

// Parameters q of an ansatz. Labels live on the family, not on every vector.
using ParameterVector = Eigen::VectorXd;

// Spatial derivative orders (d/dx, d/dy). 1D families ignore the second entry.
using MultiIndex = std::array<int, 2>;

inline constexpr MultiIndex kValue{0, 0};

// Minimum distance kept from the boundary of the admissible parameter set.
inline constexpr double kDomainMargin = 1e-10;

// Bounding box of the region where an ansatz is numerically significant,
// measured in units of its largest length scale.
struct SupportBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double length_scale;
  double finest_scale;
};

// A parameterized solution shape q -> u(., q) with closed-form parameter and
// spatial derivatives. All evaluation is batched over a node matrix.
template <typename Scalar>
class AnsatzFamily {
 public:
  using scalar_type = Scalar;

  virtual ~AnsatzFamily() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> parameter_labels() const = 0;
  virtual int spatial_dimension() const = 0;
  virtual bool in_domain(const ParameterVector& q) const = 0;

  // One column per requested multi-index: d^alpha u at every node.
  virtual FieldMatrix<Scalar> spatial_derivatives(const Points& x, const ParameterVector& q,
                                                  std::span<const MultiIndex> orders) const = 0;

  // For each requested multi-index, an N x n matrix whose column i is
  // d/dq_i of d^alpha u.
  virtual std::vector<FieldMatrix<Scalar>> tangent_derivatives(
      const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const = 0;

  virtual std::optional<SupportBox> support(const ParameterVector&) const { return std::nullopt; }

  Eigen::Index parameter_count() const {
    return static_cast<Eigen::Index>(parameter_labels().size());
  }

  void require_domain(const ParameterVector& q) const;

  Field<Scalar> evaluate(const Points& x, const ParameterVector& q) const {
    return spatial_derivative(x, q, kValue);
  }
  Field<Scalar> spatial_derivative(const Points& x, const ParameterVector& q,
                                   const MultiIndex& order) const {
    const std::array<MultiIndex, 1> orders{order};
    return spatial_derivatives(x, q, orders).col(0);
  }
  FieldMatrix<Scalar> tangents(const Points& x, const ParameterVector& q) const {
    return tangent_derivative(x, q, kValue);
  }
  FieldMatrix<Scalar> tangent_derivative(const Points& x, const ParameterVector& q,
                                         const MultiIndex& order) const {
    const std::array<MultiIndex, 1> orders{order};
    return std::move(tangent_derivatives(x, q, orders).front());
  }
};

// Sampled tangent fields du/dq_i on a rule, one column per parameter.
template <typename Scalar>
struct TangentBasis {
  FieldMatrix<Scalar> fields;
};

template <typename Scalar>
Field<Scalar> sample(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                     const QuadratureRule& rule);

template <typename Scalar>
TangentBasis<Scalar> tangent_basis(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                                   const QuadratureRule& rule);

// Cholesky test of the tangent Gram matrix.
template <typename Scalar>
bool is_immersion(const TangentBasis<Scalar>& basis, const QuadratureRule& rule);

using RealFamily = AnsatzFamily<double>;
using ComplexFamily = AnsatzFamily<std::complex<double>>;

struct FamilyInfo {
  std::string name;
  std::string description;
  std::variant<std::shared_ptr<const RealFamily>, std::shared_ptr<const ComplexFamily>> instance;
};

// The five built-in families with representative default instances.
std::vector<FamilyInfo> builtin_families();

}  // namespace rons

#endif  // RONS_ANSATZ_HPP
