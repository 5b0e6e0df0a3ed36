#include "rons/models.hpp"

#include <cmath>
#include <numbers>

namespace rons {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI(0.0, 1.0);

void require_dimension(int got, int want, const std::string& model) {
  if (got != want) {
    throw ValidationError(model + " needs a " + std::to_string(want) + "D ansatz, got " +
                          std::to_string(got) + "D");
  }
}

class AdvectionDiffusion final : public PdeModel<double> {
 public:
  AdvectionDiffusion(double c, double nu) : c_(c), nu_(nu) {}
  std::string name() const override { return "advection-diffusion"; }

  RealField rhs(const RealFamily& family, const ParameterVector& q, const Points& x) const override {
    require_dimension(family.spatial_dimension(), 1, name());
    const std::array<MultiIndex, 2> orders{MultiIndex{1, 0}, MultiIndex{2, 0}};
    const auto d = family.spatial_derivatives(x, q, orders);
    return -c_ * d.col(0) + nu_ * d.col(1);
  }

 private:
  double c_;
  double nu_;
};

class Nlse final : public PdeModel<cplx> {
 public:
  std::string name() const override { return "nlse"; }

  ComplexField rhs(const ComplexFamily& family, const ParameterVector& q,
                   const Points& x) const override {
    require_dimension(family.spatial_dimension(), 1, name());
    const std::array<MultiIndex, 2> orders{kValue, MultiIndex{2, 0}};
    const auto d = family.spatial_derivatives(x, q, orders);
    return kI * (d.col(1).array() + d.col(0).array().abs2() * d.col(0).array()).matrix();
  }
};

class Vorticity final : public PdeModel<double> {
 public:
  explicit Vorticity(double nu) : nu_(nu) {}
  std::string name() const override { return "vorticity"; }

  RealField state(const RealFamily& family, const ParameterVector& q, const Points& x) const override {
    require_dimension(family.spatial_dimension(), 2, name());
    const std::array<MultiIndex, 2> orders{MultiIndex{2, 0}, MultiIndex{0, 2}};
    const auto d = family.spatial_derivatives(x, q, orders);
    return -(d.col(0) + d.col(1));
  }

  FieldMatrix<double> state_tangents(const RealFamily& family, const ParameterVector& q,
                                     const Points& x) const override {
    require_dimension(family.spatial_dimension(), 2, name());
    const std::array<MultiIndex, 2> orders{MultiIndex{2, 0}, MultiIndex{0, 2}};
    const auto t = family.tangent_derivatives(x, q, orders);
    return -(t[0] + t[1]);
  }

  RealField rhs(const RealFamily& family, const ParameterVector& q, const Points& x) const override {
    require_dimension(family.spatial_dimension(), 2, name());
    std::vector<MultiIndex> orders{{1, 0}, {0, 1}, {3, 0}, {1, 2}, {2, 1}, {0, 3}};
    if (nu_ != 0.0) orders.insert(orders.end(), {{4, 0}, {2, 2}, {0, 4}});
    const auto d = family.spatial_derivatives(x, q, orders);
    const Eigen::ArrayXd u = d.col(1);
    const Eigen::ArrayXd v = -d.col(0);
    const Eigen::ArrayXd wx = -(d.col(2) + d.col(3)).array();
    const Eigen::ArrayXd wy = -(d.col(4) + d.col(5)).array();
    Eigen::ArrayXd F = -(u * wx + v * wy);
    if (nu_ != 0.0) F -= nu_ * (d.col(6) + 2.0 * d.col(7) + d.col(8)).array();
    return F.matrix();
  }

 private:
  double nu_;
};

const double kSqrtPi = std::sqrt(std::numbers::pi);
const double kSqrt2 = std::numbers::sqrt2;

void require_nlse_layout(const ComplexFamily& family) {
  if (family.parameter_count() != 4) {
    throw ValidationError("closed-form NLSE invariants need the (A, L, V, phi) Gaussian");
  }
}

class NlseMassClosedForm final : public ConservedQuantity<cplx> {
 public:
  std::string name() const override { return "mass"; }
  double value(const ComplexFamily& family, const ParameterVector& q,
               const QuadratureRule&) const override {
    require_nlse_layout(family);
    return std::sqrt(std::numbers::pi / 2.0) * q(0) * q(0) * q(1);
  }
  Eigen::VectorXd gradient(const ComplexFamily& family, const ParameterVector& q,
                           const QuadratureRule&) const override {
    require_nlse_layout(family);
    const double c = std::sqrt(std::numbers::pi / 2.0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g(0) = 2.0 * c * q(0) * q(1);
    g(1) = c * q(0) * q(0);
    return g;
  }
};

// 1/2 int |u_x|^2 - 1/4 int |u|^4 on the chirped Gaussian:
// sqrt(pi) [A^2 (1 + L^2 V^2) / (2 sqrt2 L) - A^4 L / 8].
class NlseEnergyClosedForm final : public ConservedQuantity<cplx> {
 public:
  std::string name() const override { return "energy"; }
  double value(const ComplexFamily& family, const ParameterVector& q,
               const QuadratureRule&) const override {
    require_nlse_layout(family);
    const double A = q(0), L = q(1), V = q(2);
    return kSqrtPi * (A * A * (1.0 + L * L * V * V) / (2.0 * kSqrt2 * L) - A * A * A * A * L / 8.0);
  }
  Eigen::VectorXd gradient(const ComplexFamily& family, const ParameterVector& q,
                           const QuadratureRule&) const override {
    require_nlse_layout(family);
    const double A = q(0), L = q(1), V = q(2);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g(0) = kSqrtPi * (A / (kSqrt2 * L) + A * L * V * V / kSqrt2 - A * A * A * L / 2.0);
    g(1) = kSqrtPi * (-A * A / (2.0 * kSqrt2 * L * L) + A * A * V * V / (2.0 * kSqrt2) -
                      A * A * A * A / 8.0);
    g(2) = kSqrtPi * A * A * L * V / kSqrt2;
    return g;
  }
};

class NlseMassQuadrature final : public ConservedQuantity<cplx> {
 public:
  std::string name() const override { return "mass"; }
  double value(const ComplexFamily& family, const ParameterVector& q,
               const QuadratureRule& rule) const override {
    return norm_sq(family.evaluate(rule.nodes(), q), rule);
  }
  Eigen::VectorXd gradient(const ComplexFamily& family, const ParameterVector& q,
                           const QuadratureRule& rule) const override {
    const auto u = family.evaluate(rule.nodes(), q);
    return 2.0 * project(family.tangents(rule.nodes(), q), u, rule);
  }
};

class NlseEnergyQuadrature final : public ConservedQuantity<cplx> {
 public:
  std::string name() const override { return "energy"; }
  double value(const ComplexFamily& family, const ParameterVector& q,
               const QuadratureRule& rule) const override {
    const std::array<MultiIndex, 2> orders{kValue, MultiIndex{1, 0}};
    const auto d = family.spatial_derivatives(rule.nodes(), q, orders);
    const Eigen::VectorXd mod2 = d.col(0).cwiseAbs2();
    return 0.5 * norm_sq(d.col(1), rule) - 0.25 * rule.weights().dot(mod2.cwiseProduct(mod2));
  }
  Eigen::VectorXd gradient(const ComplexFamily& family, const ParameterVector& q,
                           const QuadratureRule& rule) const override {
    const std::array<MultiIndex, 2> orders{kValue, MultiIndex{1, 0}};
    const auto d = family.spatial_derivatives(rule.nodes(), q, orders);
    const auto t = family.tangent_derivatives(rule.nodes(), q, orders);
    const ComplexField cubic = (d.col(0).array().abs2() * d.col(0).array()).matrix();
    return project(t[1], d.col(1), rule) - project(t[0], cubic, rule);
  }
};

const std::array<MultiIndex, 2> kGradient{MultiIndex{1, 0}, MultiIndex{0, 1}};
const std::array<MultiIndex, 2> kSecond{MultiIndex{2, 0}, MultiIndex{0, 2}};

class KineticEnergy final : public ConservedQuantity<double> {
 public:
  std::string name() const override { return "kinetic-energy"; }
  double value(const RealFamily& family, const ParameterVector& q,
               const QuadratureRule& rule) const override {
    require_dimension(family.spatial_dimension(), 2, name());
    const auto d = family.spatial_derivatives(rule.nodes(), q, kGradient);
    return 0.5 * (norm_sq(d.col(0), rule) + norm_sq(d.col(1), rule));
  }
  Eigen::VectorXd gradient(const RealFamily& family, const ParameterVector& q,
                           const QuadratureRule& rule) const override {
    require_dimension(family.spatial_dimension(), 2, name());
    const auto d = family.spatial_derivatives(rule.nodes(), q, kGradient);
    const auto t = family.tangent_derivatives(rule.nodes(), q, kGradient);
    return project(t[0], d.col(0), rule) + project(t[1], d.col(1), rule);
  }
};

class Enstrophy final : public ConservedQuantity<double> {
 public:
  std::string name() const override { return "enstrophy"; }
  double value(const RealFamily& family, const ParameterVector& q,
               const QuadratureRule& rule) const override {
    require_dimension(family.spatial_dimension(), 2, name());
    const auto d = family.spatial_derivatives(rule.nodes(), q, kSecond);
    return 0.5 * norm_sq(RealField(d.col(0) + d.col(1)), rule);
  }
  Eigen::VectorXd gradient(const RealFamily& family, const ParameterVector& q,
                           const QuadratureRule& rule) const override {
    require_dimension(family.spatial_dimension(), 2, name());
    const auto d = family.spatial_derivatives(rule.nodes(), q, kSecond);
    const auto t = family.tangent_derivatives(rule.nodes(), q, kSecond);
    // omega = -lap psi; the two sign flips cancel.
    return project(RealFieldMatrix(t[0] + t[1]), RealField(d.col(0) + d.col(1)), rule);
  }

 private:
  using RealFieldMatrix = FieldMatrix<double>;
};

}  // namespace

ModelPtr<double> advection_diffusion(double c, double nu) {
  if (!(nu >= 0.0) || !std::isfinite(c)) throw ValidationError("advection-diffusion needs nu >= 0");
  return std::make_shared<const AdvectionDiffusion>(c, nu);
}

ModelPtr<cplx> nlse() { return std::make_shared<const Nlse>(); }

ModelPtr<double> vorticity(double nu) {
  if (!(nu >= 0.0)) throw ValidationError("vorticity model needs nu >= 0");
  return std::make_shared<const Vorticity>(nu);
}

QuantityList<cplx> nlse_invariants() {
  return {std::make_shared<const NlseMassClosedForm>(), std::make_shared<const NlseEnergyClosedForm>()};
}

QuantityList<cplx> nlse_invariants_quadrature() {
  return {std::make_shared<const NlseMassQuadrature>(), std::make_shared<const NlseEnergyQuadrature>()};
}

QuantityList<double> euler_invariants() {
  return {std::make_shared<const KineticEnergy>(), std::make_shared<const Enstrophy>()};
}

double gaussian_vortex_energy(double A) { return std::numbers::pi * A * A / 2.0; }

double gaussian_vortex_enstrophy(double A, double L) {
  return 2.0 * std::numbers::pi * A * A / (L * L);
}

}  // namespace rons
