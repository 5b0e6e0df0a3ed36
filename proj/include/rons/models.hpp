#ifndef RONS_MODELS_HPP
#define RONS_MODELS_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rons/ansatz.hpp"

namespace rons {

// Right-hand side F of du/dt = F(u), evaluated on an ansatz.
//
// The PDE's unknown need not be the ansatz field itself: the vorticity model
// is parameterized through the stream function but evolves the vorticity.
// state() and state_tangents() return the evolved field and its parameter
// derivatives; the residual is measured in that field.
template <typename Scalar>
class PdeModel {
 public:
  virtual ~PdeModel() = default;
  virtual std::string name() const = 0;

  virtual Field<Scalar> state(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                              const Points& x) const {
    return family.evaluate(x, q);
  }
  virtual FieldMatrix<Scalar> state_tangents(const AnsatzFamily<Scalar>& family,
                                             const ParameterVector& q, const Points& x) const {
    return family.tangents(x, q);
  }
  virtual Field<Scalar> rhs(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                            const Points& x) const = 0;
};

// A functional I(q) of the ansatz with its parameter gradient.
template <typename Scalar>
class ConservedQuantity {
 public:
  virtual ~ConservedQuantity() = default;
  virtual std::string name() const = 0;
  virtual double value(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                       const QuadratureRule& rule) const = 0;
  virtual Eigen::VectorXd gradient(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                                   const QuadratureRule& rule) const = 0;
};

template <typename Scalar>
using ModelPtr = std::shared_ptr<const PdeModel<Scalar>>;
template <typename Scalar>
using QuantityPtr = std::shared_ptr<const ConservedQuantity<Scalar>>;
template <typename Scalar>
using QuantityList = std::vector<QuantityPtr<Scalar>>;

// F(u) = -c u_x + nu u_xx.
ModelPtr<double> advection_diffusion(double c, double nu);

// F(u) = i u_xx + i |u|^2 u.
ModelPtr<std::complex<double>> nlse();

// Vorticity transport for a stream-function ansatz psi:
// u = (psi_y, -psi_x), omega = -lap psi, F = -u . grad omega + nu lap omega.
ModelPtr<double> vorticity(double nu);

// Mass int |u|^2 and energy 1/2 int |u_x|^2 - 1/4 int |u|^4, in closed form
// on the chirped Gaussian (the rule argument is ignored).
QuantityList<std::complex<double>> nlse_invariants();

// The same two functionals by quadrature on any complex 1D family.
QuantityList<std::complex<double>> nlse_invariants_quadrature();

// Kinetic energy 1/2 int |u|^2 and enstrophy 1/2 int omega^2 of a
// stream-function ansatz, by quadrature.
QuantityList<double> euler_invariants();

// Closed-form single-vortex values: energy pi A^2 / 2, enstrophy 2 pi A^2 / L^2.
double gaussian_vortex_energy(double A);
double gaussian_vortex_enstrophy(double A, double L);

}  // namespace rons

#endif  // RONS_MODELS_HPP
