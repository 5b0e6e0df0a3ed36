#ifndef RONS_FAMILIES_HPP
#define RONS_FAMILIES_HPP

#include <functional>
#include <vector>

#include "rons/ansatz.hpp"

namespace rons {

using RealFieldMatrix = FieldMatrix<double>;
using ComplexFieldMatrix = FieldMatrix<std::complex<double>>;

// u = A sin(x / L + phi), q = (A, L, phi). Admissible: A > 0, L > 0.
class SineWave final : public RealFamily {
 public:
  std::string name() const override { return "sine"; }
  std::vector<std::string> parameter_labels() const override { return {"A", "L", "phi"}; }
  int spatial_dimension() const override { return 1; }
  bool in_domain(const ParameterVector& q) const override;
  RealFieldMatrix spatial_derivatives(const Points& x, const ParameterVector& q,
                                      std::span<const MultiIndex> orders) const override;
  std::vector<RealFieldMatrix> tangent_derivatives(
      const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const override;
};

// Heat kernel u = A exp(-|x|^2 / L^2) in one or two dimensions, q = (A, L).
class HeatKernel final : public RealFamily {
 public:
  explicit HeatKernel(int dimension = 1);

  std::string name() const override { return "heat-kernel"; }
  std::vector<std::string> parameter_labels() const override { return {"A", "L"}; }
  int spatial_dimension() const override { return dimension_; }
  bool in_domain(const ParameterVector& q) const override;
  RealFieldMatrix spatial_derivatives(const Points& x, const ParameterVector& q,
                                      std::span<const MultiIndex> orders) const override;
  std::vector<RealFieldMatrix> tangent_derivatives(
      const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const override;
  std::optional<SupportBox> support(const ParameterVector& q) const override;

 private:
  int dimension_;
};

// Chirped Gaussian wave group u = A exp(-x^2/L^2 + i x^2 V / L + i phi),
// q = (A, L, V, phi). Admissible: A > 0, L > 0.
class NlseGaussian final : public ComplexFamily {
 public:
  std::string name() const override { return "nlse-gaussian"; }
  std::vector<std::string> parameter_labels() const override { return {"A", "L", "V", "phi"}; }
  int spatial_dimension() const override { return 1; }
  bool in_domain(const ParameterVector& q) const override;
  ComplexFieldMatrix spatial_derivatives(const Points& x, const ParameterVector& q,
                                         std::span<const MultiIndex> orders) const override;
  std::vector<ComplexFieldMatrix> tangent_derivatives(
      const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const override;
  std::optional<SupportBox> support(const ParameterVector& q) const override;
};

// Stream function of N axisymmetric Gaussian vortices,
// psi = sum_i A_i exp(-|x - x_i|^2 / L_i^2), q = (A_1, L_1, x_1, y_1, ...).
// Admissible: L_i > 0 and A_i != 0.
class GaussianVortices final : public RealFamily {
 public:
  explicit GaussianVortices(int vortex_count);

  int vortex_count() const { return count_; }

  std::string name() const override { return "gaussian-vortices"; }
  std::vector<std::string> parameter_labels() const override;
  int spatial_dimension() const override { return 2; }
  bool in_domain(const ParameterVector& q) const override;
  RealFieldMatrix spatial_derivatives(const Points& x, const ParameterVector& q,
                                      std::span<const MultiIndex> orders) const override;
  std::vector<RealFieldMatrix> tangent_derivatives(
      const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const override;
  std::optional<SupportBox> support(const ParameterVector& q) const override;

  static ParameterVector pack(std::span<const double> amplitudes, std::span<const double> scales,
                              std::span<const Eigen::Vector2d> centers);
  Eigen::Vector2d center(const ParameterVector& q, int i) const {
    return {q(4 * i + 2), q(4 * i + 3)};
  }

 private:
  int count_;
};

// A one-dimensional mode: mode(x, k) is the k-th derivative at x.
using Mode = std::function<double(double, int)>;

// u = sum_i q_i u_i(x) over fixed modes. Every q is admissible.
class LinearModes final : public RealFamily {
 public:
  explicit LinearModes(std::vector<Mode> modes);

  const std::vector<Mode>& modes() const { return modes_; }

  std::string name() const override { return "linear-modes"; }
  std::vector<std::string> parameter_labels() const override;
  int spatial_dimension() const override { return 1; }
  bool in_domain(const ParameterVector& q) const override;
  RealFieldMatrix spatial_derivatives(const Points& x, const ParameterVector& q,
                                      std::span<const MultiIndex> orders) const override;
  std::vector<RealFieldMatrix> tangent_derivatives(
      const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const override;

  // Samples of the modes' k-th derivatives, one column per mode.
  RealFieldMatrix sample_modes(const Points& x, int order = 0) const;

 private:
  std::vector<Mode> modes_;
};

// Modes orthonormal on [0, period): 1/sqrt(P), then alternating
// sqrt(2/P) cos(2 pi k x / P) and sqrt(2/P) sin(2 pi k x / P), k = 1, 2, ...
std::vector<Mode> fourier_modes(int count, double period);

// sqrt(2/P) sin(k x) for each wavenumber k; orthonormal on [0, P) when P is
// a common period.
std::vector<Mode> sine_modes(std::span<const double> wavenumbers, double period);

}  // namespace rons

#endif  // RONS_FAMILIES_HPP
