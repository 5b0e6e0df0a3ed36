// Shared generators and finite-difference oracles for the unit tests.
#ifndef RONS_TESTS_SUPPORT_HPP
#define RONS_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rons/families.hpp"

namespace rons::testing {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double sign() { return uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Random admissible parameters, keyed by family name.
inline ParameterVector random_parameters(const std::string& family, Eigen::Index n, Rng& rng) {
  ParameterVector q(n);
  if (family == "sine") {
    q << rng.uniform(0.1, 3.0), rng.uniform(0.3, 3.0), rng.uniform(-kPi, kPi);
  } else if (family == "heat-kernel") {
    q << rng.uniform(0.1, 3.0), rng.uniform(0.3, 3.0);
  } else if (family == "nlse-gaussian") {
    q << rng.uniform(0.05, 1.0), rng.uniform(0.5, 20.0), rng.uniform(-0.2, 0.2),
        rng.uniform(-kPi, kPi);
  } else if (family == "gaussian-vortices") {
    for (Eigen::Index v = 0; v < n / 4; ++v) {
      q.segment<4>(4 * v) << rng.sign() * rng.uniform(0.3, 2.0), rng.uniform(0.3, 1.5),
          rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) q(i) = rng.uniform(-1.0, 1.0);
  }
  return q;
}

// Nodes scattered where the family is numerically significant.
inline Points random_points(const std::string& family, int dimension, const ParameterVector& q,
                            int count, Rng& rng) {
  Points x(count, dimension);
  double half = 3.0;
  if (family == "nlse-gaussian" || family == "heat-kernel") half = 2.0 * q(1);
  if (family == "sine") half = 4.0 * q(1);
  if (family == "linear-modes") half = kPi;
  for (int i = 0; i < count; ++i) {
    if (family == "gaussian-vortices") {
      // Around a randomly chosen core, so every tangent column is resolved.
      const auto v = static_cast<Eigen::Index>(rng.uniform(0.0, static_cast<double>(q.size() / 4)));
      const double L = q(4 * v + 1);
      x(i, 0) = q(4 * v + 2) + rng.uniform(-2.5 * L, 2.5 * L);
      x(i, 1) = q(4 * v + 3) + rng.uniform(-2.5 * L, 2.5 * L);
      continue;
    }
    x(i, 0) = rng.uniform(-half, half);
    if (dimension == 2) x(i, 1) = rng.uniform(-half, half);
  }
  return x;
}

// max |a - b| / max(|a|_inf, |b|_inf, floor), column by column.
template <typename DerivedA, typename DerivedB>
double column_relative_error(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                             double floor = 1e-12) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double scale =
        std::max({a.col(j).cwiseAbs().maxCoeff(), b.col(j).cwiseAbs().maxCoeff(), floor});
    worst = std::max(worst, (a.col(j) - b.col(j)).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

inline double fd_step(double value) { return 1e-6 * std::max(1.0, std::abs(value)); }

// Central differences of f in each component of q, one column per parameter.
template <typename Fn>
auto fd_jacobian(Fn&& f, const ParameterVector& q) {
  using Col = decltype(f(q));
  const Col f0 = f(q);
  Eigen::Matrix<typename Col::Scalar, Eigen::Dynamic, Eigen::Dynamic> J(f0.size(), q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double h = fd_step(q(i));
    ParameterVector qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    J.col(i) = (f(qp) - f(qm)) / (2.0 * h);
  }
  return J;
}

// Every builtin family paired with a generator key and its dimension.
struct FamilyCase {
  std::string key;
  std::shared_ptr<const RealFamily> real;
  std::shared_ptr<const ComplexFamily> complex;
  int dimension;
  Eigen::Index n;
};

inline std::vector<FamilyCase> family_cases() {
  std::vector<FamilyCase> out;
  out.push_back({"sine", std::make_shared<SineWave>(), nullptr, 1, 3});
  out.push_back({"heat-kernel", std::make_shared<HeatKernel>(1), nullptr, 1, 2});
  out.push_back({"heat-kernel", std::make_shared<HeatKernel>(2), nullptr, 2, 2});
  out.push_back({"nlse-gaussian", nullptr, std::make_shared<NlseGaussian>(), 1, 4});
  out.push_back({"gaussian-vortices", std::make_shared<GaussianVortices>(1), nullptr, 2, 4});
  out.push_back({"gaussian-vortices", std::make_shared<GaussianVortices>(3), nullptr, 2, 12});
  out.push_back({"linear-modes", std::make_shared<LinearModes>(fourier_modes(5, 2.0 * kPi)), nullptr,
                 1, 5});
  return out;
}

}  // namespace rons::testing

#endif  // RONS_TESTS_SUPPORT_HPP
