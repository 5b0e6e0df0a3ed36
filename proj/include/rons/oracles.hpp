#ifndef RONS_ORACLES_HPP
#define RONS_ORACLES_HPP

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rons/families.hpp"
#include "rons/models.hpp"
#include "rons/ode.hpp"

namespace rons {

// A0 exp(-nu t / L0^2) sin((x - c t) / L0).
double exact_advdiff(double A0, double L0, double c, double nu, double x, double t);

// ---------------------------------------------------------------------------
// Pseudospectral NLSE solver

// Field on the periodic grid x_j = -length/2 + j length/n, j = 0..n-1, so
// x = 0 sits at index n/2.
struct SpectralState {
  double length = 0.0;
  double time = 0.0;
  Eigen::VectorXcd values;

  Eigen::Index size() const { return values.size(); }
  double spacing() const { return length / static_cast<double>(values.size()); }
  std::complex<double> at_origin() const { return values(values.size() / 2); }
};

void validate(const SpectralState& state);

Eigen::VectorXd spectral_grid(int n, double length);

SpectralState make_spectral_state(int n, double length,
                                  const std::function<std::complex<double>(double)>& u0);

// h sum |u_j|^2
double spectral_mass(const SpectralState& state);

class SpectralBlowupError : public BlowupError {
 public:
  SpectralBlowupError(const std::string& what, SpectralState last_good)
      : BlowupError(what), last_good_(std::move(last_good)) {}
  const SpectralState& last_good() const { return last_good_; }

 private:
  SpectralState last_good_;
};

struct NlseDnsOptions {
  double dt = 0.025;
  double t_end = 40.0;
  int stride = 1;  // keep every stride-th step (the final state is always kept)
  int contour_points = 32;
};

// ETDRK4 for u_t = i u_xx + i |u|^2 u. Returns the kept states, starting
// with u0.
std::vector<SpectralState> nlse_dns(const SpectralState& u0, const NlseDnsOptions& options);

// ---------------------------------------------------------------------------
// Point vortices

struct PointVortexState {
  Eigen::VectorXd strengths;  // Gamma_i
  Eigen::MatrixX2d centers;   // one row per vortex
  double time = 0.0;

  Eigen::Index count() const { return strengths.size(); }
};

class NearCollisionError : public Error {
 public:
  explicit NearCollisionError(const std::string& what) : Error("near-collision", what) {}
};

void validate(const PointVortexState& state);

// -sum_{i != j} Gamma_i Gamma_j log|x_i - x_j| / (4 pi)
double point_vortex_hamiltonian(const PointVortexState& state);

// Velocities of the centers, one row per vortex.
Eigen::MatrixX2d point_vortex_velocity(const PointVortexState& state);

struct PointVortexOptions {
  double t_end = 10.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  double collision_distance = 1e-6;
};

struct PointVortexTrajectory {
  std::vector<PointVortexState> states;
  std::vector<double> hamiltonian;
  OdeStats stats;
};

PointVortexTrajectory point_vortex(const PointVortexState& initial,
                                   const PointVortexOptions& options);

// ---------------------------------------------------------------------------
// Galerkin projection

// q_k' = <u_k, F(u)> for u = sum q_k u_k. The modes must be orthonormal on
// the rule to 1e-8.
Eigen::VectorXd galerkin_rhs(const LinearModes& modes, const ParameterVector& q,
                             const PdeModel<double>& model, const QuadratureRule& rule);

// ---------------------------------------------------------------------------
// Minimizers of the time-integrated residual for a diagonal linear PDE:
// q_k'' = lambda_k^2 q_k.

struct InstabilityOptions {
  double t_end = 10.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  double fit_fraction = 0.5;  // growth rates are fitted over the final fraction of the run
};

struct InstabilityResult {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> q;     // mode amplitudes at each time
  std::vector<Eigen::VectorXd> qdot;
  Eigen::VectorXd fitted_rates;
  OdeStats stats;
};

InstabilityResult finite_time_instability(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& q0,
                                          const Eigen::VectorXd& qdot0,
                                          const InstabilityOptions& options);

// Least-squares slope of log|v| against t over samples with t >= t_from.
double fit_log_growth(const std::vector<double>& times, const std::vector<double>& values,
                      double t_from);

}  // namespace rons

#endif  // RONS_ORACLES_HPP
