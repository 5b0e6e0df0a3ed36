#ifndef RONS_ODE_HPP
#define RONS_ODE_HPP

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace rons {

enum class Scheme { kRk4Fixed, kRk45Adaptive };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct OdeOptions {
  Scheme scheme = Scheme::kRk45Adaptive;
  double t0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-2;  // fixed step, or initial step for rk45 (<= 0: automatic)
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_dt = 0.0;  // <= 0: unbounded
  long max_steps = 10'000'000;
  // Consecutive step halvings allowed when a trial stage leaves the
  // admissible set (signalled by rons::DomainError).
  int max_domain_retries = 20;
};

void validate(const OdeOptions& options);

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// Called at t0 and after every accepted step with the state and its rate.
// Returning false stops the integration early.
using OdeObserver = std::function<bool(double, const Eigen::VectorXd&, const Eigen::VectorXd&)>;

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  long domain_retries = 0;
  double t_final = 0.0;
};

// Classical RK4 with fixed step, or Dormand-Prince 5(4) with FSAL and
// standard error control. The final step is shortened to land on t_end.
OdeStats solve_ode(const OdeRhs& rhs, Eigen::VectorXd y0, const OdeOptions& options,
                   const OdeObserver& observer);

// Cubic Hermite interpolation between (t0, y0, dy0) and (t1, y1, dy1).
Eigen::VectorXd hermite_interpolate(double t, double t0, const Eigen::VectorXd& y0,
                                    const Eigen::VectorXd& dy0, double t1,
                                    const Eigen::VectorXd& y1, const Eigen::VectorXd& dy1);

}  // namespace rons

#endif  // RONS_ODE_HPP
