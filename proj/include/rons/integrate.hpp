#ifndef RONS_INTEGRATE_HPP
#define RONS_INTEGRATE_HPP

#include <memory>
#include <string>
#include <vector>

#include "rons/engine.hpp"
#include "rons/ode.hpp"

namespace rons {

struct IntegratorConfig {
  Scheme scheme = Scheme::kRk45Adaptive;
  double dt = 1e-2;  // rk4 step; rk45 picks its own initial step
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_end = 1.0;
  double max_dt = 0.0;
  int diagnostic_stride = 1;
  long max_steps = 10'000'000;
};

void validate(const IntegratorConfig& config);

struct StepDiagnostics {
  std::size_t step = 0;  // index into Trajectory::times
  double t = 0.0;
  double J = 0.0;
  double J_raw = 0.0;
  Eigen::VectorXd quantities;
  double condition_M = 0.0;
  double condition_C = 0.0;
  double constraint_violation = 0.0;
};

struct Trajectory {
  std::vector<std::string> labels;
  std::vector<std::string> quantity_names;
  bool constrained = false;

  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> rates;
  std::vector<StepDiagnostics> diagnostics;
  OdeStats stats;

  std::size_t size() const { return times.size(); }
  const Eigen::VectorXd& final_state() const { return states.back(); }

  // Cubic Hermite interpolation of q(t) between stored steps.
  Eigen::VectorXd state_at(double t) const;

  // max over diagnostics of |I_k(t) - I_k(0)| / |I_k(0)|, per quantity.
  Eigen::VectorXd max_relative_drift() const;
  double max_constraint_violation() const;
};

// Thrown when a step fails; carries everything integrated up to the failure.
class IntegrationAborted : public Error {
 public:
  IntegrationAborted(const Error& cause, Trajectory partial)
      : Error(cause.category(), cause.what()), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

template <typename Scalar>
struct RonsProblem {
  std::shared_ptr<const AnsatzFamily<Scalar>> family;
  ModelPtr<Scalar> model;
  RuleProvider rules;
  QuantityList<Scalar> quantities;  // always monitored
  bool enforce_constraints = false;
  AssemblyOptions assembly;

  ReducedSystem<Scalar> assemble_at(const ParameterVector& q) const {
    return assemble(*family, q, *model, rules.rule_for(*family, q), quantities,
                    enforce_constraints, assembly);
  }
};

template <typename Scalar>
Trajectory integrate(const RonsProblem<Scalar>& problem, const ParameterVector& q0,
                     const IntegratorConfig& config);

// Samples u(., q(t)) with q(t) interpolated from the trajectory.
template <typename Scalar>
Field<Scalar> dense_eval(const Trajectory& trajectory, const AnsatzFamily<Scalar>& family,
                         const QuadratureRule& rule, double t);

}  // namespace rons

#endif  // RONS_INTEGRATE_HPP
