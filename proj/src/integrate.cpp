#include "rons/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace rons {

namespace {
using cplx = std::complex<double>;
}

void validate(const IntegratorConfig& c) {
  if (!(c.t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (c.scheme == Scheme::kRk4Fixed && !(c.dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(c.rtol > 0.0) || !(c.atol > 0.0)) throw ValidationError("rtol and atol must be positive");
  if (c.diagnostic_stride < 1) throw ValidationError("diagnostic stride must be at least 1");
}

Eigen::VectorXd Trajectory::state_at(double t) const {
  if (times.empty()) throw ValidationError("empty trajectory");
  if (t < times.front() || t > times.back()) {
    throw ValidationError("time " + std::to_string(t) + " outside trajectory range [" +
                          std::to_string(times.front()) + ", " + std::to_string(times.back()) + "]");
  }
  auto it = std::lower_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  if (*it == t) return states[i];
  return hermite_interpolate(t, times[i - 1], states[i - 1], rates[i - 1], times[i], states[i],
                             rates[i]);
}

Eigen::VectorXd Trajectory::max_relative_drift() const {
  if (diagnostics.empty()) return {};
  const Eigen::VectorXd& ref = diagnostics.front().quantities;
  Eigen::VectorXd drift = Eigen::VectorXd::Zero(ref.size());
  for (const auto& d : diagnostics) {
    for (Eigen::Index k = 0; k < ref.size(); ++k) {
      const double denom = std::abs(ref(k)) > 0.0 ? std::abs(ref(k)) : 1.0;
      drift(k) = std::max(drift(k), std::abs(d.quantities(k) - ref(k)) / denom);
    }
  }
  return drift;
}

double Trajectory::max_constraint_violation() const {
  double v = 0.0;
  for (const auto& d : diagnostics) v = std::max(v, d.constraint_violation);
  return v;
}

template <typename Scalar>
Trajectory integrate(const RonsProblem<Scalar>& problem, const ParameterVector& q0,
                     const IntegratorConfig& config) {
  validate(config);
  if (!problem.family || !problem.model) throw ValidationError("problem needs a family and a model");
  const auto& family = *problem.family;
  family.require_domain(q0);

  Trajectory traj;
  traj.labels = family.parameter_labels();
  for (const auto& qty : problem.quantities) traj.quantity_names.push_back(qty->name());
  traj.constrained = problem.enforce_constraints && !problem.quantities.empty();

  // The last assembled system, reused when the integrator asks for the
  // same state again (FSAL stage, diagnostics).
  std::optional<ReducedSystem<Scalar>> cache;
  auto system_at = [&](const Eigen::VectorXd& q) -> const ReducedSystem<Scalar>& {
    if (!cache || cache->q.size() != q.size() || cache->q != q) cache = problem.assemble_at(q);
    return *cache;
  };

  OdeRhs rhs = [&](double, const Eigen::VectorXd& q) -> Eigen::VectorXd {
    family.require_domain(q);
    return system_at(q).rate;
  };

  std::size_t step = 0;
  OdeObserver observer = [&](double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
    traj.times.push_back(t);
    traj.states.push_back(q);
    traj.rates.push_back(qdot);
    if (step % config.diagnostic_stride == 0 || t >= config.t_end) {
      const auto& sys = system_at(q);
      const ResidualReport rep = residual(sys, sys.rate);
      StepDiagnostics d;
      d.step = traj.times.size() - 1;
      d.t = t;
      d.J = rep.J;
      d.J_raw = rep.J_raw;
      d.quantities = sys.quantity_values;
      d.condition_M = rep.condition_M;
      d.condition_C = rep.condition_C;
      d.constraint_violation = sys.constraint_violation;
      traj.diagnostics.push_back(std::move(d));
    }
    ++step;
    return true;
  };

  OdeOptions opts;
  opts.scheme = config.scheme;
  opts.t0 = 0.0;
  opts.t_end = config.t_end;
  opts.dt = config.scheme == Scheme::kRk4Fixed ? config.dt : 0.0;
  opts.rtol = config.rtol;
  opts.atol = config.atol;
  opts.max_dt = config.max_dt;
  opts.max_steps = config.max_steps;
  try {
    traj.stats = solve_ode(rhs, q0, opts, observer);
  } catch (const Error& e) {
    throw IntegrationAborted(e, std::move(traj));
  }
  return traj;
}

template <typename Scalar>
Field<Scalar> dense_eval(const Trajectory& trajectory, const AnsatzFamily<Scalar>& family,
                         const QuadratureRule& rule, double t) {
  return sample(family, trajectory.state_at(t), rule);
}

template Trajectory integrate(const RonsProblem<double>&, const ParameterVector&,
                              const IntegratorConfig&);
template Trajectory integrate(const RonsProblem<cplx>&, const ParameterVector&,
                              const IntegratorConfig&);
template Field<double> dense_eval(const Trajectory&, const AnsatzFamily<double>&,
                                  const QuadratureRule&, double);
template Field<cplx> dense_eval(const Trajectory&, const AnsatzFamily<cplx>&, const QuadratureRule&,
                                double);

}  // namespace rons
