#include "rons/engine.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace rons {

namespace {

using cplx = std::complex<double>;

// Node counts are rounded up to a geometric ladder (ratio 2^(1/8)) so a
// slowly growing box reuses cached Gauss-Legendre orders.
int nodes_for(double width, const RuleProvider::Tracking& t, double finest) {
  const double wanted = std::max<double>(
      t.min_nodes, std::ceil(std::numbers::pi * width / (2.0 * t.spacing * finest)));
  double n = t.min_nodes;
  while (n < wanted) n *= std::exp2(0.125);
  return static_cast<int>(std::ceil(n));
}

double asymmetry(const Eigen::MatrixXd& A) {
  const double scale = A.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (A - A.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
}

double llt_condition(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::VectorXd d = llt.matrixLLT().diagonal().cwiseAbs();
  if (d.size() == 0) return 0.0;
  const double lo = d.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = d.maxCoeff() / lo;
  return ratio * ratio;
}

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite() &&
         (llt.matrixLLT().diagonal().array() > 0.0).all();
}

std::string format_q(const ParameterVector& q) {
  std::ostringstream os;
  os.precision(10);
  os << "(";
  for (Eigen::Index i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q(i);
  os << ")";
  return os.str();
}

}  // namespace

RuleProvider RuleProvider::fixed(QuadratureRule rule) {
  RuleProvider p;
  p.fixed_ = std::make_shared<const QuadratureRule>(std::move(rule));
  return p;
}

RuleProvider RuleProvider::tracking(Tracking options) {
  if (!(options.margin > 0.0) || !(options.spacing > 0.0) || options.min_nodes < 2) {
    throw ValidationError("invalid tracking rule options");
  }
  RuleProvider p;
  p.tracking_ = options;
  return p;
}

std::shared_ptr<const QuadratureRule> RuleProvider::tracking_rule(const SupportBox& box) const {
  const double pad = tracking_.margin * box.length_scale;
  if (box.lower.size() == 1) {
    const double half = 0.5 * (box.upper(0) - box.lower(0)) + pad;
    const int n = nodes_for(2.0 * half, tracking_, box.finest_scale);
    return std::make_shared<const QuadratureRule>(
        make_rule(RealLine{half, 0.5 * (box.upper(0) + box.lower(0))}, n));
  }
  Plane plane;
  plane.half_width_x = 0.5 * (box.upper(0) - box.lower(0)) + pad;
  plane.half_width_y = 0.5 * (box.upper(1) - box.lower(1)) + pad;
  plane.center = 0.5 * (box.upper + box.lower).head<2>();
  const int nx = nodes_for(2.0 * plane.half_width_x, tracking_, box.finest_scale);
  const int ny = nodes_for(2.0 * plane.half_width_y, tracking_, box.finest_scale);
  return std::make_shared<const QuadratureRule>(make_plane_rule(plane, nx, ny));
}

double MetricTensor::condition_estimate() const { return llt_condition(factor); }

double ConstraintSystem::condition_estimate() const { return llt_condition(factor); }

template <typename Scalar>
ReducedSystem<Scalar> assemble(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                               const PdeModel<Scalar>& model,
                               std::shared_ptr<const QuadratureRule> rule,
                               const QuantityList<Scalar>& quantities, bool enforce_constraints,
                               const AssemblyOptions& options) {
  family.require_domain(q);
  ReducedSystem<Scalar> sys;
  sys.q = q;
  sys.rule = rule;
  const Points& x = rule->nodes();

  sys.tangents = model.state_tangents(family, q, x);
  sys.rhs = model.rhs(family, q, x);

  Eigen::MatrixXd M = gram(sys.tangents, sys.tangents, *rule);
  if (asymmetry(M) > options.symmetry_tolerance) {
    sys.warnings.push_back("metric tensor asymmetry above tolerance");
  }
  M = 0.5 * (M + M.transpose()).eval();
  if (options.jitter > 0.0) {
    M.diagonal().array() += options.jitter * M.diagonal().mean();
    sys.warnings.push_back("Tikhonov jitter applied to metric tensor");
  }
  sys.metric.entries = M;
  sys.metric.factor.compute(M);
  if (!factor_ok(sys.metric.factor)) {
    throw ImmersionError(family.name() + ": metric tensor is not positive definite at q = " +
                         format_q(q));
  }
  sys.forcing = project(sys.tangents, sys.rhs, *rule);
  sys.unconstrained_rate = sys.metric.factor.solve(sys.forcing);
  sys.rate = sys.unconstrained_rate;

  const auto m = static_cast<Eigen::Index>(quantities.size());
  sys.quantity_values.resize(m);
  sys.quantity_gradients.resize(q.size(), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    sys.quantity_values(k) = quantities[k]->value(family, q, *rule);
    sys.quantity_gradients.col(k) = quantities[k]->gradient(family, q, *rule);
  }

  if (enforce_constraints && m > 0) {
    ConstraintSystem cs;
    cs.gradients = sys.quantity_gradients;
    cs.metric_inverse_gradients = sys.metric.factor.solve(cs.gradients);
    Eigen::MatrixXd C = cs.gradients.transpose() * cs.metric_inverse_gradients;
    if (asymmetry(C) > options.symmetry_tolerance) {
      sys.warnings.push_back("constraint matrix asymmetry above tolerance");
    }
    cs.matrix = 0.5 * (C + C.transpose());
    cs.factor.compute(cs.matrix);
    if (!factor_ok(cs.factor)) {
      throw DependentConstraintsError("constraint gradients are linearly dependent at q = " +
                                      format_q(q));
    }
    cs.b = cs.gradients.transpose() * sys.unconstrained_rate;
    cs.lambda = cs.factor.solve(cs.b);
    Eigen::VectorXd rate = sys.unconstrained_rate - cs.metric_inverse_gradients * cs.lambda;
    // One refinement pass removes the rounding left in B^T qdot.
    rate -= cs.metric_inverse_gradients * cs.factor.solve(cs.gradients.transpose() * rate);
    sys.rate = rate;

    const double rate_norm = rate.norm();
    for (Eigen::Index k = 0; k < m; ++k) {
      const double scale = cs.gradients.col(k).norm() * rate_norm;
      if (scale > 0.0) {
        sys.constraint_violation =
            std::max(sys.constraint_violation, std::abs(cs.gradients.col(k).dot(rate)) / scale);
      }
    }
    if (sys.constraint_violation > options.orthogonality_tolerance) {
      sys.warnings.push_back("constrained rate not orthogonal to constraint gradients");
    }
    sys.constraints = std::move(cs);
  }
  return sys;
}

template <typename Scalar>
ResidualReport residual(const ReducedSystem<Scalar>& system, const Eigen::VectorXd& qdot) {
  if (qdot.size() != system.tangents.cols()) throw AlignmentError("qdot length mismatch");
  const Field<Scalar> gap = system.tangents * qdot.cast<Scalar>() - system.rhs;
  ResidualReport r;
  r.J = 0.5 * norm_sq(gap, *system.rule);
  r.J_raw = 0.5 * norm_sq(system.rhs, *system.rule);
  r.condition_M = system.metric.condition_estimate();
  r.condition_C = system.constraints ? system.constraints->condition_estimate() : 0.0;
  return r;
}

template <typename Scalar>
FitResult fit_initial(const AnsatzFamily<Scalar>& family, const Field<Scalar>& u0,
                      const QuadratureRule& rule, const ParameterVector& q_guess,
                      const FitOptions& options) {
  family.require_domain(q_guess);
  if (u0.size() != rule.size()) throw AlignmentError("initial field does not match rule");
  const Points& x = rule.nodes();

  auto objective = [&](const ParameterVector& q) {
    return 0.5 * norm_sq(Field<Scalar>(u0 - family.evaluate(x, q)), rule);
  };

  auto solve_from = [&](ParameterVector q) {
    FitResult res{q, 0.0, 0.0, 0, false};
    double phi = objective(q);
    double mu = options.initial_damping;
    int it = 0;
    double gnorm = 0.0;
    for (; it < options.max_iterations; ++it) {
      const Field<Scalar> r = u0 - family.evaluate(x, q);
      const auto T = family.tangents(x, q);
      const Eigen::MatrixXd H = gram(T, T, rule);
      const Eigen::VectorXd g = project(T, r, rule);
      gnorm = g.norm();
      if (gnorm <= options.gradient_tolerance * std::max(1.0, norm_sq(u0, rule))) {
        res.converged = true;
        break;
      }
      bool accepted = false;
      Eigen::VectorXd step;
      for (int tries = 0; tries < 60; ++tries) {
        Eigen::MatrixXd A = H;
        A.diagonal() += mu * H.diagonal().cwiseMax(1e-300);
        step = A.ldlt().solve(g);
        const ParameterVector trial = q + step;
        if (step.allFinite() && family.in_domain(trial)) {
          const double phi_trial = objective(trial);
          if (phi_trial <= phi) {
            q = trial;
            phi = phi_trial;
            mu = std::max(mu / 3.0, 1e-12);
            accepted = true;
            break;
          }
        }
        mu *= 4.0;
      }
      if (!accepted) break;
      if (step.norm() <= options.step_tolerance * (1.0 + q.norm())) {
        res.converged = true;
        ++it;
        break;
      }
    }
    res.q = q;
    res.residual_norm = std::sqrt(2.0 * phi);
    res.gradient_norm = gnorm;
    res.iterations = it;
    return res;
  };

  FitResult best = solve_from(q_guess);
  std::mt19937 rng(options.seed);
  std::normal_distribution<double> normal(0.0, options.restart_spread);
  for (int s = 1; s < options.starts; ++s) {
    ParameterVector guess = q_guess;
    for (Eigen::Index i = 0; i < guess.size(); ++i) {
      guess(i) *= 1.0 + normal(rng);
    }
    if (!family.in_domain(guess)) continue;
    FitResult candidate = solve_from(guess);
    if (candidate.converged && (!best.converged || candidate.residual_norm < best.residual_norm)) {
      best = candidate;
    }
  }
  if (!best.converged) {
    throw FitError("initial fit did not converge after " + std::to_string(best.iterations) +
                       " iterations",
                   best.q, best.residual_norm);
  }
  return best;
}

template ReducedSystem<double> assemble(const AnsatzFamily<double>&, const ParameterVector&,
                                        const PdeModel<double>&, std::shared_ptr<const QuadratureRule>,
                                        const QuantityList<double>&, bool, const AssemblyOptions&);
template ReducedSystem<cplx> assemble(const AnsatzFamily<cplx>&, const ParameterVector&,
                                      const PdeModel<cplx>&, std::shared_ptr<const QuadratureRule>,
                                      const QuantityList<cplx>&, bool, const AssemblyOptions&);
template ResidualReport residual(const ReducedSystem<double>&, const Eigen::VectorXd&);
template ResidualReport residual(const ReducedSystem<cplx>&, const Eigen::VectorXd&);
template FitResult fit_initial(const AnsatzFamily<double>&, const Field<double>&,
                               const QuadratureRule&, const ParameterVector&, const FitOptions&);
template FitResult fit_initial(const AnsatzFamily<cplx>&, const Field<cplx>&, const QuadratureRule&,
                               const ParameterVector&, const FitOptions&);

}  // namespace rons
