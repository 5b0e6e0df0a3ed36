#ifndef RONS_ENGINE_HPP
#define RONS_ENGINE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "rons/ansatz.hpp"
#include "rons/models.hpp"

namespace rons {

// Chooses the quadrature rule used at a given parameter vector: either a
// fixed rule, or a Gauss-Legendre box that follows the ansatz support.
class RuleProvider {
 public:
  struct Tracking {
    // Half-width padding around the support box, in units of the largest length scale.
    double margin = 6.0;
    // Target node spacing at the box centre, in units of the finest length scale.
    double spacing = 0.25;
    int min_nodes = 16;
  };

  static RuleProvider fixed(QuadratureRule rule);
  static RuleProvider tracking(Tracking options);
  static RuleProvider tracking() { return tracking(Tracking{}); }

  template <typename Scalar>
  std::shared_ptr<const QuadratureRule> rule_for(const AnsatzFamily<Scalar>& family,
                                                 const ParameterVector& q) const {
    if (fixed_) return fixed_;
    auto box = family.support(q);
    if (!box) throw ValidationError(family.name() + " has no support box; use a fixed rule");
    return tracking_rule(*box);
  }

  bool is_fixed() const { return static_cast<bool>(fixed_); }

 private:
  std::shared_ptr<const QuadratureRule> tracking_rule(const SupportBox& box) const;

  std::shared_ptr<const QuadratureRule> fixed_;
  Tracking tracking_;
};

struct AssemblyOptions {
  // Opt-in Tikhonov regularization: M + jitter * mean(diag M) * I. Off by default.
  double jitter = 0.0;
  // Relative asymmetry of M or C above which a warning is recorded.
  double symmetry_tolerance = 1e-10;
  // Relative size of <grad I_k, qdot> above which a warning is recorded.
  double orthogonality_tolerance = 1e-9;
};

struct MetricTensor {
  Eigen::MatrixXd entries;
  Eigen::LLT<Eigen::MatrixXd> factor;

  // (max L_ii / min L_ii)^2 from the Cholesky factor.
  double condition_estimate() const;
};

struct ConstraintSystem {
  Eigen::MatrixXd gradients;  // B = (grad I_1 | ... | grad I_m), n x m
  Eigen::MatrixXd metric_inverse_gradients;  // M^-1 B
  Eigen::MatrixXd matrix;  // C = B^T M^-1 B
  Eigen::LLT<Eigen::MatrixXd> factor;
  Eigen::VectorXd b;
  Eigen::VectorXd lambda;

  double condition_estimate() const;
};

// Everything the reduced equation needs at one parameter vector.
template <typename Scalar>
struct ReducedSystem {
  ParameterVector q;
  MetricTensor metric;
  Eigen::VectorXd forcing;  // f_i = <du/dq_i, F(u)>
  std::optional<ConstraintSystem> constraints;

  // Values of every supplied quantity, enforced or not.
  Eigen::VectorXd quantity_values;
  // Gradients of every supplied quantity, one column each.
  Eigen::MatrixXd quantity_gradients;

  Eigen::VectorXd unconstrained_rate;  // M^-1 f
  Eigen::VectorXd rate;                // with the multiplier correction when constrained
  double constraint_violation = 0.0;   // max_k |<grad I_k, qdot>| / (|grad I_k| |qdot|)

  // Fields kept for residual evaluation.
  FieldMatrix<Scalar> tangents;
  Field<Scalar> rhs;
  std::shared_ptr<const QuadratureRule> rule;

  std::vector<std::string> warnings;
};

struct ResidualReport {
  double J;      // 1/2 |sum_i du/dq_i qdot_i - F(u)|^2
  double J_raw;  // 1/2 |F(u)|^2
  double condition_M;
  double condition_C;  // 0 without constraints
};

// Assembles M and f on the rule; with enforce_constraints, also B, C, b and
// the multipliers. All quantities are evaluated for monitoring either way.
template <typename Scalar>
ReducedSystem<Scalar> assemble(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                               const PdeModel<Scalar>& model,
                               std::shared_ptr<const QuadratureRule> rule,
                               const QuantityList<Scalar>& quantities, bool enforce_constraints,
                               const AssemblyOptions& options = {});

// Convenience overload: every supplied quantity is enforced.
template <typename Scalar>
ReducedSystem<Scalar> assemble(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                               const PdeModel<Scalar>& model, const QuadratureRule& rule,
                               const QuantityList<Scalar>& quantities = {},
                               const AssemblyOptions& options = {}) {
  return assemble(family, q, model, std::make_shared<const QuadratureRule>(rule), quantities,
                  !quantities.empty(), options);
}

// qdot = M^-1 [f - sum_k lambda_k grad I_k].
template <typename Scalar>
const Eigen::VectorXd& reduced_rhs(const ReducedSystem<Scalar>& system) {
  return system.rate;
}

template <typename Scalar>
ResidualReport residual(const ReducedSystem<Scalar>& system, const Eigen::VectorXd& qdot);

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-13;
  double gradient_tolerance = 1e-15;
  double initial_damping = 1e-3;
  int starts = 1;
  // Relative perturbation applied to the guess for starts beyond the first.
  double restart_spread = 0.2;
  unsigned seed = 12345;
};

struct FitResult {
  ParameterVector q;
  double residual_norm;  // |u0 - u(q)|
  double gradient_norm;
  int iterations;
  bool converged;
};

// Closest point on the ansatz manifold to u0 by damped Gauss-Newton.
template <typename Scalar>
FitResult fit_initial(const AnsatzFamily<Scalar>& family, const Field<Scalar>& u0,
                      const QuadratureRule& rule, const ParameterVector& q_guess,
                      const FitOptions& options = {});

}  // namespace rons

#endif  // RONS_ENGINE_HPP
