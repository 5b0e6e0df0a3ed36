#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include "internal.hpp"
#include "rons/families.hpp"
#include "rons/oracles.hpp"

namespace rons::cli::detail {
namespace {

// L u = -sum_k lambda_k <u_k, u> u_k for orthonormal modes u_k. On the
// linear-modes ansatz <u_k, u> is the coefficient q_k itself.
class ModalDecay final : public PdeModel<double> {
 public:
  ModalDecay(Eigen::VectorXd lambdas, std::shared_ptr<const LinearModes> modes)
      : lambdas_(std::move(lambdas)), modes_(std::move(modes)) {}
  std::string name() const override { return "modal-decay"; }
  RealField rhs(const RealFamily&, const ParameterVector& q, const Points& x) const override {
    return -modes_->sample_modes(x) * lambdas_.cwiseProduct(q);
  }

 private:
  Eigen::VectorXd lambdas_;
  std::shared_ptr<const LinearModes> modes_;
};

Eigen::VectorXd positive_rates(const std::vector<double>& values, const char* key) {
  if (values.empty()) throw ValidationError(std::string(key) + " must not be empty");
  for (double v : values) {
    if (!(v > 0.0)) throw ValidationError(std::string(key) + " must be positive");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Shortest round-trip form, so 0.7 gives "0p7".
std::string lambda_tag(double lambda) {
  char buffer[32];
  const auto end = std::to_chars(buffer, buffer + sizeof buffer, lambda).ptr;
  std::string s(buffer, end);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

struct ElSummary {
  Json rates = Json::array();
  Json errors = Json::array();
  double worst = 0.0;
};

// Euler-Lagrange runs, one per rate, with qdot(0) = slope * lambda.
ElSummary euler_lagrange(RunContext& ctx, const Eigen::VectorXd& lambdas, double slope,
                         double horizon, const std::string& series_prefix) {
  ElSummary out;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    const double lambda = lambdas(k);
    InstabilityOptions o;
    o.t_end = horizon / lambda;
    o.rtol = ctx.number("rtol");
    o.atol = ctx.number("atol");
    o.fit_fraction = ctx.number("fit_fraction");
    const InstabilityResult res = finite_time_instability(Eigen::VectorXd::Constant(1, lambda), Eigen::VectorXd::Ones(1),
                                                          Eigen::VectorXd::Constant(1, slope * lambda), o);
    const double rate = res.fitted_rates(0);
    out.rates.push_back(rate);
    out.errors.push_back(std::abs(rate - lambda) / lambda);
    out.worst = std::max(out.worst, std::abs(rate - lambda) / lambda);
    if (series_prefix.empty()) continue;
    std::vector<Row> rows;
    for (std::size_t i = 0; i < res.times.size(); ++i) rows.push_back({res.times[i], res.q[i](0), res.qdot[i](0)});
    ctx.write_series(series_prefix + "_lambda_" + lambda_tag(lambda),
                     series_prefix + "_lambda_" + lambda_tag(lambda) + ".csv", {"t", "q", "qdot"}, rows);
  }
  return out;
}

}  // namespace

void run_advdiff_exact(RunContext& ctx) {
  const double A0 = ctx.number("A0"), L0 = ctx.number("L0"), phi0 = ctx.number("phi0");
  const double c = ctx.number("c"), nu = ctx.number("nu");
  if (!(L0 > 0.0)) throw ValidationError("L0 must be positive");
  RonsProblem<double> p;
  p.family = std::make_shared<SineWave>();
  p.model = advection_diffusion(c, nu);
  const QuadratureRule rule =
      make_rule(PeriodicInterval{2.0 * std::numbers::pi * L0}, static_cast<int>(ctx.integer("quadrature_nodes")));
  p.rules = RuleProvider::fixed(rule);
  p.assembly = ctx.assembly();
  const Trajectory traj = integrate(p, Eigen::Vector3d(A0, L0, phi0), ctx.integrator());
  ctx.write_trajectory("trajectory", "trajectory.csv", traj);
  record_trajectory_metrics(ctx, traj);

  auto exact_A = [&](double t) { return A0 * std::exp(-nu * t / (L0 * L0)); };
  auto exact_phi = [&](double t) { return phi0 - c * t / L0; };
  const double T = traj.times.back();
  // Phase errors are measured against the largest phase reached.
  const double phi_scale = std::max(std::abs(phi0), std::abs(exact_phi(T)));
  double eA = 0.0, eL = 0.0, ephi = 0.0, Ldot = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const Eigen::VectorXd& q = traj.states[i];
    eA = std::max(eA, std::abs(q(0) - exact_A(t)) / std::abs(A0));
    eL = std::max(eL, std::abs(q(1) - L0) / L0);
    ephi = std::max(ephi, std::abs(q(2) - exact_phi(t)));
    Ldot = std::max(Ldot, std::abs(traj.rates[i](1)));
  }
  Json& m = ctx.metrics();
  m["max_relative_error_A"] = eA;
  m["max_relative_error_L"] = eL;
  m["max_relative_error_phi"] = phi_scale > 0.0 ? Json(ephi / phi_scale) : Json(ephi);
  m["max_abs_Ldot"] = Ldot;

  std::vector<Row> amplitude;
  for (double t : sample_times(T, ctx.number("series_dt"))) amplitude.push_back({t, traj.state_at(t)(0), exact_A(t)});
  ctx.write_series("amplitude", "amplitude.csv", {"t", "A", "A_exact"}, amplitude);

  const long n = ctx.integer("field_points"), count = ctx.integer("snapshot_count");
  if (n < 2 || count < 1) throw ValidationError("field_points >= 2 and snapshot_count >= 1 required");
  Points x(n, 1);
  for (long i = 0; i < n; ++i) x(i, 0) = 2.0 * std::numbers::pi * L0 * static_cast<double>(i) / static_cast<double>(n);
  std::vector<Row> fields;
  double field_error = 0.0;
  for (long k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : T * static_cast<double>(k) / static_cast<double>(count - 1);
    const RealField u = p.family->evaluate(x, traj.state_at(t));
    for (long i = 0; i < n; ++i) {
      // The exact solution is written with phi0 folded into x.
      const double exact = exact_advdiff(A0, L0, c, nu, x(i, 0) + phi0 * L0, t);
      field_error = std::max(field_error, std::abs(u(i) - exact) / std::abs(A0));
      fields.push_back({t, x(i, 0), u(i), exact});
    }
  }
  ctx.write_file("fields", "fields.csv", {"t", "x", "u", "u_exact"}, fields);
  m["max_relative_field_error"] = field_error;
}

void run_galerkin_equivalence(RunContext& ctx) {
  const long n = ctx.integer("modes"), states = ctx.integer("states");
  if (n < 1 || states < 1) throw ValidationError("modes and states must be positive");
  const double period = ctx.number("period");
  if (!(period > 0.0)) throw ValidationError("period must be positive");
  auto modes = std::make_shared<LinearModes>(fourier_modes(static_cast<int>(n), period));
  const auto model = advection_diffusion(ctx.number("c"), ctx.number("nu"));
  const QuadratureRule rule = make_rule(PeriodicInterval{period}, static_cast<int>(ctx.integer("quadrature_nodes")));

  std::mt19937_64 rng(static_cast<std::uint64_t>(ctx.integer("seed")));
  std::normal_distribution<double> normal;
  double gap = 0.0, relative = 0.0, identity = 0.0;
  for (long s = 0; s < states; ++s) {
    Eigen::VectorXd q(n);
    for (long i = 0; i < n; ++i) q(i) = normal(rng);
    const Eigen::VectorXd g = galerkin_rhs(*modes, q, *model, rule);
    const auto sys = assemble(*modes, q, *model, rule);
    const double d = (g - reduced_rhs(sys)).cwiseAbs().maxCoeff();
    gap = std::max(gap, d);
    relative = std::max(relative, d / std::max(1.0, g.cwiseAbs().maxCoeff()));
    identity = std::max(identity, (sys.metric.entries - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  Json& m = ctx.metrics();
  m["states_checked"] = states;
  m["max_rhs_gap"] = gap;
  m["max_rhs_gap_relative"] = relative;
  m["max_metric_identity_gap"] = identity;

  // One RONS trajectory against the Galerkin ODE integrated with the same tolerances.
  Eigen::VectorXd q0(n);
  for (long i = 0; i < n; ++i) q0(i) = normal(rng);
  RonsProblem<double> p;
  p.family = modes;
  p.model = model;
  p.rules = RuleProvider::fixed(rule);
  p.assembly = ctx.assembly();
  const IntegratorConfig config = ctx.integrator();
  const Trajectory traj = integrate(p, q0, config);
  ctx.write_trajectory("trajectory", "trajectory.csv", traj);
  record_trajectory_metrics(ctx, traj);

  OdeOptions o;
  o.scheme = config.scheme;
  o.dt = config.dt;
  o.rtol = config.rtol;
  o.atol = config.atol;
  o.t_end = config.t_end;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> galerkin;
  solve_ode([&](double, const Eigen::VectorXd& q) { return galerkin_rhs(*modes, q, *model, rule); }, q0, o,
            [&](double t, const Eigen::VectorXd& q, const Eigen::VectorXd&) {
              times.push_back(t);
              galerkin.push_back(q);
              return true;
            });
  double traj_gap = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    traj_gap = std::max(traj_gap, (traj.state_at(times[i]) - galerkin[i]).cwiseAbs().maxCoeff());
  }
  m["trajectory_gap"] = traj_gap;
}

void run_appendix_instability(RunContext& ctx) {
  const Eigen::VectorXd lambdas = positive_rates(ctx.numbers("lambdas"), "lambdas");
  const Eigen::VectorXd extra = ctx.numbers("extra_lambdas").empty()
                                    ? Eigen::VectorXd()
                                    : positive_rates(ctx.numbers("extra_lambdas"), "extra_lambdas");
  Json& m = ctx.metrics();
  m["lambdas"] = ctx.numbers("lambdas");

  const ElSummary generic = euler_lagrange(ctx, lambdas, 0.0, ctx.number("generic_horizon"), "el_generic");
  m["el_generic_rates"] = generic.rates;
  m["el_generic_relative_errors"] = generic.errors;
  m["el_generic_max_relative_error"] = generic.worst;

  const ElSummary stable = euler_lagrange(ctx, lambdas, -1.0, ctx.number("stable_horizon"), "el_stable");
  m["el_stable_rates"] = stable.rates;
  m["el_stable_relative_errors"] = stable.errors;
  m["el_stable_max_relative_error"] = stable.worst;

  if (extra.size() > 0) {
    const ElSummary more = euler_lagrange(ctx, extra, -1.0, ctx.number("stable_horizon"), "el_stable");
    m["extra_lambdas"] = ctx.numbers("extra_lambdas");
    m["extra_el_stable_rates"] = more.rates;
    m["extra_el_stable_relative_errors"] = more.errors;
    m["extra_el_stable_max_relative_error"] = more.worst;
  }

  // RONS on the orthonormal sine modes of [0, 2 pi), which for a linear
  // ansatz is the Galerkin system qdot_k = -lambda_k q_k.
  const Eigen::Index n = lambdas.size();
  std::vector<double> wavenumbers;
  for (Eigen::Index k = 1; k <= n; ++k) wavenumbers.push_back(static_cast<double>(k));
  auto modes = std::make_shared<LinearModes>(sine_modes(wavenumbers, 2.0 * std::numbers::pi));
  const QuadratureRule rule =
      make_rule(PeriodicInterval{2.0 * std::numbers::pi}, static_cast<int>(ctx.integer("quadrature_nodes")));
  RonsProblem<double> p;
  p.family = modes;
  p.model = std::make_shared<ModalDecay>(lambdas, modes);
  p.rules = RuleProvider::fixed(rule);
  p.assembly = ctx.assembly();
  IntegratorConfig config = ctx.integrator();
  config.t_end = ctx.number("decay_horizon") / lambdas.maxCoeff();
  const Trajectory traj = integrate(p, Eigen::VectorXd::Ones(n), config);
  ctx.write_trajectory("trajectory", "trajectory.csv", traj);
  record_trajectory_metrics(ctx, traj);

  const double t_from = (1.0 - ctx.number("fit_fraction")) * config.t_end;
  Json rates = Json::array(), errors = Json::array();
  double worst = 0.0, rhs_gap = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<double> values;
    for (const auto& q : traj.states) values.push_back(q(k));
    const double rate = fit_log_growth(traj.times, values, t_from);
    rates.push_back(rate);
    errors.push_back(std::abs(rate + lambdas(k)) / lambdas(k));
    worst = std::max(worst, std::abs(rate + lambdas(k)) / lambdas(k));
  }
  for (const auto& q : traj.states) {
    const Eigen::VectorXd g = galerkin_rhs(*modes, q, *p.model, rule);
    rhs_gap = std::max(rhs_gap, (g + lambdas.cwiseProduct(q)).cwiseAbs().maxCoeff() / q.cwiseAbs().maxCoeff());
  }
  m["galerkin_rates"] = rates;
  m["galerkin_relative_errors"] = errors;
  m["galerkin_max_relative_error"] = worst;
  m["galerkin_rhs_relative_gap"] = rhs_gap;
}

}  // namespace rons::cli::detail
