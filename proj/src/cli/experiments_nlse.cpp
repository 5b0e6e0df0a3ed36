#include <cmath>
#include <complex>

#include "internal.hpp"
#include "rons/families.hpp"
#include "rons/oracles.hpp"

namespace rons::cli::detail {
namespace {

using cplx = std::complex<double>;

RonsProblem<cplx> nlse_problem(const RunContext& ctx, bool enforce) {
  RonsProblem<cplx> p;
  p.family = std::make_shared<NlseGaussian>();
  p.model = nlse();
  p.rules = ctx.tracking_rules();
  const std::string invariants = ctx.text("invariants");
  if (invariants == "closed-form") {
    p.quantities = nlse_invariants();
  } else if (invariants == "quadrature") {
    p.quantities = nlse_invariants_quadrature();
  } else {
    throw ValidationError("invariants must be \"closed-form\" or \"quadrature\"");
  }
  p.enforce_constraints = enforce;
  p.assembly = ctx.assembly();
  return p;
}

ParameterVector initial_state(const RunContext& ctx) {
  return Eigen::Vector4d(ctx.number("A0"), ctx.number("L0"), ctx.number("V0"), ctx.number("phi0"));
}

double origin_amplitude(const ComplexFamily& family, const ParameterVector& q) {
  return std::abs(family.evaluate(Points::Zero(1, 1), q)(0));
}

std::vector<double> snapshot_times(const RunContext& ctx, double t_end) {
  const long count = ctx.integer("snapshot_count");
  if (count < 1) throw ValidationError("snapshot_count must be at least 1");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) {
    out.push_back(count == 1 ? 0.0 : t_end * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

Points field_grid(const RunContext& ctx) {
  const long n = ctx.integer("field_points");
  const double half = ctx.number("field_half_width");
  if (n < 2 || !(half > 0.0)) throw ValidationError("field_points >= 2 and field_half_width > 0 required");
  Points x(n, 1);
  for (long i = 0; i < n; ++i) x(i, 0) = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

// |u(0, t)| sampled uniformly from the dense trajectory.
std::vector<Row> origin_series(const Trajectory& traj, const ComplexFamily& family, double dt) {
  std::vector<Row> rows;
  for (double t : sample_times(traj.times.back(), dt)) rows.push_back({t, origin_amplitude(family, traj.state_at(t))});
  return rows;
}

void write_fields(RunContext& ctx, const Trajectory& traj, const ComplexFamily& family) {
  const Points x = field_grid(ctx);
  std::vector<Row> rows;
  for (double t : snapshot_times(ctx, traj.times.back())) {
    const ComplexField u = family.evaluate(x, traj.state_at(t));
    for (Eigen::Index i = 0; i < x.rows(); ++i) rows.push_back({t, x(i, 0), u(i).real(), u(i).imag(), std::abs(u(i))});
  }
  ctx.write_file("fields", "fields.csv", {"t", "x", "u_re", "u_im", "abs_u"}, rows);
}

struct Peak {
  double value = -1.0;
  double time = 0.0;
};

Peak peak_of(const std::vector<Row>& series) {
  Peak p;
  for (const Row& r : series) {
    if (r[1] > p.value) p = {r[1], r[0]};
  }
  return p;
}

// Steps after t_from at which |u(0, t)| increased.
long increases_after(const std::vector<Row>& series, double t_from) {
  long count = 0;
  bool started = false;
  double previous = 0.0;
  for (const Row& r : series) {
    if (r[0] < t_from) continue;
    if (started && r[1] > previous) ++count;
    previous = r[1];
    started = true;
  }
  return count;
}

struct DnsRun {
  std::vector<SpectralState> states;
  int stride;
};

DnsRun run_dns(const RunContext& ctx, const ComplexFamily& family, const ParameterVector& q0,
               int modes, double length, double dt, int stride) {
  const Eigen::VectorXd grid = spectral_grid(modes, length);
  Points x(grid.size(), 1);
  x.col(0) = grid;
  const ComplexField u = family.evaluate(x, q0);
  SpectralState s0;
  s0.length = length;
  s0.values = u;
  NlseDnsOptions o;
  o.dt = dt;
  o.t_end = ctx.number("t_end");
  o.stride = stride;
  o.contour_points = static_cast<int>(ctx.integer("dns_contour_points"));
  return {nlse_dns(s0, o), stride};
}

std::vector<Row> dns_origin(const std::vector<SpectralState>& states) {
  std::vector<Row> rows;
  for (const auto& s : states) rows.push_back({s.time, std::abs(s.at_origin())});
  return rows;
}

// Largest gap between two origin series kept at the same times.
double series_gap(const std::vector<Row>& a, const std::vector<Row>& b) {
  if (a.size() != b.size()) throw AlignmentError("refinement runs kept different sample counts");
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i][0] - b[i][0]) > 1e-9) throw AlignmentError("refinement runs kept different sample times");
    gap = std::max(gap, std::abs(a[i][1] - b[i][1]));
  }
  return gap;
}

void record_nlse_metrics(RunContext& ctx, const Trajectory& traj) {
  ctx.metrics()["mass_drift"] = traj.max_relative_drift()(0);
  ctx.metrics()["energy_drift"] = traj.max_relative_drift()(1);
  double min_L = traj.states.front()(1);
  for (const auto& q : traj.states) min_L = std::min(min_L, q(1));
  ctx.metrics()["min_L"] = min_L;
}

}  // namespace

// Shared by the focusing and defocusing experiments.
void run_nlse_vs_dns(RunContext& ctx) {
  const auto problem = nlse_problem(ctx, ctx.flag("constrained"));
  const ParameterVector q0 = initial_state(ctx);
  const Trajectory traj = integrate(problem, q0, ctx.integrator());
  const ComplexFamily& family = *problem.family;
  ctx.write_trajectory("trajectory", "trajectory.csv", traj);
  record_trajectory_metrics(ctx, traj);
  record_nlse_metrics(ctx, traj);

  const double series_dt = ctx.number("series_dt");
  const std::vector<Row> origin = origin_series(traj, family, series_dt);
  ctx.write_series("origin", "origin.csv", {"t", "abs_u0"}, origin);
  write_fields(ctx, traj, family);

  // Accepted steps plus the uniform samples, so neither misses the peak.
  std::vector<Row> stepwise;
  for (std::size_t i = 0; i < traj.size(); ++i) stepwise.push_back({traj.times[i], origin_amplitude(family, traj.states[i])});
  Peak rons_peak = peak_of(origin);
  if (const Peak p = peak_of(stepwise); p.value > rons_peak.value) rons_peak = p;

  Json& m = ctx.metrics();
  const double t_from = ctx.number("monotone_from");
  const double initial = origin_amplitude(family, q0);
  m["initial_amplitude"] = initial;
  m["rons_peak_amplitude"] = rons_peak.value;
  m["rons_peak_time"] = rons_peak.time;
  m["rons_peak_ratio"] = rons_peak.value / initial;
  m["rons_final_amplitude"] = stepwise.back()[1];
  m["rons_origin_increases_after"] = increases_after(stepwise, t_from);
  m["rons_monotone_decay_after"] = increases_after(stepwise, t_from) == 0;

  if (!ctx.flag("dns")) return;
  const int modes = static_cast<int>(ctx.integer("dns_modes"));
  const double length = ctx.number("dns_length");
  const double dns_dt = ctx.number("dns_dt");
  const int stride = std::max(1, static_cast<int>(std::lround(series_dt / dns_dt)));
  const DnsRun dns = run_dns(ctx, family, q0, modes, length, dns_dt, stride);
  const std::vector<Row> dns_series = dns_origin(dns.states);
  ctx.write_series("dns_origin", "dns_origin.csv", {"t", "abs_u0"}, dns_series);

  std::vector<Row> dns_fields;
  const Eigen::VectorXd grid = spectral_grid(modes, length);
  for (double t : snapshot_times(ctx, dns.states.back().time)) {
    const SpectralState* nearest = &dns.states.front();
    for (const auto& s : dns.states) {
      if (std::abs(s.time - t) < std::abs(nearest->time - t)) nearest = &s;
    }
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const cplx u = nearest->values(i);
      dns_fields.push_back({nearest->time, grid(i), u.real(), u.imag(), std::abs(u)});
    }
  }
  ctx.write_file("dns_fields", "dns_fields.csv", {"t", "x", "u_re", "u_im", "abs_u"}, dns_fields);

  const Peak dns_peak = peak_of(dns_series);
  double mass_drift = 0.0;
  const double mass0 = spectral_mass(dns.states.front());
  for (const auto& s : dns.states) mass_drift = std::max(mass_drift, std::abs(spectral_mass(s) - mass0) / mass0);
  double sup_gap = 0.0;
  for (const Row& r : dns_series) {
    sup_gap = std::max(sup_gap, std::abs(origin_amplitude(family, traj.state_at(r[0])) - r[1]));
  }
  m["dns_peak_amplitude"] = dns_peak.value;
  m["dns_peak_time"] = dns_peak.time;
  m["peak_time_relative_gap"] = std::abs(rons_peak.time - dns_peak.time) / dns_peak.time;
  m["peak_amplitude_gap"] = rons_peak.value - dns_peak.value;
  m["peak_amplitude_relative_gap"] = (rons_peak.value - dns_peak.value) / dns_peak.value;
  m["origin_sup_gap"] = sup_gap;
  m["dns_final_amplitude"] = dns_series.back()[1];
  m["dns_origin_increases_after"] = increases_after(dns_series, t_from);
  m["dns_monotone_decay_after"] = increases_after(dns_series, t_from) == 0;
  m["dns_mass_drift"] = mass_drift;

  if (!ctx.flag("dns_refinement_check")) return;
  const std::vector<Row> more_modes = dns_origin(run_dns(ctx, family, q0, 2 * modes, length, dns_dt, stride).states);
  const std::vector<Row> half_dt = dns_origin(run_dns(ctx, family, q0, modes, length, dns_dt / 2.0, 2 * stride).states);
  const std::vector<Row> wider = dns_origin(run_dns(ctx, family, q0, 4 * modes, 4.0 * length, dns_dt, stride).states);
  m["dns_refinement_gap_modes"] = series_gap(dns_series, more_modes);
  m["dns_refinement_gap_dt"] = series_gap(dns_series, half_dt);
  m["dns_refinement_gap_domain"] = series_gap(dns_series, wider);
}

void run_nlse_focusing(RunContext& ctx) { run_nlse_vs_dns(ctx); }
void run_nlse_defocusing(RunContext& ctx) { run_nlse_vs_dns(ctx); }

void run_nlse_unconstrained(RunContext& ctx) {
  const ParameterVector q0 = initial_state(ctx);
  const IntegratorConfig config = ctx.integrator();
  const auto free_problem = nlse_problem(ctx, false);
  const Trajectory free = integrate(free_problem, q0, config);
  ctx.write_trajectory("trajectory", "trajectory.csv", free);
  record_trajectory_metrics(ctx, free);
  const Trajectory held = integrate(nlse_problem(ctx, true), q0, config);
  ctx.write_trajectory("trajectory_constrained", "trajectory_constrained.csv", held);
  record_trajectory_metrics(ctx, held, "constrained_");

  const ComplexFamily& family = *free_problem.family;
  const double dt = ctx.number("series_dt");
  ctx.write_series("origin", "origin.csv", {"t", "abs_u0"}, origin_series(free, family, dt));
  ctx.write_series("constrained_origin", "constrained_origin.csv", {"t", "abs_u0"}, origin_series(held, family, dt));
  write_fields(ctx, free, family);

  double gap = 0.0;
  for (double t : sample_times(config.t_end, dt)) {
    gap = std::max(gap, (free.state_at(t) - held.state_at(t)).cwiseAbs().maxCoeff());
  }
  const double du = free.max_relative_drift()(0), dc = held.max_relative_drift()(0);
  Json& m = ctx.metrics();
  m["mass_drift_unconstrained"] = du;
  m["mass_drift_constrained"] = dc;
  m["energy_drift_unconstrained"] = free.max_relative_drift()(1);
  m["energy_drift_constrained"] = held.max_relative_drift()(1);
  m["drift_ratio"] = dc > 0.0 ? Json(du / dc) : Json(nullptr);
  m["distinguishable"] = du >= 10.0 * dc && du > 0.0;
  m["max_state_gap"] = gap;
}

void run_fit_demo(RunContext& ctx) {
  const auto problem = nlse_problem(ctx, ctx.flag("constrained"));
  const ComplexFamily& family = *problem.family;
  const double a = ctx.number("target_amplitude");
  if (!(a > 0.0)) throw ValidationError("target_amplitude must be positive");

  const QuadratureRule rule = make_rule(RealLine{ctx.number("fit_half_width")}, static_cast<int>(ctx.integer("fit_nodes")));
  // Bright soliton a sech(a x / sqrt 2) at t = 0.
  ComplexField target(rule.size());
  for (Eigen::Index i = 0; i < rule.size(); ++i) target(i) = a / std::cosh(a * rule.nodes()(i, 0) / std::sqrt(2.0));

  FitOptions fo;
  fo.max_iterations = static_cast<int>(ctx.integer("fit_max_iterations"));
  fo.starts = static_cast<int>(ctx.integer("fit_starts"));
  const ParameterVector guess =
      Eigen::Vector4d(ctx.number("A_guess"), ctx.number("L_guess"), ctx.number("V_guess"), ctx.number("phi_guess"));
  const FitResult fit = fit_initial(family, target, rule, guess, fo);

  Json& m = ctx.metrics();
  m["fit_residual"] = fit.residual_norm;
  m["fit_relative_residual"] = fit.residual_norm / std::sqrt(norm_sq(target, rule));
  m["fit_iterations"] = fit.iterations;
  m["fit_converged"] = fit.converged;
  m["fitted_q"] = std::vector<double>(fit.q.data(), fit.q.data() + fit.q.size());

  const ComplexField fitted = sample(family, fit.q, rule);
  std::vector<Row> rows;
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    rows.push_back({rule.nodes()(i, 0), target(i).real(), target(i).imag(), fitted(i).real(), fitted(i).imag()});
  }
  ctx.write_file("fit", "fit.csv", {"x", "target_re", "target_im", "fitted_re", "fitted_im"}, rows);

  const Trajectory traj = integrate(problem, fit.q, ctx.integrator());
  ctx.write_trajectory("trajectory", "trajectory.csv", traj);
  record_trajectory_metrics(ctx, traj);
  record_nlse_metrics(ctx, traj);
  ctx.write_series("origin", "origin.csv", {"t", "abs_u0"}, origin_series(traj, family, ctx.number("series_dt")));
  write_fields(ctx, traj, family);
}

}  // namespace rons::cli::detail
