#include <cmath>
#include <numbers>

#include "internal.hpp"
#include "rons/families.hpp"
#include "rons/oracles.hpp"

namespace rons::cli::detail {
namespace {

using Vec2 = Eigen::Vector2d;

struct VortexSetup {
  int count = 0;
  std::vector<double> A, L, x, y;
  ParameterVector q0;
  RonsProblem<double> problem;
};

VortexSetup setup(const RunContext& ctx) {
  VortexSetup s;
  s.A = ctx.numbers("A");
  s.L = ctx.numbers("L");
  s.x = ctx.numbers("x");
  s.y = ctx.numbers("y");
  s.count = static_cast<int>(s.A.size());
  if (s.count < 1 || s.L.size() != s.A.size() || s.x.size() != s.A.size() || s.y.size() != s.A.size()) {
    throw ValidationError("A, L, x and y must be nonempty and of equal length");
  }
  std::vector<Vec2> centers;
  for (int i = 0; i < s.count; ++i) centers.emplace_back(s.x[i], s.y[i]);
  s.q0 = GaussianVortices::pack(s.A, s.L, centers);

  const double nu = ctx.number("nu");
  s.problem.family = std::make_shared<GaussianVortices>(s.count);
  s.problem.model = vorticity(nu);
  s.problem.rules = ctx.tracking_rules();
  s.problem.quantities = euler_invariants();
  s.problem.enforce_constraints = ctx.flag("constrained");
  s.problem.assembly = ctx.assembly();
  return s;
}

Vec2 center(const Eigen::VectorXd& q, int i) { return {q(4 * i + 2), q(4 * i + 3)}; }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Gamma_i = int omega_i dA over a box of circulation_half_width core radii.
std::vector<double> quadrature_circulations(const RunContext& ctx, const VortexSetup& s) {
  const GaussianVortices one(1);
  const auto model = vorticity(0.0);
  std::vector<double> out;
  for (int i = 0; i < s.count; ++i) {
    const double half = ctx.number("circulation_half_width") * s.L[i];
    const QuadratureRule rule = make_rule(Plane{half, half, Vec2(s.x[i], s.y[i])},
                                          static_cast<int>(ctx.integer("circulation_nodes")));
    const Eigen::Vector4d qi(s.A[i], s.L[i], s.x[i], s.y[i]);
    const RealField omega = model->state(one, qi, rule.nodes());
    out.push_back(rule.weights().dot(omega));
  }
  return out;
}

// Circulation inside the radius L_i where the azimuthal velocity peaks: 4 pi A / e.
std::vector<double> core_circulations(const VortexSetup& s) {
  std::vector<double> out;
  for (double a : s.A) out.push_back(4.0 * std::numbers::pi * a / std::numbers::e);
  return out;
}

std::vector<std::string> center_header(int count) {
  std::vector<std::string> h{"t"};
  for (int i = 1; i <= count; ++i) {
    h.push_back("x" + std::to_string(i));
    h.push_back("y" + std::to_string(i));
  }
  return h;
}

struct PointVortexRun {
  bool ok = false;
  PointVortexTrajectory trajectory;
  std::vector<double> strengths;
};

PointVortexRun run_point_vortices(RunContext& ctx, const VortexSetup& s,
                                  const std::vector<double>& quadrature,
                                  const std::vector<double>& core) {
  PointVortexRun run;
  if (!ctx.flag("point_vortex")) return run;
  const std::string which = ctx.text("pv_circulation");
  if (which == "quadrature") {
    run.strengths = quadrature;
  } else if (which == "core") {
    run.strengths = core;
  } else {
    throw ValidationError("pv_circulation must be \"quadrature\" or \"core\"");
  }
  PointVortexState init;
  init.strengths = Eigen::Map<const Eigen::VectorXd>(run.strengths.data(), s.count);
  init.centers.resize(s.count, 2);
  for (int i = 0; i < s.count; ++i) init.centers.row(i) << s.x[i], s.y[i];
  PointVortexOptions o;
  o.t_end = ctx.number("t_end");
  o.rtol = ctx.number("rtol");
  o.atol = ctx.number("atol");
  try {
    run.trajectory = point_vortex(init, o);
    run.ok = true;
  } catch (const Error& e) {
    ctx.metrics()["point_vortex_error"] = std::string(e.category()) + ": " + e.what();
    ctx.warn(std::string("point-vortex oracle failed: ") + e.what());
    return run;
  }
  std::vector<Row> rows;
  for (const auto& st : run.trajectory.states) {
    Row r{st.time};
    for (int i = 0; i < s.count; ++i) {
      r.push_back(st.centers(i, 0));
      r.push_back(st.centers(i, 1));
    }
    rows.push_back(r);
  }
  ctx.write_series("point_vortex_centers", "point_vortex_centers.csv", center_header(s.count), rows);
  double drift = 0.0;
  const double h0 = run.trajectory.hamiltonian.front();
  for (double h : run.trajectory.hamiltonian) drift = std::max(drift, std::abs(h - h0) / std::max(std::abs(h0), 1e-300));
  ctx.metrics()["point_vortex_hamiltonian_drift"] = drift;
  ctx.metrics()["point_vortex_strengths"] = run.strengths;
  return run;
}

// Relative gap, or null when the reference vanishes.
Json relative_gap(double value, double reference) {
  if (reference == 0.0 || !std::isfinite(reference)) return nullptr;
  return std::abs(value - reference) / std::abs(reference);
}

struct EulerRun {
  VortexSetup setup;
  Trajectory trajectory;
  std::vector<double> quadrature_gamma, core_gamma;
  PointVortexRun pv;
};

EulerRun run_common(RunContext& ctx) {
  EulerRun r{setup(ctx), {}, {}, {}, {}};
  const VortexSetup& s = r.setup;
  if (ctx.flag("constrained") && ctx.number("nu") != 0.0) {
    ctx.warn("energy and enstrophy are enforced although nu > 0 dissipates them");
  }
  r.trajectory = integrate(s.problem, s.q0, ctx.integrator());
  const Trajectory& traj = r.trajectory;
  ctx.write_trajectory("trajectory", "trajectory.csv", traj);
  record_trajectory_metrics(ctx, traj);

  Json& m = ctx.metrics();
  m["energy_drift"] = traj.max_relative_drift()(0);
  m["enstrophy_drift"] = traj.max_relative_drift()(1);
  double dA = 0.0, dL = 0.0, min_L = s.L[0];
  for (const auto& q : traj.states) {
    for (int i = 0; i < s.count; ++i) {
      dA = std::max(dA, std::abs(q(4 * i) - s.A[i]) / std::abs(s.A[i]));
      dL = std::max(dL, std::abs(q(4 * i + 1) - s.L[i]) / s.L[i]);
      min_L = std::min(min_L, q(4 * i + 1));
    }
  }
  m["max_relative_change_A"] = dA;
  m["max_relative_change_L"] = dL;
  m["min_L"] = min_L;

  std::vector<Row> rows;
  for (double t : sample_times(traj.times.back(), ctx.number("series_dt"))) {
    const Eigen::VectorXd q = traj.state_at(t);
    Row row{t};
    for (int i = 0; i < s.count; ++i) {
      row.push_back(q(4 * i + 2));
      row.push_back(q(4 * i + 3));
    }
    rows.push_back(row);
  }
  ctx.write_series("centers", "centers.csv", center_header(s.count), rows);

  // Fields on a square grid that follows the centroid of the centers.
  const long n = ctx.integer("field_points");
  const double half = ctx.number("field_half_width");
  const long count = ctx.integer("snapshot_count");
  if (n < 2 || !(half > 0.0) || count < 1) throw ValidationError("field_points >= 2, field_half_width > 0 and snapshot_count >= 1 required");
  std::vector<Row> fields;
  for (long k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : traj.times.back() * static_cast<double>(k) / static_cast<double>(count - 1);
    const Eigen::VectorXd q = traj.state_at(t);
    Vec2 mid = Vec2::Zero();
    for (int i = 0; i < s.count; ++i) mid += center(q, i) / s.count;
    Points x(n * n, 2);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) {
        x(i * n + j, 0) = mid.x() - half + 2.0 * half * static_cast<double>(j) / static_cast<double>(n - 1);
        x(i * n + j, 1) = mid.y() - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
      }
    }
    const RealField psi = s.problem.family->evaluate(x, q);
    const RealField omega = s.problem.model->state(*s.problem.family, q, x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) fields.push_back({t, x(i, 0), x(i, 1), psi(i), omega(i)});
  }
  ctx.write_file("fields", "fields.csv", {"t", "x", "y", "psi", "omega"}, fields);

  r.quadrature_gamma = quadrature_circulations(ctx, s);
  r.core_gamma = core_circulations(s);
  m["circulation_quadrature"] = r.quadrature_gamma;
  m["circulation_core"] = r.core_gamma;
  r.pv = run_point_vortices(ctx, s, r.quadrature_gamma, r.core_gamma);
  if (std::abs(r.quadrature_gamma[0]) < 1e-8 * std::abs(r.core_gamma[0])) {
    ctx.warn("the Gaussian stream-function vortex carries no net circulation; point-vortex comparisons with quadrature circulations are degenerate");
  }
  return r;
}

void require_at_least(const VortexSetup& s, int n, const char* experiment) {
  if (s.count < n) throw ValidationError(std::string(experiment) + " needs at least " + std::to_string(n) + " vortices");
}

// Sign changes of x_a - x_b along the accepted steps, with their times.
std::vector<double> swap_times(const std::vector<double>& t, const std::vector<double>& dx) {
  std::vector<double> out;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if ((dx[i - 1] < 0.0) != (dx[i] < 0.0)) {
      out.push_back(t[i - 1] + (t[i] - t[i - 1]) * dx[i - 1] / (dx[i - 1] - dx[i]));
    }
  }
  return out;
}

}  // namespace

void run_euler_dipole(RunContext& ctx) {
  EulerRun r = run_common(ctx);
  require_at_least(r.setup, 2, "euler-dipole");
  const Trajectory& traj = r.trajectory;
  const double T = traj.times.back();
  auto midpoint = [](const Eigen::VectorXd& q) { return Vec2((center(q, 0) + center(q, 1)) / 2.0); };
  const Vec2 m0 = midpoint(traj.states.front());
  const Vec2 travel = midpoint(traj.final_state()) - m0;
  const double distance = travel.norm();

  double lateral = 0.0, vmin = INFINITY, vmax = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (distance > 0.0) lateral = std::max(lateral, std::abs(cross(travel / distance, midpoint(traj.states[i]) - m0)));
    const Eigen::VectorXd& qd = traj.rates[i];
    const double v = Vec2((center(qd, 0) + center(qd, 1)) / 2.0).norm();
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double speed = distance / T;
  const double d0 = (center(r.setup.q0, 0) - center(r.setup.q0, 1)).norm();
  Json& m = ctx.metrics();
  m["distance_traveled"] = distance;
  m["lateral_deviation"] = lateral;
  m["lateral_deviation_ratio"] = distance > 0.0 ? Json(lateral / distance) : Json(nullptr);
  m["speed"] = speed;
  m["speed_variation"] = speed > 0.0 ? Json((vmax - vmin) / speed) : Json(nullptr);

  // Point-vortex dipole with the quadrature circulations.
  if (r.pv.ok) {
    const auto& st = r.pv.trajectory.states;
    const auto pv_mid = [](const PointVortexState& p) { return Vec2((p.centers.row(0) + p.centers.row(1)).transpose() / 2.0); };
    const double pv_speed = (pv_mid(st.back()) - pv_mid(st.front())).norm() / T;
    m["point_vortex_speed"] = pv_speed;
    m["point_vortex_speed_relative_gap"] = relative_gap(speed, pv_speed);
  }
  const double core_speed = std::abs(r.core_gamma[0] - r.core_gamma[1]) / 2.0 / (2.0 * std::numbers::pi * d0);
  m["core_circulation_speed"] = core_speed;
  m["core_circulation_speed_relative_gap"] = relative_gap(speed, core_speed);
}

void run_euler_pair(RunContext& ctx) {
  EulerRun r = run_common(ctx);
  require_at_least(r.setup, 2, "euler-pair");
  const Trajectory& traj = r.trajectory;
  const double d0 = (center(r.setup.q0, 1) - center(r.setup.q0, 0)).norm();
  std::vector<double> t, x1, y1, x2, y2;
  double sep = 0.0, wmin = INFINITY, wmax = -INFINITY;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Eigen::VectorXd& q = traj.states[i];
    const Vec2 d = center(q, 1) - center(q, 0);
    const Vec2 dd = center(traj.rates[i], 1) - center(traj.rates[i], 0);
    sep = std::max(sep, std::abs(d.norm() - d0) / d0);
    const double w = cross(d, dd) / d.squaredNorm();
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
    t.push_back(traj.times[i]);
    x1.push_back(q(2));
    y1.push_back(q(3));
    x2.push_back(q(6));
    y2.push_back(q(7));
  }
  const double omega = fit_angular_velocity(t, x1, y1, x2, y2);
  Json& m = ctx.metrics();
  m["max_relative_separation_change"] = sep;
  m["angular_velocity"] = omega;
  m["angular_velocity_variation"] = omega != 0.0 ? Json((wmax - wmin) / std::abs(omega)) : Json(nullptr);
  m["total_angle"] = std::abs(omega) * traj.times.back();
  m["full_revolution"] = std::abs(omega) * traj.times.back() >= 2.0 * std::numbers::pi;

  const double pv_omega = (r.quadrature_gamma[0] + r.quadrature_gamma[1]) / (2.0 * std::numbers::pi * d0 * d0);
  m["point_vortex_angular_velocity"] = pv_omega;
  m["point_vortex_angular_velocity_relative_gap"] = relative_gap(omega, pv_omega);
  if (r.pv.ok) {
    std::vector<double> pt, px1, py1, px2, py2;
    for (const auto& st : r.pv.trajectory.states) {
      pt.push_back(st.time);
      px1.push_back(st.centers(0, 0));
      py1.push_back(st.centers(0, 1));
      px2.push_back(st.centers(1, 0));
      py2.push_back(st.centers(1, 1));
    }
    if (pt.size() >= 2) m["point_vortex_fitted_angular_velocity"] = fit_angular_velocity(pt, px1, py1, px2, py2);
  }
  const double core_omega = (r.core_gamma[0] + r.core_gamma[1]) / (2.0 * std::numbers::pi * d0 * d0);
  m["core_circulation_angular_velocity"] = core_omega;
  m["core_circulation_angular_velocity_relative_gap"] = relative_gap(omega, core_omega);
}

void run_euler_leapfrog(RunContext& ctx) {
  EulerRun r = run_common(ctx);
  const VortexSetup& s = r.setup;
  std::vector<int> positive, negative;
  for (int i = 0; i < s.count; ++i) (s.A[i] > 0.0 ? positive : negative).push_back(i);
  if (positive.size() != 2 || negative.size() != 2) {
    throw ValidationError("euler-leapfrog needs two positive and two negative vortices");
  }
  const Trajectory& traj = r.trajectory;
  auto swaps = [&](const std::vector<int>& pair) {
    std::vector<double> dx;
    for (const auto& q : traj.states) dx.push_back(q(4 * pair[0] + 2) - q(4 * pair[1] + 2));
    return swap_times(traj.times, dx);
  };
  const std::vector<double> pos = swaps(positive), neg = swaps(negative);
  Json& m = ctx.metrics();
  m["positive_swaps"] = pos.size();
  m["negative_swaps"] = neg.size();
  m["positive_swap_times"] = pos;
  m["negative_swap_times"] = neg;
  if (r.pv.ok) {
    auto pv_swaps = [&](const std::vector<int>& pair) {
      std::vector<double> t, dx;
      for (const auto& st : r.pv.trajectory.states) {
        t.push_back(st.time);
        dx.push_back(st.centers(pair[0], 0) - st.centers(pair[1], 0));
      }
      return swap_times(t, dx).size();
    };
    m["point_vortex_positive_swaps"] = pv_swaps(positive);
    m["point_vortex_negative_swaps"] = pv_swaps(negative);
  }
}

}  // namespace rons::cli::detail
