#include "rons/oracles.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace rons {

namespace {
using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
}  // namespace

double exact_advdiff(double A0, double L0, double c, double nu, double x, double t) {
  if (!(L0 > 0.0)) throw ValidationError("L0 must be positive");
  return A0 * std::exp(-nu * t / (L0 * L0)) * std::sin((x - c * t) / L0);
}

// ---------------------------------------------------------------------------

void validate(const SpectralState& s) {
  const auto n = s.values.size();
  if (n < 16 || (n & (n - 1)) != 0) {
    throw ValidationError("spectral grid size must be a power of two >= 16, got " +
                          std::to_string(n));
  }
  if (!(s.length > 0.0)) throw ValidationError("spectral domain length must be positive");
  if (!s.values.allFinite()) throw ValidationError("spectral field is not finite");
}

Eigen::VectorXd spectral_grid(int n, double length) {
  const double h = length / n;
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) x(j) = -0.5 * length + j * h;
  return x;
}

SpectralState make_spectral_state(int n, double length, const std::function<cplx(double)>& u0) {
  SpectralState s;
  s.length = length;
  const Eigen::VectorXd x = spectral_grid(n, length);
  s.values.resize(n);
  for (int j = 0; j < n; ++j) s.values(j) = u0(x(j));
  validate(s);
  return s;
}

double spectral_mass(const SpectralState& s) { return s.spacing() * s.values.squaredNorm(); }

std::vector<SpectralState> nlse_dns(const SpectralState& u0, const NlseDnsOptions& o) {
  validate(u0);
  if (!(o.dt > 0.0) || !(o.t_end > 0.0)) throw ValidationError("dt and t_end must be positive");
  if (o.stride < 1 || o.contour_points < 1) throw ValidationError("invalid DNS options");

  const auto n = u0.values.size();
  Eigen::VectorXd k(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto m = j < n / 2 ? j : j - n;
    k(j) = 2.0 * kPi * static_cast<double>(m) / u0.length;
  }
  const double h = o.dt;
  const Eigen::VectorXcd Lop = (-cplx(0, 1) * k.array().square()).matrix();

  // phi-function coefficients by averaging over a unit circle around each
  // h*L. The operator is imaginary, so the full circle is needed.
  Eigen::VectorXcd E(n), E2(n), Q(n), f1(n), f2(n), f3(n);
  const int M = o.contour_points;
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx hl = h * Lop(j);
    E(j) = std::exp(hl);
    E2(j) = std::exp(0.5 * hl);
    cplx q = 0, a = 0, b = 0, c = 0;
    for (int p = 0; p < M; ++p) {
      const cplx r = std::exp(cplx(0, 2.0 * kPi * (p + 0.5) / M));
      const cplx z = hl + r;
      const cplx ez = std::exp(z), z3 = z * z * z;
      q += (std::exp(0.5 * z) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (z - 2.0)) / z3;
      c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    Q(j) = h * q / double(M);
    f1(j) = h * a / double(M);
    f2(j) = h * b / double(M);
    f3(j) = h * c / double(M);
  }

  Eigen::FFT<double> fft;
  Eigen::VectorXcd phys(n), spec(n);
  auto nonlinear = [&](const Eigen::VectorXcd& v) {
    fft.inv(phys, v);
    phys = (cplx(0, 1) * phys.array().abs2() * phys.array()).matrix();
    Eigen::VectorXcd out(n);
    fft.fwd(out, phys);
    return out;
  };

  std::vector<SpectralState> out{u0};
  Eigen::VectorXcd v(n);
  fft.fwd(v, u0.values);
  const long steps = std::max<long>(1, std::lround(std::ceil(o.t_end / h - 1e-9)));
  SpectralState last = u0;
  for (long s = 1; s <= steps; ++s) {
    const Eigen::VectorXcd Nv = nonlinear(v);
    const Eigen::VectorXcd a = E2.cwiseProduct(v) + Q.cwiseProduct(Nv);
    const Eigen::VectorXcd Na = nonlinear(a);
    const Eigen::VectorXcd b = E2.cwiseProduct(v) + Q.cwiseProduct(Na);
    const Eigen::VectorXcd Nb = nonlinear(b);
    const Eigen::VectorXcd c = E2.cwiseProduct(a) + Q.cwiseProduct(2.0 * Nb - Nv);
    const Eigen::VectorXcd Nc = nonlinear(c);
    v = E.cwiseProduct(v) + Nv.cwiseProduct(f1) + 2.0 * (Na + Nb).cwiseProduct(f2) +
        Nc.cwiseProduct(f3);

    SpectralState cur;
    cur.length = u0.length;
    cur.time = s * h;
    fft.inv(cur.values, v);
    if (!cur.values.allFinite()) {
      throw SpectralBlowupError("non-finite DNS field at t = " + std::to_string(cur.time), last);
    }
    if (s % o.stride == 0 || s == steps) out.push_back(cur);
    last = std::move(cur);
  }
  return out;
}

// ---------------------------------------------------------------------------

void validate(const PointVortexState& s) {
  if (s.strengths.size() != s.centers.rows()) {
    throw ValidationError("point-vortex strengths and centers differ in count");
  }
  if (!s.strengths.allFinite() || !s.centers.allFinite()) {
    throw ValidationError("point-vortex state is not finite");
  }
  for (Eigen::Index i = 0; i < s.count(); ++i) {
    for (Eigen::Index j = i + 1; j < s.count(); ++j) {
      if ((s.centers.row(i) - s.centers.row(j)).norm() == 0.0) {
        throw ValidationError("point-vortex centers coincide");
      }
    }
  }
}

double point_vortex_hamiltonian(const PointVortexState& s) {
  double H = 0.0;
  for (Eigen::Index i = 0; i < s.count(); ++i) {
    for (Eigen::Index j = 0; j < s.count(); ++j) {
      if (i == j) continue;
      H -= s.strengths(i) * s.strengths(j) * std::log((s.centers.row(i) - s.centers.row(j)).norm());
    }
  }
  return H / (4.0 * kPi);
}

Eigen::MatrixX2d point_vortex_velocity(const PointVortexState& s) {
  Eigen::MatrixX2d vel = Eigen::MatrixX2d::Zero(s.count(), 2);
  for (Eigen::Index i = 0; i < s.count(); ++i) {
    for (Eigen::Index j = 0; j < s.count(); ++j) {
      if (i == j) continue;
      const double dx = s.centers(i, 0) - s.centers(j, 0);
      const double dy = s.centers(i, 1) - s.centers(j, 1);
      const double r2 = dx * dx + dy * dy;
      vel(i, 0) -= s.strengths(j) * dy / r2;
      vel(i, 1) += s.strengths(j) * dx / r2;
    }
  }
  return vel / (2.0 * kPi);
}

PointVortexTrajectory point_vortex(const PointVortexState& initial, const PointVortexOptions& o) {
  validate(initial);
  const Eigen::Index n = initial.count();
  PointVortexState work = initial;

  auto unpack = [&](const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i < n; ++i) work.centers.row(i) << y(2 * i), y(2 * i + 1);
  };
  auto min_distance = [&]() {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        d = std::min(d, (work.centers.row(i) - work.centers.row(j)).norm());
      }
    }
    return d;
  };

  OdeRhs rhs = [&](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    unpack(y);
    const double d = min_distance();
    if (d < o.collision_distance) {
      throw NearCollisionError("point vortices within " + std::to_string(d));
    }
    const Eigen::MatrixX2d vel = point_vortex_velocity(work);
    Eigen::VectorXd dy(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      dy(2 * i) = vel(i, 0);
      dy(2 * i + 1) = vel(i, 1);
    }
    return dy;
  };

  PointVortexTrajectory traj;
  OdeObserver observer = [&](double t, const Eigen::VectorXd& y, const Eigen::VectorXd&) {
    unpack(y);
    work.time = initial.time + t;
    traj.states.push_back(work);
    traj.hamiltonian.push_back(point_vortex_hamiltonian(work));
    return true;
  };

  Eigen::VectorXd y0(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y0(2 * i) = initial.centers(i, 0);
    y0(2 * i + 1) = initial.centers(i, 1);
  }
  OdeOptions opts;
  opts.scheme = Scheme::kRk45Adaptive;
  opts.t0 = 0.0;
  opts.t_end = o.t_end;
  opts.dt = 0.0;
  opts.rtol = o.rtol;
  opts.atol = o.atol;
  traj.stats = solve_ode(rhs, y0, opts, observer);
  return traj;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd galerkin_rhs(const LinearModes& modes, const ParameterVector& q,
                             const PdeModel<double>& model, const QuadratureRule& rule) {
  const Points& x = rule.nodes();
  const Eigen::MatrixXd U = modes.sample_modes(x);
  const Eigen::MatrixXd G = gram(U, U, rule);
  const double dev = (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw ValidationError("modes are not orthonormal on the rule (deviation " +
                          std::to_string(dev) + ")");
  }
  return project(U, model.rhs(modes, q, x), rule);
}

// ---------------------------------------------------------------------------

double fit_log_growth(const std::vector<double>& times, const std::vector<double>& values,
                      double t_from) {
  if (times.size() != values.size()) throw AlignmentError("times and values differ in length");
  double st = 0, sl = 0, stt = 0, stl = 0;
  int m = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_from || values[i] == 0.0) continue;
    const double t = times[i], l = std::log(std::abs(values[i]));
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    ++m;
  }
  if (m < 2) throw ValidationError("too few samples to fit a growth rate");
  const double denom = m * stt - st * st;
  if (denom <= 0.0) throw ValidationError("degenerate sample times in growth fit");
  return (m * stl - st * sl) / denom;
}

InstabilityResult finite_time_instability(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& q0,
                                          const Eigen::VectorXd& qdot0,
                                          const InstabilityOptions& o) {
  const Eigen::Index n = lambdas.size();
  if (q0.size() != n || qdot0.size() != n) throw AlignmentError("mode counts differ");
  if (!(lambdas.array() > 0.0).all()) throw ValidationError("lambdas must be positive");
  if (!(o.fit_fraction > 0.0) || o.fit_fraction > 1.0) {
    throw ValidationError("fit fraction must be in (0, 1]");
  }
  const Eigen::VectorXd lam2 = lambdas.array().square();

  OdeRhs rhs = [&](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    Eigen::VectorXd dy(2 * n);
    dy.head(n) = y.tail(n);
    dy.tail(n) = lam2.cwiseProduct(y.head(n));
    return dy;
  };
  InstabilityResult res;
  OdeObserver observer = [&](double t, const Eigen::VectorXd& y, const Eigen::VectorXd&) {
    res.times.push_back(t);
    res.q.push_back(y.head(n));
    res.qdot.push_back(y.tail(n));
    return true;
  };
  Eigen::VectorXd y0(2 * n);
  y0 << q0, qdot0;
  OdeOptions opts;
  opts.scheme = Scheme::kRk45Adaptive;
  opts.t_end = o.t_end;
  opts.dt = 0.0;
  opts.rtol = o.rtol;
  opts.atol = o.atol;
  res.stats = solve_ode(rhs, y0, opts, observer);

  const double t_from = o.t_end * (1.0 - o.fit_fraction);
  res.fitted_rates.resize(n);
  std::vector<double> series(res.times.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < res.times.size(); ++i) series[i] = res.q[i](k);
    res.fitted_rates(k) = fit_log_growth(res.times, series, t_from);
  }
  return res;
}

}  // namespace rons
