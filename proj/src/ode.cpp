#include "rons/ode.hpp"

#include <algorithm>
#include <cmath>

#include "rons/errors.hpp"

namespace rons {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::kRk4Fixed ? "rk4-fixed" : "rk45-adaptive";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "rk4-fixed" || name == "rk4") return Scheme::kRk4Fixed;
  if (name == "rk45-adaptive" || name == "rk45") return Scheme::kRk45Adaptive;
  throw ValidationError("unknown integration scheme '" + name + "'");
}

void validate(const OdeOptions& o) {
  if (!(o.t_end > o.t0)) throw ValidationError("t_end must exceed the start time");
  if (o.scheme == Scheme::kRk4Fixed && !(o.dt > 0.0)) throw ValidationError("dt must be positive");
  if (o.scheme == Scheme::kRk45Adaptive && (!(o.rtol > 0.0) || !(o.atol > 0.0))) {
    throw ValidationError("rtol and atol must be positive");
  }
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double scaled_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& scale) {
  if (v.size() == 0) return 0.0;
  return std::sqrt((v.array() / scale.array()).square().mean());
}

OdeStats solve_rk4(const OdeRhs& rhs, Eigen::VectorXd y, const OdeOptions& o,
                   const OdeObserver& observer) {
  OdeStats stats;
  double t = o.t0;
  Eigen::VectorXd k1 = rhs(t, y);
  ++stats.evaluations;
  if (observer && !observer(t, y, k1)) {
    stats.t_final = t;
    return stats;
  }
  const double span = o.t_end - o.t0;
  const long n_steps = std::max<long>(1, std::lround(std::ceil(span / o.dt - 1e-9)));
  if (n_steps > o.max_steps) throw ValidationError("fixed step count exceeds max_steps");

  // One classical step of size h from (t, y) with k1 = f(t, y); on a domain
  // violation the step is split in halves, recursively.
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&, double, int)>
      advance = [&](double ts, const Eigen::VectorXd& ys, const Eigen::VectorXd& f1, double h,
                    int depth) -> Eigen::VectorXd {
    try {
      const Eigen::VectorXd f2 = rhs(ts + 0.5 * h, ys + 0.5 * h * f1);
      const Eigen::VectorXd f3 = rhs(ts + 0.5 * h, ys + 0.5 * h * f2);
      const Eigen::VectorXd f4 = rhs(ts + h, ys + h * f3);
      stats.evaluations += 3;
      return ys + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
    } catch (const DomainError&) {
      if (depth >= o.max_domain_retries) throw;
      ++stats.domain_retries;
      const Eigen::VectorXd mid = advance(ts, ys, f1, 0.5 * h, depth + 1);
      const Eigen::VectorXd fmid = rhs(ts + 0.5 * h, mid);
      ++stats.evaluations;
      return advance(ts + 0.5 * h, mid, fmid, 0.5 * h, depth + 1);
    }
  };

  for (long s = 1; s <= n_steps; ++s) {
    const double t_next = (s == n_steps) ? o.t_end : o.t0 + s * o.dt;
    y = advance(t, y, k1, t_next - t, 0);
    t = t_next;
    k1 = rhs(t, y);
    ++stats.evaluations;
    ++stats.accepted;
    if (observer && !observer(t, y, k1)) break;
  }
  stats.t_final = t;
  return stats;
}

OdeStats solve_dopri(const OdeRhs& rhs, Eigen::VectorXd y, const OdeOptions& o,
                     const OdeObserver& observer) {
  OdeStats stats;
  double t = o.t0;
  Eigen::VectorXd k1 = rhs(t, y);
  ++stats.evaluations;
  if (observer && !observer(t, y, k1)) {
    stats.t_final = t;
    return stats;
  }
  const double span = o.t_end - o.t0;
  const double max_dt = o.max_dt > 0.0 ? o.max_dt : span;

  auto scale_of = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return Eigen::VectorXd((o.atol + o.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix());
  };

  double h = o.dt;
  if (!(h > 0.0)) {
    const Eigen::VectorXd sc = scale_of(y, y);
    const double d0 = scaled_norm(y, sc), d1 = scaled_norm(k1, sc);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Eigen::VectorXd f1 = rhs(t + h0, y + h0 * k1);
    ++stats.evaluations;
    const double d2 = scaled_norm(f1 - k1, sc) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min(h, max_dt);

  int domain_retries = 0;
  bool last_rejected = false;
  // Set while the step is shrinking because stages leave the admissible set.
  bool domain_limited = false;
  while (t < o.t_end) {
    if (stats.accepted + stats.rejected >= o.max_steps) {
      throw BlowupError("adaptive integration exhausted max_steps at t = " + std::to_string(t));
    }
    bool final_step = false;
    if (t + h >= o.t_end || o.t_end - (t + h) < 1e-12 * span) {
      h = o.t_end - t;
      final_step = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      if (domain_limited) {
        throw DomainError("state converges to the boundary of the admissible set at t = " +
                          std::to_string(t));
      }
      throw BlowupError("step size underflow at t = " + std::to_string(t));
    }
    Eigen::VectorXd k2, k3, k4, k5, k6, k7, y_new;
    try {
      k2 = rhs(t + c2 * h, y + h * (a21 * k1));
      k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = rhs(t + h, y_new);
      stats.evaluations += 6;
    } catch (const DomainError&) {
      if (++domain_retries > o.max_domain_retries) throw;
      ++stats.domain_retries;
      h *= 0.5;
      last_rejected = true;
      domain_limited = true;
      continue;
    }
    const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = scaled_norm(err, scale_of(y, y_new));
    if (!std::isfinite(en)) throw BlowupError("non-finite error estimate at t = " + std::to_string(t));
    if (en <= 1.0) {
      t = final_step ? o.t_end : t + h;
      y = std::move(y_new);
      k1 = std::move(k7);
      ++stats.accepted;
      domain_retries = 0;
      if (observer && !observer(t, y, k1)) break;
      double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * fac, max_dt);
      last_rejected = false;
    } else {
      ++stats.rejected;
      domain_limited = false;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  stats.t_final = t;
  return stats;
}

}  // namespace

OdeStats solve_ode(const OdeRhs& rhs, Eigen::VectorXd y0, const OdeOptions& options,
                   const OdeObserver& observer) {
  validate(options);
  return options.scheme == Scheme::kRk4Fixed ? solve_rk4(rhs, std::move(y0), options, observer)
                                             : solve_dopri(rhs, std::move(y0), options, observer);
}

Eigen::VectorXd hermite_interpolate(double t, double t0, const Eigen::VectorXd& y0,
                                    const Eigen::VectorXd& dy0, double t1, const Eigen::VectorXd& y1,
                                    const Eigen::VectorXd& dy1) {
  const double h = t1 - t0;
  if (h == 0.0) return y0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + h10 * h * dy0 + h01 * y1 + h11 * h * dy1;
}

}  // namespace rons
