#include "rons/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rons {

namespace {

using cplx = std::complex<double>;

// Physicists' Hermite polynomials H_0..H_max at z.
template <typename T>
void hermite(T z, int max_order, T* out) {
  out[0] = T(1.0);
  if (max_order >= 1) out[1] = T(2.0) * z;
  for (int n = 1; n < max_order; ++n) {
    out[n + 1] = T(2.0) * z * out[n] - T(2.0 * n) * out[n - 1];
  }
}

int max_order_of(std::span<const MultiIndex> orders) {
  int m = 0;
  for (const auto& o : orders) m = std::max({m, o[0], o[1]});
  return m;
}

constexpr int kMaxHermite = 16;

void check_orders(std::span<const MultiIndex> orders) {
  for (const auto& o : orders) {
    if (o[0] < 0 || o[1] < 0 || o[0] + 1 >= kMaxHermite || o[1] + 1 >= kMaxHermite) {
      throw ValidationError("unsupported derivative order");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- SineWave

bool SineWave::in_domain(const ParameterVector& q) const {
  return q.size() == 3 && q.allFinite() && q(0) > kDomainMargin && q(1) > kDomainMargin;
}

RealFieldMatrix SineWave::spatial_derivatives(const Points& x, const ParameterVector& q,
                                              std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const double A = q(0), L = q(1), phi = q(2);
  RealFieldMatrix out(x.rows(), static_cast<Eigen::Index>(orders.size()));
  for (std::size_t k = 0; k < orders.size(); ++k) {
    const int m = orders[k][0];
    if (orders[k][1] > 0) {
      out.col(k).setZero();
      continue;
    }
    const double scale = A * std::pow(L, -m);
    const double shift = m * std::numbers::pi / 2.0;
    out.col(k) = scale * (x.col(0).array() / L + phi + shift).sin();
  }
  return out;
}

std::vector<RealFieldMatrix> SineWave::tangent_derivatives(const Points& x, const ParameterVector& q,
                                                           std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const double A = q(0), L = q(1), phi = q(2);
  std::vector<RealFieldMatrix> out;
  for (const auto& o : orders) {
    RealFieldMatrix t = RealFieldMatrix::Zero(x.rows(), 3);
    if (o[1] == 0) {
      const int m = o[0];
      const double Lm = std::pow(L, -m);
      const Eigen::ArrayXd theta = x.col(0).array() / L + phi + m * std::numbers::pi / 2.0;
      const Eigen::ArrayXd s = theta.sin(), c = theta.cos();
      t.col(0) = Lm * s;
      t.col(1) = -m * A * Lm / L * s - A * Lm * c * x.col(0).array() / (L * L);
      t.col(2) = A * Lm * c;
    }
    out.push_back(std::move(t));
  }
  return out;
}

// -------------------------------------------------------------- HeatKernel

HeatKernel::HeatKernel(int dimension) : dimension_(dimension) {
  if (dimension != 1 && dimension != 2) throw ValidationError("heat kernel dimension must be 1 or 2");
}

bool HeatKernel::in_domain(const ParameterVector& q) const {
  return q.size() == 2 && q.allFinite() && q(0) > kDomainMargin && q(1) > kDomainMargin;
}

namespace {

// d^(a,b) of G(xi) = exp(-|xi|^2), from Hermite tables hx, hy and e = G(xi).
inline double gaussian_derivative(const double* hx, const double* hy, int a, int b, double e) {
  return ((a + b) % 2 == 0 ? 1.0 : -1.0) * hx[a] * hy[b] * e;
}

// Value and parameter tangents (A, L, cx, cy) of d^alpha [A G((x - c) / L)]
// at one node. tangent[2], tangent[3] are only meaningful in 2D.
struct GaussianTerm {
  double value;
  double dA;
  double dL;
  double dcx;
  double dcy;
};

inline GaussianTerm gaussian_term(double A, double L, double xi, double eta, bool two_d, int a, int b) {
  double hx[kMaxHermite], hy[kMaxHermite];
  hermite(xi, a + 1, hx);
  if (two_d) {
    hermite(eta, b + 1, hy);
  } else {
    hy[0] = 1.0;
    hy[1] = 0.0;
  }
  const double e = std::exp(-(xi * xi + eta * eta));
  const int order = a + b;
  const double Lpow = std::pow(L, -order);
  const double D = gaussian_derivative(hx, hy, a, b, e);
  const double Dx = gaussian_derivative(hx, hy, a + 1, b, e);
  const double Dy = two_d ? gaussian_derivative(hx, hy, a, b + 1, e) : 0.0;
  GaussianTerm t;
  t.value = A * Lpow * D;
  t.dA = Lpow * D;
  t.dL = -A * Lpow / L * (order * D + xi * Dx + eta * Dy);
  t.dcx = -A * Lpow / L * Dx;
  t.dcy = -A * Lpow / L * Dy;
  return t;
}

}  // namespace

RealFieldMatrix HeatKernel::spatial_derivatives(const Points& x, const ParameterVector& q,
                                                std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const double A = q(0), L = q(1);
  const bool two_d = dimension_ == 2;
  RealFieldMatrix out(x.rows(), static_cast<Eigen::Index>(orders.size()));
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    const double xi = x(n, 0) / L;
    const double eta = two_d ? x(n, 1) / L : 0.0;
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const auto& o = orders[k];
      out(n, k) = (!two_d && o[1] > 0) ? 0.0 : gaussian_term(A, L, xi, eta, two_d, o[0], o[1]).value;
    }
  }
  return out;
}

std::vector<RealFieldMatrix> HeatKernel::tangent_derivatives(const Points& x, const ParameterVector& q,
                                                             std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const double A = q(0), L = q(1);
  const bool two_d = dimension_ == 2;
  std::vector<RealFieldMatrix> out(orders.size(), RealFieldMatrix::Zero(x.rows(), 2));
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    const double xi = x(n, 0) / L;
    const double eta = two_d ? x(n, 1) / L : 0.0;
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const auto& o = orders[k];
      if (!two_d && o[1] > 0) continue;
      const auto t = gaussian_term(A, L, xi, eta, two_d, o[0], o[1]);
      out[k](n, 0) = t.dA;
      out[k](n, 1) = t.dL;
    }
  }
  return out;
}

std::optional<SupportBox> HeatKernel::support(const ParameterVector& q) const {
  return SupportBox{Eigen::VectorXd::Zero(dimension_), Eigen::VectorXd::Zero(dimension_), q(1), q(1)};
}

// ------------------------------------------------------------ NlseGaussian

bool NlseGaussian::in_domain(const ParameterVector& q) const {
  return q.size() == 4 && q.allFinite() && q(0) > kDomainMargin && q(1) > kDomainMargin;
}

namespace {

// d^m/dx^m of exp(a x^2) for m = 0..max, a with negative real part.
// With beta = sqrt(-a): (-beta)^m H_m(beta x) exp(-beta^2 x^2).
void chirped_gaussian_derivatives(cplx a, double x, int max_order, cplx* out) {
  const cplx beta = std::sqrt(-a);
  cplx h[kMaxHermite];
  hermite(beta * x, max_order, h);
  const cplx e = std::exp(a * x * x);
  cplx p(1.0);
  for (int m = 0; m <= max_order; ++m) {
    out[m] = p * h[m] * e;
    p *= -beta;
  }
}

}  // namespace

ComplexFieldMatrix NlseGaussian::spatial_derivatives(const Points& x, const ParameterVector& q,
                                                     std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const double A = q(0), L = q(1), V = q(2), phi = q(3);
  const cplx a(-1.0 / (L * L), V / L);
  const cplx amp = A * std::exp(cplx(0.0, phi));
  const int max_m = max_order_of(orders);
  ComplexFieldMatrix out(x.rows(), static_cast<Eigen::Index>(orders.size()));
  cplx g[kMaxHermite];
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    chirped_gaussian_derivatives(a, x(n, 0), max_m, g);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      out(n, k) = orders[k][1] > 0 ? cplx(0.0) : amp * g[orders[k][0]];
    }
  }
  return out;
}

std::vector<ComplexFieldMatrix> NlseGaussian::tangent_derivatives(
    const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const double A = q(0), L = q(1), V = q(2), phi = q(3);
  const cplx a(-1.0 / (L * L), V / L);
  const cplx phase = std::exp(cplx(0.0, phi));
  const cplx amp = A * phase;
  // da/dL and da/dV.
  const cplx da_dL(2.0 / (L * L * L), -V / (L * L));
  const cplx da_dV(0.0, 1.0 / L);
  const int max_m = max_order_of(orders);
  std::vector<ComplexFieldMatrix> out(orders.size(), ComplexFieldMatrix::Zero(x.rows(), 4));
  cplx g[kMaxHermite];
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    const double xn = x(n, 0);
    chirped_gaussian_derivatives(a, xn, max_m, g);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      if (orders[k][1] > 0) continue;
      const int m = orders[k][0];
      const cplx um = amp * g[m];
      // d/da of d^m(exp(a x^2)) = d^m(x^2 exp(a x^2)), expanded by Leibniz.
      cplx d_da = xn * xn * g[m];
      if (m >= 1) d_da += 2.0 * m * xn * g[m - 1];
      if (m >= 2) d_da += double(m) * (m - 1) * g[m - 2];
      d_da *= amp;
      out[k](n, 0) = phase * g[m];
      out[k](n, 1) = d_da * da_dL;
      out[k](n, 2) = d_da * da_dV;
      out[k](n, 3) = cplx(0.0, 1.0) * um;
    }
  }
  return out;
}

std::optional<SupportBox> NlseGaussian::support(const ParameterVector& q) const {
  // The chirp's local wavenumber 2 x V / L reaches 12 |V| at x = 6 L.
  const double chirp = 12.0 * std::abs(q(2));
  const double finest = chirp > 0.0 ? std::min(q(1), 1.0 / chirp) : q(1);
  return SupportBox{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), q(1), finest};
}

// -------------------------------------------------------- GaussianVortices

GaussianVortices::GaussianVortices(int vortex_count) : count_(vortex_count) {
  if (vortex_count < 1) throw ValidationError("need at least one vortex");
}

std::vector<std::string> GaussianVortices::parameter_labels() const {
  std::vector<std::string> labels;
  for (int i = 1; i <= count_; ++i) {
    const auto s = std::to_string(i);
    labels.insert(labels.end(), {"A" + s, "L" + s, "x" + s, "y" + s});
  }
  return labels;
}

bool GaussianVortices::in_domain(const ParameterVector& q) const {
  if (q.size() != 4 * count_ || !q.allFinite()) return false;
  for (int i = 0; i < count_; ++i) {
    if (std::abs(q(4 * i)) <= kDomainMargin || q(4 * i + 1) <= kDomainMargin) return false;
  }
  return true;
}

ParameterVector GaussianVortices::pack(std::span<const double> amplitudes,
                                       std::span<const double> scales,
                                       std::span<const Eigen::Vector2d> centers) {
  if (amplitudes.size() != scales.size() || scales.size() != centers.size()) {
    throw ValidationError("vortex parameter lists differ in length");
  }
  ParameterVector q(4 * amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    q.segment<4>(4 * i) << amplitudes[i], scales[i], centers[i].x(), centers[i].y();
  }
  return q;
}

RealFieldMatrix GaussianVortices::spatial_derivatives(const Points& x, const ParameterVector& q,
                                                      std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const int max_m = max_order_of(orders);
  RealFieldMatrix out = RealFieldMatrix::Zero(x.rows(), static_cast<Eigen::Index>(orders.size()));
  double hx[kMaxHermite], hy[kMaxHermite];
  for (int v = 0; v < count_; ++v) {
    const double A = q(4 * v), L = q(4 * v + 1), cx = q(4 * v + 2), cy = q(4 * v + 3);
    double Lpow[2 * kMaxHermite];
    for (int p = 0; p < 2 * kMaxHermite; ++p) Lpow[p] = A * std::pow(L, -p);
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      const double xi = (x(n, 0) - cx) / L;
      const double eta = (x(n, 1) - cy) / L;
      const double r2 = xi * xi + eta * eta;
      if (r2 > 900.0) continue;  // exp(-900) underflows
      const double e = std::exp(-r2);
      hermite(xi, max_m, hx);
      hermite(eta, max_m, hy);
      for (std::size_t k = 0; k < orders.size(); ++k) {
        const int a = orders[k][0], b = orders[k][1];
        out(n, k) += Lpow[a + b] * gaussian_derivative(hx, hy, a, b, e);
      }
    }
  }
  return out;
}

std::vector<RealFieldMatrix> GaussianVortices::tangent_derivatives(
    const Points& x, const ParameterVector& q, std::span<const MultiIndex> orders) const {
  check_orders(orders);
  const int max_m = max_order_of(orders) + 1;
  std::vector<RealFieldMatrix> out(orders.size(), RealFieldMatrix::Zero(x.rows(), 4 * count_));
  double hx[kMaxHermite], hy[kMaxHermite];
  for (int v = 0; v < count_; ++v) {
    const double A = q(4 * v), L = q(4 * v + 1), cx = q(4 * v + 2), cy = q(4 * v + 3);
    double inv_pow[2 * kMaxHermite];
    for (int p = 0; p < 2 * kMaxHermite; ++p) inv_pow[p] = std::pow(L, -p);
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      const double xi = (x(n, 0) - cx) / L;
      const double eta = (x(n, 1) - cy) / L;
      const double r2 = xi * xi + eta * eta;
      if (r2 > 900.0) continue;
      const double e = std::exp(-r2);
      hermite(xi, max_m, hx);
      hermite(eta, max_m, hy);
      for (std::size_t k = 0; k < orders.size(); ++k) {
        const int a = orders[k][0], b = orders[k][1];
        const int order = a + b;
        const double Lpow = inv_pow[order];
        const double D = gaussian_derivative(hx, hy, a, b, e);
        const double Dx = gaussian_derivative(hx, hy, a + 1, b, e);
        const double Dy = gaussian_derivative(hx, hy, a, b + 1, e);
        auto row = out[k].row(n);
        row(4 * v) = Lpow * D;
        row(4 * v + 1) = -A * Lpow / L * (order * D + xi * Dx + eta * Dy);
        row(4 * v + 2) = -A * Lpow / L * Dx;
        row(4 * v + 3) = -A * Lpow / L * Dy;
      }
    }
  }
  return out;
}

std::optional<SupportBox> GaussianVortices::support(const ParameterVector& q) const {
  SupportBox box{Eigen::VectorXd::Constant(2, std::numeric_limits<double>::infinity()),
                 Eigen::VectorXd::Constant(2, -std::numeric_limits<double>::infinity()), 0.0,
                 std::numeric_limits<double>::infinity()};
  for (int v = 0; v < count_; ++v) {
    const Eigen::Vector2d c = center(q, v);
    box.lower = box.lower.cwiseMin(c);
    box.upper = box.upper.cwiseMax(c);
    box.length_scale = std::max(box.length_scale, q(4 * v + 1));
    box.finest_scale = std::min(box.finest_scale, q(4 * v + 1));
  }
  return box;
}

// ------------------------------------------------------------- LinearModes

LinearModes::LinearModes(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw ValidationError("linear family needs at least one mode");
}

std::vector<std::string> LinearModes::parameter_labels() const {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= modes_.size(); ++i) labels.push_back("q" + std::to_string(i));
  return labels;
}

bool LinearModes::in_domain(const ParameterVector& q) const {
  return q.size() == static_cast<Eigen::Index>(modes_.size()) && q.allFinite();
}

RealFieldMatrix LinearModes::sample_modes(const Points& x, int order) const {
  RealFieldMatrix out(x.rows(), static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    for (Eigen::Index n = 0; n < x.rows(); ++n) out(n, i) = modes_[i](x(n, 0), order);
  }
  return out;
}

RealFieldMatrix LinearModes::spatial_derivatives(const Points& x, const ParameterVector& q,
                                                 std::span<const MultiIndex> orders) const {
  RealFieldMatrix out(x.rows(), static_cast<Eigen::Index>(orders.size()));
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k][1] > 0) {
      out.col(k).setZero();
    } else {
      out.col(k) = sample_modes(x, orders[k][0]) * q;
    }
  }
  return out;
}

std::vector<RealFieldMatrix> LinearModes::tangent_derivatives(
    const Points& x, const ParameterVector&, std::span<const MultiIndex> orders) const {
  std::vector<RealFieldMatrix> out;
  for (const auto& o : orders) {
    out.push_back(o[1] > 0 ? RealFieldMatrix::Zero(x.rows(), static_cast<Eigen::Index>(modes_.size()))
                           : sample_modes(x, o[0]));
  }
  return out;
}

std::vector<Mode> fourier_modes(int count, double period) {
  if (count < 1 || period <= 0.0) throw ValidationError("invalid Fourier mode request");
  std::vector<Mode> modes;
  const double c0 = 1.0 / std::sqrt(period);
  modes.emplace_back([c0](double, int k) { return k == 0 ? c0 : 0.0; });
  const double c = std::sqrt(2.0 / period);
  for (int i = 1; static_cast<int>(modes.size()) < count; ++i) {
    const double w = 2.0 * std::numbers::pi * i / period;
    // k-th derivative of cos(w x) is w^k cos(w x + k pi / 2), likewise for sin.
    modes.emplace_back([c, w](double x, int k) {
      return c * std::pow(w, k) * std::cos(w * x + k * std::numbers::pi / 2.0);
    });
    if (static_cast<int>(modes.size()) < count) {
      modes.emplace_back([c, w](double x, int k) {
        return c * std::pow(w, k) * std::sin(w * x + k * std::numbers::pi / 2.0);
      });
    }
  }
  return modes;
}

std::vector<Mode> sine_modes(std::span<const double> wavenumbers, double period) {
  if (period <= 0.0) throw ValidationError("period must be positive");
  std::vector<Mode> modes;
  const double c = std::sqrt(2.0 / period);
  for (double w : wavenumbers) {
    modes.emplace_back([c, w](double x, int k) {
      return c * std::pow(w, k) * std::sin(w * x + k * std::numbers::pi / 2.0);
    });
  }
  return modes;
}

// ------------------------------------------------------------ generic ops

template <typename Scalar>
void AnsatzFamily<Scalar>::require_domain(const ParameterVector& q) const {
  if (!in_domain(q)) {
    std::string msg = name() + ": parameters outside admissible set (";
    for (Eigen::Index i = 0; i < q.size(); ++i) msg += (i ? ", " : "") + std::to_string(q(i));
    throw DomainError(msg + ")");
  }
}

template <typename Scalar>
Field<Scalar> sample(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                     const QuadratureRule& rule) {
  family.require_domain(q);
  return family.evaluate(rule.nodes(), q);
}

template <typename Scalar>
TangentBasis<Scalar> tangent_basis(const AnsatzFamily<Scalar>& family, const ParameterVector& q,
                                   const QuadratureRule& rule) {
  family.require_domain(q);
  return {family.tangents(rule.nodes(), q)};
}

template <typename Scalar>
bool is_immersion(const TangentBasis<Scalar>& basis, const QuadratureRule& rule) {
  Eigen::MatrixXd M = gram(basis.fields, basis.fields, rule);
  M = 0.5 * (M + M.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  return llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all();
}

template class AnsatzFamily<double>;
template class AnsatzFamily<cplx>;
template Field<double> sample(const AnsatzFamily<double>&, const ParameterVector&, const QuadratureRule&);
template Field<cplx> sample(const AnsatzFamily<cplx>&, const ParameterVector&, const QuadratureRule&);
template TangentBasis<double> tangent_basis(const AnsatzFamily<double>&, const ParameterVector&,
                                            const QuadratureRule&);
template TangentBasis<cplx> tangent_basis(const AnsatzFamily<cplx>&, const ParameterVector&,
                                          const QuadratureRule&);
template bool is_immersion(const TangentBasis<double>&, const QuadratureRule&);
template bool is_immersion(const TangentBasis<cplx>&, const QuadratureRule&);

std::vector<FamilyInfo> builtin_families() {
  return {
      {"sine", "A sin(x/L + phi); advection-diffusion", std::make_shared<const SineWave>()},
      {"heat-kernel", "A exp(-|x|^2/L^2); heat equation fundamental solution",
       std::make_shared<const HeatKernel>(1)},
      {"nlse-gaussian", "A exp(-x^2/L^2 + i x^2 V/L + i phi); NLSE wave group",
       std::make_shared<const NlseGaussian>()},
      {"gaussian-vortices", "sum A_i exp(-|x - x_i|^2/L_i^2); stream function of N vortices",
       std::make_shared<const GaussianVortices>(1)},
      {"linear-modes", "sum q_i u_i(x) over orthonormal modes; Galerkin",
       std::make_shared<const LinearModes>(fourier_modes(5, 2.0 * std::numbers::pi))},
  };
}

}  // namespace rons
