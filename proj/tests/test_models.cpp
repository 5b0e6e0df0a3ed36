#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rons/models.hpp"
#include "support.hpp"

using namespace rons;
using namespace rons::testing;

namespace {

// u(x) = a, a spatially constant complex field with one real parameter.
class ComplexConstant final : public ComplexFamily {
 public:
  std::string name() const override { return "constant"; }
  std::vector<std::string> parameter_labels() const override { return {"a"}; }
  int spatial_dimension() const override { return 1; }
  bool in_domain(const ParameterVector& q) const override { return q.size() == 1; }
  FieldMatrix<cplx> spatial_derivatives(const Points& x, const ParameterVector& q,
                                        std::span<const MultiIndex> orders) const override {
    FieldMatrix<cplx> out = FieldMatrix<cplx>::Zero(x.rows(), orders.size());
    for (std::size_t k = 0; k < orders.size(); ++k) {
      if (orders[k][0] == 0) out.col(k).setConstant(q(0));
    }
    return out;
  }
  std::vector<FieldMatrix<cplx>> tangent_derivatives(
      const Points& x, const ParameterVector&, std::span<const MultiIndex> orders) const override {
    std::vector<FieldMatrix<cplx>> out;
    for (const auto& o : orders) {
      out.push_back(FieldMatrix<cplx>::Constant(x.rows(), 1, o[0] == 0 ? 1.0 : 0.0));
    }
    return out;
  }
};

Points line_points(std::initializer_list<double> xs) {
  Points x(xs.size(), 1);
  Eigen::Index i = 0;
  for (double v : xs) x(i++, 0) = v;
  return x;
}

// Radial closed forms for a sum of Gaussian stream functions, written out
// independently of the Hermite-based family derivatives.
struct RadialVortexOracle {
  std::vector<double> A, L;
  std::vector<Eigen::Vector2d> c;

  // (psi_x, psi_y, omega, omega_x, omega_y, lap omega)
  std::array<double, 6> at(const Eigen::Vector2d& p) const {
    std::array<double, 6> out{};
    for (std::size_t i = 0; i < A.size(); ++i) {
      const Eigen::Vector2d d = p - c[i];
      const double L2 = L[i] * L[i], s = d.squaredNorm() / L2, e = A[i] * std::exp(-s);
      out[0] += -2.0 * d.x() / L2 * e;
      out[1] += -2.0 * d.y() / L2 * e;
      const double w = 4.0 / L2 * (1.0 - s) * e;  // omega = -lap psi
      out[2] += w;
      // d omega / d r_k = e * (4/L2) * (-2 d_k / L2) * (2 - s)
      out[3] += -8.0 * d.x() / (L2 * L2) * (2.0 - s) * e;
      out[4] += -8.0 * d.y() / (L2 * L2) * (2.0 - s) * e;
      // lap g(s) = (4/L2)(s g'' + g') for radial g with s = r^2/L^2
      out[5] += -16.0 / (L2 * L2) * (s * s - 4.0 * s + 2.0) * e;
    }
    return out;
  }
};

}  // namespace

TEST_CASE("advection-diffusion examples") {
  const auto rule = make_rule(PeriodicInterval{2.0 * kPi}, 32);
  const Points& x = rule.nodes();
  SUBCASE("constant field") {
    LinearModes constant(fourier_modes(1, 2.0 * kPi));
    CHECK(advection_diffusion(1.3, 0.7)->rhs(constant, Eigen::VectorXd::Ones(1), x).cwiseAbs().maxCoeff() <
          1e-15);
  }
  SUBCASE("pure advection and pure diffusion of sin x") {
    SineWave sine;
    const Eigen::Vector3d q(1.0, 1.0, 0.0);
    const RealField F1 = advection_diffusion(1.0, 0.0)->rhs(sine, q, x);
    const RealField F2 = advection_diffusion(0.0, 1.0)->rhs(sine, q, x);
    CHECK((F1 + x.col(0).array().cos().matrix()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((F2 + x.col(0).array().sin().matrix()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("negative viscosity") {
    CHECK_THROWS_AS(advection_diffusion(1.0, -0.1), ValidationError);
    CHECK_THROWS_AS(vorticity(-1.0), ValidationError);
  }
}

TEST_CASE("property: advection-diffusion is linear in the field") {
  LinearModes modes(fourier_modes(7, 2.0 * kPi));
  const auto rule = make_rule(PeriodicInterval{2.0 * kPi}, 48);
  const auto model = advection_diffusion(0.8, 0.3);
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd a = rng.normal_vector(7), b = rng.normal_vector(7);
    const double s = rng.uniform(-2.0, 2.0);
    const RealField lhs = model->rhs(modes, a + s * b, rule.nodes());
    const RealField rhs = model->rhs(modes, a, rule.nodes()) + s * model->rhs(modes, b, rule.nodes());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("NLSE right-hand side") {
  const auto model = nlse();
  ComplexConstant constant;
  const Points x = line_points({-1.0, 0.0, 2.5});
  CHECK(model->rhs(constant, Eigen::VectorXd::Zero(1), x).cwiseAbs().maxCoeff() == 0.0);
  const ComplexField F = model->rhs(constant, Eigen::VectorXd::Constant(1, 0.7), x);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(F(i) - cplx(0.0, 0.343)) < 1e-15);

  // u_xx(0) = -2A/L^2 by hand, so F(0) = i(-0.016 + 0.008).
  const ComplexField G = model->rhs(NlseGaussian(), Eigen::Vector4d(0.2, 5.0, 0.0, 0.0),
                                    line_points({0.0}));
  CHECK(std::abs(G(0) - cplx(0.0, -0.008)) < 1e-15);
}

TEST_CASE("vorticity right-hand side") {
  const auto rule = make_rule(Plane{4.0, 4.0}, 40);
  SUBCASE("a single vortex is steady") {
    const RealField F = vorticity(0.0)->rhs(GaussianVortices(1), Eigen::Vector4d(1.0, 1.0, 0.0, 0.0),
                                            rule.nodes());
    CHECK(F.cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("zero stream function") {
    const std::array<double, 2> A{1.0, -1.0}, L{0.8, 0.8};
    const std::array<Eigen::Vector2d, 2> c{Eigen::Vector2d(0.3, 0.1), Eigen::Vector2d(0.3, 0.1)};
    const RealField F = vorticity(0.0)->rhs(GaussianVortices(2), GaussianVortices::pack(A, L, c),
                                            rule.nodes());
    CHECK(F.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("dipole: F flips sign under y -> -y") {
    const std::array<double, 2> A{1.0, -1.0}, L{0.75, 0.75};
    const std::array<Eigen::Vector2d, 2> c{Eigen::Vector2d(-3.0, 0.5), Eigen::Vector2d(-3.0, -0.5)};
    const ParameterVector q = GaussianVortices::pack(A, L, c);
    Rng rng(8);
    Points x(200, 2), mirrored(200, 2);
    for (int i = 0; i < 200; ++i) {
      x(i, 0) = rng.uniform(-5.0, -1.0);
      x(i, 1) = rng.uniform(-2.0, 2.0);
      mirrored(i, 0) = x(i, 0);
      mirrored(i, 1) = -x(i, 1);
    }
    const auto model = vorticity(0.0);
    const RealField F = model->rhs(GaussianVortices(2), q, x);
    const RealField Fm = model->rhs(GaussianVortices(2), q, mirrored);
    CHECK(F.cwiseAbs().maxCoeff() > 1e-3);
    CHECK((F + Fm).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("matches radial closed forms for random vortex sets") {
    Rng rng(99);
    GaussianVortices family(3);
    for (int trial = 0; trial < 20; ++trial) {
      const ParameterVector q = random_parameters("gaussian-vortices", 12, rng);
      const double nu = rng.uniform(0.0, 0.2);
      RadialVortexOracle oracle;
      for (int v = 0; v < 3; ++v) {
        oracle.A.push_back(q(4 * v));
        oracle.L.push_back(q(4 * v + 1));
        oracle.c.push_back(family.center(q, v));
      }
      const Points x = random_points("gaussian-vortices", 2, q, 40, rng);
      const RealField F = vorticity(nu)->rhs(family, q, x);
      const RealField w = vorticity(nu)->state(family, q, x);
      RealField expected(x.rows()), omega(x.rows());
      for (Eigen::Index n = 0; n < x.rows(); ++n) {
        const auto r = oracle.at(x.row(n).transpose());
        const double ux = r[1], uy = -r[0];
        expected(n) = -(ux * r[3] + uy * r[4]) + nu * r[5];
        omega(n) = r[2];
      }
      CHECK(column_relative_error(F, expected) < 1e-12);
      CHECK(column_relative_error(w, omega) < 1e-12);
    }
  }
}

TEST_CASE("NLSE invariants: closed forms") {
  const auto qs = nlse_invariants();
  REQUIRE(qs.size() == 2);
  CHECK(qs[0]->name() == "mass");
  CHECK(qs[1]->name() == "energy");
  const NlseGaussian g;
  const auto rule = make_rule(RealLine{100.0}, 800);
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const ParameterVector q = random_parameters("nlse-gaussian", 4, rng);
    const double A = q(0), L = q(1), V = q(2);
    const double I1 = std::sqrt(kPi / 2.0) * A * A * L;
    const double I2 = std::sqrt(kPi) * A * A * (2.0 * std::sqrt(2.0) * (L * L * V * V + 1.0) - A * A * L * L) /
                      (8.0 * L);
    CHECK(qs[0]->value(g, q, rule) == doctest::Approx(I1).epsilon(1e-14));
    CHECK(qs[1]->value(g, q, rule) == doctest::Approx(I2).epsilon(1e-12));
  }
  CHECK(qs[0]->value(g, Eigen::Vector4d(0.2, 5.0, 0.0, 0.0), rule) ==
        doctest::Approx(0.2506628).epsilon(1e-7));
}

TEST_CASE("property: NLSE closed forms agree with quadrature to 1e-8") {
  const auto closed = nlse_invariants();
  const auto quad = nlse_invariants_quadrature();
  const NlseGaussian g;
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const ParameterVector q = random_parameters("nlse-gaussian", 4, rng);
    const auto rule = make_rule(RealLine{8.0 * q(1)}, 1200);
    for (int k = 0; k < 2; ++k) {
      const double a = closed[k]->value(g, q, rule), b = quad[k]->value(g, q, rule);
      INFO("trial ", trial, " quantity ", k);
      CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
      const Eigen::VectorXd ga = closed[k]->gradient(g, q, rule), gb = quad[k]->gradient(g, q, rule);
      CHECK((ga - gb).cwiseAbs().maxCoeff() <= 1e-8 * ga.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("Euler invariants") {
  const auto qs = euler_invariants();
  REQUIRE(qs.size() == 2);
  const auto rule = make_rule(Plane{8.0, 8.0}, 160);

  SUBCASE("zero stream function") {
    const std::array<double, 2> A{1.0, -1.0}, L{1.0, 1.0};
    const std::array<Eigen::Vector2d, 2> c{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    const auto q = GaussianVortices::pack(A, L, c);
    CHECK(qs[0]->value(GaussianVortices(2), q, rule) == 0.0);
    CHECK(qs[1]->value(GaussianVortices(2), q, rule) == 0.0);
  }
  SUBCASE("single vortex against Gaussian moments") {
    // Radial moments by composite Simpson on [0, 12]:
    // energy  = 1/2 int 4 r^2 e^{-2 r^2} 2 pi r dr
    // enstrophy = 1/2 int 16 (1 - r^2)^2 e^{-2 r^2} 2 pi r dr
    const int m = 20000;
    const double h = 12.0 / m;
    double energy = 0.0, enstrophy = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double r = i * h, wgt = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double e2 = std::exp(-2.0 * r * r);
      energy += wgt * 0.5 * 4.0 * r * r * e2 * 2.0 * kPi * r;
      enstrophy += wgt * 0.5 * 16.0 * std::pow(1.0 - r * r, 2) * e2 * 2.0 * kPi * r;
    }
    energy *= h / 3.0;
    enstrophy *= h / 3.0;
    const Eigen::Vector4d q(1.0, 1.0, 0.0, 0.0);
    CHECK(qs[0]->value(GaussianVortices(1), q, rule) == doctest::Approx(energy).epsilon(1e-10));
    CHECK(qs[1]->value(GaussianVortices(1), q, rule) == doctest::Approx(enstrophy).epsilon(1e-10));
    CHECK(gaussian_vortex_energy(1.0) == doctest::Approx(energy).epsilon(1e-10));
    CHECK(gaussian_vortex_enstrophy(1.0, 1.0) == doctest::Approx(enstrophy).epsilon(1e-10));
  }
  SUBCASE("far-separated vortices are additive") {
    const auto wide = make_plane_rule(Plane{20.0, 6.0}, 320, 96);
    const std::array<double, 2> A{0.7, 0.7}, L{0.9, 0.9};
    const std::array<Eigen::Vector2d, 2> c{Eigen::Vector2d(-10.0, 0.0), Eigen::Vector2d(10.0, 0.0)};
    const auto q2 = GaussianVortices::pack(A, L, c);
    const Eigen::Vector4d q1(0.7, 0.9, 0.0, 0.0);
    for (int k = 0; k < 2; ++k) {
      const double pair = qs[k]->value(GaussianVortices(2), q2, wide);
      const double single = qs[k]->value(GaussianVortices(1), q1, rule);
      CHECK(std::abs(pair - 2.0 * single) <= 1e-6 * std::abs(pair));
    }
  }
}

TEST_CASE("property: quantity gradients match finite differences") {
  Rng rng(123);
  SUBCASE("NLSE") {
    const NlseGaussian g;
    const auto rule = make_rule(RealLine{100.0}, 8);
    for (const auto& qty : nlse_invariants()) {
      for (int trial = 0; trial < 50; ++trial) {
        const ParameterVector q = random_parameters("nlse-gaussian", 4, rng);
        const Eigen::VectorXd fd = fd_jacobian(
            [&](const ParameterVector& p) { return Eigen::VectorXd::Constant(1, qty->value(g, p, rule)); },
            q).transpose();
        CHECK(column_relative_error(qty->gradient(g, q, rule), fd) <= 1e-6);
      }
    }
  }
  SUBCASE("NLSE by quadrature") {
    const NlseGaussian g;
    for (const auto& qty : nlse_invariants_quadrature()) {
      for (int trial = 0; trial < 50; ++trial) {
        const ParameterVector q = random_parameters("nlse-gaussian", 4, rng);
        const auto rule = make_rule(RealLine{8.0 * q(1)}, 600);
        const Eigen::VectorXd fd = fd_jacobian(
            [&](const ParameterVector& p) { return Eigen::VectorXd::Constant(1, qty->value(g, p, rule)); },
            q).transpose();
        CHECK(column_relative_error(qty->gradient(g, q, rule), fd) <= 1e-6);
      }
    }
  }
  SUBCASE("Euler") {
    GaussianVortices family(2);
    const auto rule = make_rule(Plane{6.0, 6.0}, 100);
    for (const auto& qty : euler_invariants()) {
      for (int trial = 0; trial < 50; ++trial) {
        const ParameterVector q = random_parameters("gaussian-vortices", 8, rng);
        const Eigen::VectorXd fd = fd_jacobian(
            [&](const ParameterVector& p) {
              return Eigen::VectorXd::Constant(1, qty->value(family, p, rule));
            },
            q).transpose();
        INFO(qty->name(), " trial ", trial);
        CHECK(column_relative_error(qty->gradient(family, q, rule), fd) <= 1e-6);
      }
    }
  }
}
