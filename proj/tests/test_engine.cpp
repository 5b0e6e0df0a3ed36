#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rons/engine.hpp"
#include "support.hpp"

using namespace rons;
using namespace rons::testing;

namespace {

// int u^2 by quadrature; not conserved under diffusion, so enforcing it
// produces a nonzero multiplier.
class SquaredNorm final : public ConservedQuantity<double> {
 public:
  std::string name() const override { return "squared-norm"; }
  double value(const RealFamily& family, const ParameterVector& q,
               const QuadratureRule& rule) const override {
    return norm_sq(sample(family, q, rule), rule);
  }
  Eigen::VectorXd gradient(const RealFamily& family, const ParameterVector& q,
                           const QuadratureRule& rule) const override {
    const auto basis = tangent_basis(family, q, rule);
    return 2.0 * project(basis.fields, sample(family, q, rule), rule);
  }
};

QuadratureRule sine_rule(double L) { return make_rule(PeriodicInterval{2.0 * kPi * L}, 64); }

ParameterVector dipole() {
  const std::array<double, 2> A{1.0, -1.0}, L{0.75, 0.75};
  const std::array<Eigen::Vector2d, 2> c{Eigen::Vector2d(-3.0, 0.5), Eigen::Vector2d(-3.0, -0.5)};
  return GaussianVortices::pack(A, L, c);
}

double symmetry_error(const Eigen::MatrixXd& A) { return (A - A.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("orthonormal linear modes have identity metric") {
  const LinearModes modes(fourier_modes(7, 2.0 * kPi));
  const auto rule = make_rule(PeriodicInterval{2.0 * kPi}, 32);
  Rng rng(1);
  const auto sys = assemble(modes, rng.normal_vector(7), *advection_diffusion(1.0, 0.1), rule);
  CHECK((sys.metric.entries - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK_FALSE(sys.constraints);
  CHECK((sys.rate - sys.metric.factor.solve(sys.forcing)).norm() == 0.0);
}

TEST_CASE("advection-diffusion sine ansatz reproduces the exact rates") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ParameterVector q = random_parameters("sine", 3, rng);
    const double c = rng.uniform(-2.0, 2.0), nu = rng.uniform(0.0, 0.5);
    const auto rule = sine_rule(q(1));
    const auto sys = assemble(SineWave(), q, *advection_diffusion(c, nu), rule);
    const Eigen::Vector3d expected(-nu * q(0) / (q(1) * q(1)), 0.0, -c / q(1));
    CHECK((reduced_rhs(sys) - expected).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + expected.norm()));

    const auto exact = residual(sys, expected);
    CHECK(exact.J <= 1e-16 * std::max(exact.J_raw, 1.0));
    const auto idle = residual(sys, Eigen::Vector3d::Zero());
    CHECK(idle.J == idle.J_raw);
    CHECK(idle.condition_C == 0.0);
    CHECK(idle.condition_M >= 1.0);
  }
}

TEST_CASE("zero forcing gives a zero rate with or without constraints") {
  const ParameterVector q = Eigen::Vector3d(1.2, 0.8, 0.3);
  const auto rule = sine_rule(0.8);
  const QuantityList<double> qs{std::make_shared<SquaredNorm>()};
  const auto sys = assemble(SineWave(), q, *advection_diffusion(0.0, 0.0), rule, qs);
  REQUIRE(sys.constraints);
  CHECK(sys.constraints->b.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.constraints->lambda.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.rate.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("b = 0 gives lambda = 0 and the unconstrained rate") {
  // Pure advection keeps int u^2 fixed, so f is already tangent to its level set.
  const ParameterVector q = Eigen::Vector3d(0.7, 1.3, -0.4);
  const auto rule = sine_rule(1.3);
  const QuantityList<double> qs{std::make_shared<SquaredNorm>()};
  const auto sys = assemble(SineWave(), q, *advection_diffusion(1.5, 0.0), rule, qs);
  REQUIRE(sys.constraints);
  CHECK(std::abs(sys.constraints->b(0)) < 1e-12);
  CHECK(std::abs(sys.constraints->lambda(0)) < 1e-12);
  CHECK((sys.rate - sys.unconstrained_rate).norm() < 1e-12);
}

TEST_CASE("diffusion under an enforced norm constraint") {
  const ParameterVector q = Eigen::Vector3d(1.0, 1.0, 0.0);
  const auto rule = sine_rule(1.0);
  const QuantityList<double> qs{std::make_shared<SquaredNorm>()};
  const auto model = advection_diffusion(1.0, 0.1);
  const auto con = assemble(SineWave(), q, *model, rule, qs);
  const auto unc = assemble(SineWave(), q, *model, rule);
  REQUIRE(con.constraints);
  CHECK(std::abs(con.constraints->lambda(0)) > 1e-3);
  // Amplitude decay is the only way to lose norm; the constraint removes it.
  CHECK(std::abs(con.rate(0)) < 1e-12);
  CHECK(std::abs(con.rate(2) + 1.0) < 1e-12);
  CHECK(residual(con, con.rate).J >= residual(unc, unc.rate).J);
  CHECK(con.constraint_violation <= 1e-9);
}

TEST_CASE("assembly errors") {
  const auto rule = make_rule(PeriodicInterval{2.0 * kPi}, 32);
  SUBCASE("repeated mode is not an immersion") {
    auto modes = fourier_modes(3, 2.0 * kPi);
    modes.push_back(modes[2]);
    CHECK_THROWS_AS(assemble(LinearModes(modes), Eigen::Vector4d::Zero(), *advection_diffusion(1.0, 0.0),
                             rule),
                    ImmersionError);
  }
  SUBCASE("duplicated constraint") {
    const QuantityList<double> qs{std::make_shared<SquaredNorm>(), std::make_shared<SquaredNorm>()};
    CHECK_THROWS_AS(assemble(SineWave(), Eigen::Vector3d(1.0, 1.0, 0.0), *advection_diffusion(1.0, 0.1),
                             rule, qs),
                    DependentConstraintsError);
  }
  SUBCASE("outside the admissible set") {
    CHECK_THROWS_AS(assemble(SineWave(), Eigen::Vector3d(1.0, -1.0, 0.0), *advection_diffusion(1.0, 0.1),
                             rule),
                    DomainError);
  }
  SUBCASE("qdot of the wrong length") {
    const auto sys = assemble(SineWave(), Eigen::Vector3d(1.0, 1.0, 0.0), *advection_diffusion(1.0, 0.1),
                              rule);
    CHECK_THROWS_AS(residual(sys, Eigen::Vector2d::Zero()), AlignmentError);
  }
}

TEST_CASE("jitter is opt-in and flagged") {
  const auto rule = sine_rule(1.0);
  const auto plain = assemble(SineWave(), Eigen::Vector3d(1.0, 1.0, 0.0), *advection_diffusion(1.0, 0.1), rule);
  CHECK(plain.warnings.empty());
  AssemblyOptions opts;
  opts.jitter = 1e-6;
  const auto jittered = assemble(SineWave(), Eigen::Vector3d(1.0, 1.0, 0.0), *advection_diffusion(1.0, 0.1),
                                 rule, QuantityList<double>{}, opts);
  REQUIRE(jittered.warnings.size() == 1);
  CHECK((jittered.metric.entries - plain.metric.entries).diagonal().minCoeff() > 0.0);
}

TEST_CASE("tracking rules follow the support box") {
  const auto provider = RuleProvider::tracking();
  CHECK_FALSE(provider.is_fixed());
  const auto rule = provider.rule_for(GaussianVortices(2), dipole());
  CHECK(rule->dimension() == 2);
  CHECK(rule->nodes().col(0).minCoeff() < -3.0 - 6.0 * 0.75 + 0.5);
  CHECK(rule->nodes().col(0).maxCoeff() > -3.0 + 6.0 * 0.75 - 0.5);
  CHECK_THROWS_AS(provider.rule_for(SineWave(), Eigen::Vector3d(1.0, 1.0, 0.0)), ValidationError);
  CHECK_THROWS_AS(RuleProvider::tracking({-1.0, 0.25, 16}), ValidationError);
  const auto fixed = RuleProvider::fixed(sine_rule(1.0));
  CHECK(fixed.rule_for(SineWave(), Eigen::Vector3d(1.0, 1.0, 0.0))->size() == 64);
}

TEST_CASE("property: the unconstrained rate minimizes J") {
  Rng rng(3);
  const auto check = [&](const auto& sys) {
    const Eigen::VectorXd& qdot = sys.unconstrained_rate;
    const double best = residual(sys, qdot).J;
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd delta = rng.normal_vector(qdot.size()).normalized() * 1e-3 * qdot.norm();
      CHECK(residual(sys, Eigen::VectorXd(qdot + delta)).J > best);
    }
    CHECK(best <= residual(sys, Eigen::VectorXd::Zero(qdot.size())).J_raw);
  };
  SUBCASE("NLSE Gaussian") {
    const ParameterVector q = random_parameters("nlse-gaussian", 4, rng);
    check(assemble(NlseGaussian(), q, *nlse(), make_rule(RealLine{8.0 * q(1)}, 400)));
  }
  SUBCASE("vortex dipole") {
    check(assemble(GaussianVortices(2), dipole(), *vorticity(0.0), make_rule(Plane{8.0, 6.0, {-3.0, 0.0}}, 96)));
  }
  SUBCASE("centred heat kernel under advection") {
    const ParameterVector q = Eigen::Vector2d(1.0, 0.8);
    check(assemble(HeatKernel(1), q, *advection_diffusion(0.4, 0.2), make_rule(RealLine{8.0}, 200)));
  }
}

TEST_CASE("property: constrained rates are tangent to the constraint level sets") {
  Rng rng(4);
  SUBCASE("NLSE Gaussian with mass and energy") {
    for (int trial = 0; trial < 50; ++trial) {
      const ParameterVector q = random_parameters("nlse-gaussian", 4, rng);
      const auto rule = make_rule(RealLine{8.0 * q(1)}, 400);
      const auto con = assemble(NlseGaussian(), q, *nlse(), rule, nlse_invariants());
      const auto unc = assemble(NlseGaussian(), q, *nlse(), rule);
      REQUIRE(con.constraints);
      CHECK(symmetry_error(con.metric.entries) <= 1e-12 * con.metric.entries.cwiseAbs().maxCoeff());
      CHECK(symmetry_error(con.constraints->matrix) == 0.0);
      for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXd g = con.quantity_gradients.col(k);
        CHECK(std::abs(g.dot(con.rate)) <= 1e-9 * g.norm() * con.rate.norm());
      }
      CHECK(residual(unc, unc.rate).J <= residual(con, con.rate).J * (1.0 + 1e-12) + 1e-300);
    }
  }
  SUBCASE("vortex pair with energy and enstrophy") {
    GaussianVortices family(2);
    for (int trial = 0; trial < 10; ++trial) {
      ParameterVector q = random_parameters("gaussian-vortices", 8, rng);
      q(6) += 3.0;  // keep the cores apart
      const auto rule = make_rule(Plane{10.0, 10.0, {1.5, 0.0}}, 120);
      const auto con = assemble(family, q, *vorticity(0.0), rule, euler_invariants());
      const auto unc = assemble(family, q, *vorticity(0.0), rule);
      for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXd g = con.quantity_gradients.col(k);
        CHECK(std::abs(g.dot(con.rate)) <= 1e-9 * g.norm() * con.rate.norm());
      }
      CHECK(con.constraint_violation <= 1e-9);
      CHECK(residual(unc, unc.rate).J <= residual(con, con.rate).J * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("property: linear modes reproduce the Galerkin projection") {
  const LinearModes modes(fourier_modes(9, 2.0 * kPi));
  const auto rule = make_rule(PeriodicInterval{2.0 * kPi}, 48);
  const auto model = advection_diffusion(0.7, 0.05);
  const Eigen::MatrixXd U = modes.sample_modes(rule.nodes());
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ParameterVector q = rng.normal_vector(9);
    const auto sys = assemble(modes, q, *model, rule);
    const Eigen::VectorXd galerkin = project(U, model->rhs(modes, q, rule.nodes()), rule);
    CHECK((reduced_rhs(sys) - galerkin).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, galerkin.norm()));
  }
}

TEST_CASE("fit_initial") {
  const NlseGaussian g;
  const ParameterVector truth = Eigen::Vector4d(0.4, 3.0, 0.05, 0.3);
  const auto rule = make_rule(RealLine{30.0}, 400);
  const ComplexField u0 = sample(g, truth, rule);

  SUBCASE("zero-residual target") {
    const auto fit = fit_initial(g, u0, rule, ParameterVector(Eigen::Vector4d(0.35, 3.3, 0.04, 0.2)));
    CHECK(fit.converged);
    CHECK((fit.q - truth).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fit.residual_norm < 1e-8);
  }
  SUBCASE("perturbation orthogonal to the tangent space") {
    Rng rng(6);
    const auto basis = tangent_basis(g, truth, rule);
    ComplexField p(rule.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double x = rule.nodes()(i, 0);
      p(i) = cplx(rng.normal(), rng.normal()) * std::exp(-x * x / 20.0);
    }
    const Eigen::MatrixXd M = gram(basis.fields, basis.fields, rule);
    p -= basis.fields * M.llt().solve(project(basis.fields, p, rule)).cast<cplx>();
    p *= 1e-4 / std::sqrt(norm_sq(p, rule));
    const auto fit = fit_initial(g, ComplexField(u0 + p), rule, truth);
    CHECK((fit.q - truth).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(fit.residual_norm == doctest::Approx(1e-4).epsilon(1e-3));
  }
  SUBCASE("guess far outside the basin") {
    ParameterVector guess = truth;
    guess(1) *= 100.0;
    try {
      const auto fit = fit_initial(g, u0, rule, guess);
      // Converged somewhere; the reported residual must be the true one.
      const double actual = std::sqrt(norm_sq(ComplexField(u0 - sample(g, fit.q, rule)), rule));
      CHECK(fit.residual_norm == doctest::Approx(actual).epsilon(1e-10));
    } catch (const FitError& e) {
      CHECK(e.best_iterate().size() == 4);
      const double actual = std::sqrt(norm_sq(ComplexField(u0 - sample(g, e.best_iterate(), rule)), rule));
      CHECK(e.best_residual() == doctest::Approx(actual).epsilon(1e-10));
    }
  }
  SUBCASE("iteration cap raises a fit error carrying the best iterate") {
    FitOptions opts;
    opts.max_iterations = 1;
    ParameterVector guess = truth;
    guess(1) = 6.0;
    try {
      fit_initial(g, u0, rule, guess, opts);
      FAIL("expected a fit error");
    } catch (const FitError& e) {
      CHECK(std::string(e.category()) == "fit");
      const double start = std::sqrt(norm_sq(ComplexField(u0 - sample(g, guess, rule)), rule));
      CHECK(e.best_residual() < start);
    }
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(fit_initial(g, u0, rule, ParameterVector(Eigen::Vector4d(0.4, -3.0, 0.0, 0.0))),
                    DomainError);
    CHECK_THROWS_AS(fit_initial(g, ComplexField(u0.head(10)), rule, truth), AlignmentError);
  }
}
