#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/AutoDiff>

#include "hoc/problems.hpp"

using namespace hoc;
using std::numbers::pi;

namespace {

using AD1 = Eigen::AutoDiffScalar<Eigen::Vector2d>;
using AD2 = Eigen::AutoDiffScalar<Eigen::Matrix<AD1, 2, 1>>;

struct Jet {
  double u;
  Eigen::Vector2d grad;
  Eigen::Vector3d hess;  // u_xx, u_xy, u_yy
};

AD2 seed(double v, int dir) {
  AD1 inner(v, 2, dir);
  AD2 out(inner);
  out.derivatives().resize(2);
  out.derivatives()(0) = AD1(dir == 0 ? 1.0 : 0.0, Eigen::Vector2d::Zero());
  out.derivatives()(1) = AD1(dir == 1 ? 1.0 : 0.0, Eigen::Vector2d::Zero());
  return out;
}

template <typename Fn>
Jet jet(Fn&& f, double x, double y) {
  const AD2 r = f(seed(x, 0), seed(y, 1));
  return {r.value().value(),
          {r.value().derivatives()(0), r.value().derivatives()(1)},
          {r.derivatives()(0).derivatives()(0), r.derivatives()(0).derivatives()(1),
           r.derivatives()(1).derivatives()(1)}};
}

}  // namespace

TEST_CASE("hand-derived derivatives and forcing match automatic differentiation") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  const TestProblem p1 = problem1();
  const TestProblem p2 = problem2(0.05);
  const TestProblem pv = ns_vortex(10.0);
  double worst1 = 0, worst2 = 0, worstv = 0;
  for (int n = 0; n < 1000; ++n) {
    const double x = U(rng), y = U(rng), t = 0.5 * U(rng);
    {
      const Jet J = jet([t](const AD2& X, const AD2& Y) { return problem1_exact(X, Y, AD2(t)); }, x, y);
      const double beta_eq = (1 - x) * (1 - y) * std::exp(x + y);
      const double f = -pi * J.u - J.hess(0) + beta_eq * J.hess(1) - J.hess(2) +
                       10 * x * (1 - y) * J.grad(0) - 10 * y * J.grad(1);
      const double sc = 1 + std::abs(f);
      worst1 = std::max(worst1, std::abs(f - p1.coeffs.s(x, y, t)) / sc);
      worst1 = std::max(worst1, (J.grad - p1.exact_gradient(x, y, t)).cwiseAbs().maxCoeff() / sc);
      worst1 = std::max(worst1, std::abs(consistency_residual(p1, x, y, t)) / sc);
    }
    {
      const double eps = 0.05;
      const Jet J = jet([eps](const AD2& X, const AD2& Y) { return problem2_exact(X, Y, eps); }, x, y);
      const double s6 = std::sin(6 * x);
      const double c1 = -1.8 * std::cos(6 * x) / ((1 - 0.3 * s6) * (2 - 0.3 * s6));
      const double f = -eps * (J.hess(0) + J.hess(2)) + c1 * J.grad(0) + J.grad(1) / (1 + y);
      const double sc = 1 + std::abs(f) + std::abs(J.hess(0)) + std::abs(J.hess(2));
      worst2 = std::max(worst2, std::abs(f - p2.coeffs.s(x, y, 0)) / sc);
      worst2 = std::max(worst2, (J.hess - p2.exact_hessian(x, y, 0)).cwiseAbs().maxCoeff() / sc);
    }
    {
      const Jet J =
          jet([t](const AD2& X, const AD2& Y) { return vortex_streamfunction(X, Y, AD2(t), 10.0); }, x, y);
      worstv = std::max(worstv, std::abs(-(J.hess(0) + J.hess(2)) - pv.exact_vorticity(x, y, t)));
      worstv = std::max(worstv, (J.grad - pv.exact_gradient(x, y, t)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst1 < 1e-12);
  CHECK(worst2 < 1e-11);
  CHECK(worstv < 1e-12);
}

TEST_CASE("exact solution reference values") {
  CHECK(problem1_exact(1.0, 0.0, 0.0) == doctest::Approx(std::cosh(1.0)));
  CHECK(problem1_exact(0.5, 0.5, 0.3) == doctest::Approx(0.0));
  // (1+y)^{1+1/eps} (1/2)^{1/eps} is negligible at the origin for small eps.
  CHECK(problem2_exact(0.0, 0.0, 0.01) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vortex_streamfunction(0.5, 0.5, 0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("problem construction") {
  CHECK_THROWS_AS(problem2(0.0), DomainError);
  CHECK_THROWS_AS(problem_by_name("problem9"), ConfigError);
  CHECK(problem_by_name("problem2", 0.02).epsilon == 0.02);
  CHECK(problem_by_name("ns-vortex", 0.01, 0.9, 5.0).reynolds == 5.0);
  const TestProblem p = problem1();
  CHECK_FALSE(p.steady);
  CHECK(p.recommended_grids == std::vector<int>{11, 21, 41});

  // problem1 diffusion is positive definite on the unit square
  const Grid2D g = build_uniform_grid({}, 10, 10);
  CHECK(discretize(p, g, 0.1).positive_definite());
  CHECK(discretize(problem2(0.01), g, 0.0).positive_definite());
}

TEST_CASE("exact state is deterministic and consistent with the mapping") {
  const TestProblem p = problem2(0.1);
  const Grid2D g = build_uniform_grid({}, 8, 8);
  const RealState a = exact_state(p, g, 0.0), b = exact_state(p, g, 0.0);
  CHECK((a.phi == b.phi).all());
  CHECK((a.phi_x == b.phi_x).all());
  // top edge lies on y = 1/(1 - 0.3 sin 6x)
  const Eigen::Vector2d top = p.mapping(g.x(3), 1.0);
  CHECK(top.y() == doctest::Approx(1.0 / (1.0 - 0.3 * std::sin(6 * g.x(3)))));
  CHECK(a.phi(3, 8) == doctest::Approx(problem2_exact(top.x(), top.y(), 0.1)));
}

TEST_CASE("error norms and orders") {
  const Grid2D g = build_uniform_grid({}, 2, 2);
  RealField exact = make_field(g), num = make_field(g);
  num(1, 1) = 0.9;
  num(0, 0) = -0.3;
  const ErrorNorms m = error_norms(num, exact);
  CHECK(m.L1 == doctest::Approx(1.2 / 9));
  CHECK(m.L2 == doctest::Approx(std::sqrt(0.9 / 9)));
  CHECK(m.Linf == doctest::Approx(0.9));
  const ErrorNorms w = error_norms(num, exact, g, NormConvention::GridIntegral);
  CHECK(w.L1 == doctest::Approx(1.2 * 0.25));
  CHECK(w.L2 == doctest::Approx(std::sqrt(0.9 * 0.25)));
  CHECK(w.Linf == doctest::Approx(0.9));
  CHECK_THROWS_AS(error_norms(num, RealField::Zero(2, 2)), DomainError);
  CHECK(convergence_order(1.6e-3, 1e-4) == doctest::Approx(4.0));
  CHECK_THROWS_AS(convergence_order(0.0, 1.0), DomainError);
  CHECK(norm_convention_from_name("grid-integral") == NormConvention::GridIntegral);
  CHECK(to_string(NormConvention::Mean) == "mean");
  CHECK_THROWS_AS(norm_convention_from_name("l7"), ConfigError);
}
