#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hoc/grid.hpp"

using namespace hoc;
using std::numbers::pi;

TEST_CASE("uniform grid spacing and validation") {
  const Grid2D g = build_uniform_grid({0, 2, -1, 1}, 8, 4);
  CHECK(g.h == doctest::Approx(0.25));
  CHECK(g.k == doctest::Approx(0.5));
  CHECK(g.x(8) == doctest::Approx(2.0));
  CHECK(g.y(0) == doctest::Approx(-1.0));
  CHECK(g.interior_count() == 21);
  CHECK_THROWS_AS(build_uniform_grid({}, 1, 4), InvalidGridError);
  CHECK_THROWS_AS(build_uniform_grid({1, 1, 0, 1}, 4, 4), InvalidGridError);
}

TEST_CASE("analytic and finite-difference metrics agree") {
  for (const Mapping& m : {problem2_mapping(0.9), log_polar_mapping(), similarity_mapping(2.0, 0.3, 1, -1)}) {
    const Mapping fd = finite_difference_mapping(m.name + "-fd", m.forward);
    CHECK(m.provenance() == MetricProvenance::Analytic);
    CHECK(fd.provenance() == MetricProvenance::FiniteDifference);
    for (double xi : {0.1, 0.45, 0.8})
      for (double eta : {0.05, 0.5, 0.95}) {
        const Metric a = m.metric_at(xi, eta), b = fd.metric_at(xi, eta);
        CHECK(a.x_xi == doctest::Approx(b.x_xi).epsilon(1e-7));
        CHECK(a.x_eta == doctest::Approx(b.x_eta).epsilon(1e-7));
        CHECK(a.y_xi == doctest::Approx(b.y_xi).epsilon(1e-7));
        CHECK(a.y_eta == doctest::Approx(b.y_eta).epsilon(1e-7));
        const MapHessian ha = m.hessian_at(xi, eta), hb = fd.hessian_at(xi, eta);
        CHECK(ha.x_xieta == doctest::Approx(hb.x_xieta).epsilon(1e-5).scale(1.0));
        CHECK(ha.y_etaeta == doctest::Approx(hb.y_etaeta).epsilon(1e-5).scale(1.0));
      }
  }
}

TEST_CASE("mapping errors") {
  CHECK_THROWS_AS(problem2_mapping(1.0), NonMonotoneMappingError);
  CHECK_THROWS_AS(problem2_mapping(-0.1), DomainError);
  CHECK_THROWS_AS(similarity_mapping(0.0, 0.0), SingularMappingError);
  CHECK_THROWS_AS(mapping_by_name("spiral"), ConfigError);
  const Mapping flat = finite_difference_mapping("flat", [](double xi, double) {
    return Eigen::Vector2d(xi, 0.0);
  });
  CHECK_THROWS_AS(compute_geometry(flat, build_uniform_grid({}, 4, 4)), SingularMappingError);
}

TEST_CASE("geometry inverse derivatives") {
  const Grid2D g = build_uniform_grid({}, 6, 6);
  const GridGeometry geo = compute_geometry(problem2_mapping(0.5), g);
  for (int j = 0; j <= g.N; ++j)
    for (int i = 0; i <= g.M; ++i) {
      // [xi_x xi_y; eta_x eta_y] is the inverse of [x_xi x_eta; y_xi y_eta]
      CHECK(geo.xi_x(i, j) * geo.x_xi(i, j) + geo.xi_y(i, j) * geo.y_xi(i, j) == doctest::Approx(1.0));
      CHECK(geo.eta_x(i, j) * geo.x_eta(i, j) + geo.eta_y(i, j) * geo.y_eta(i, j) == doctest::Approx(1.0));
      CHECK(std::abs(geo.xi_x(i, j) * geo.x_eta(i, j) + geo.xi_y(i, j) * geo.y_eta(i, j)) < 1e-12);
    }
}

TEST_CASE("transformed operator agrees with the physical operator") {
  // u = sin(x) e^y under the log-polar map; the transformed operator applied to
  // u(x(xi,eta), y(xi,eta)) must reproduce the physical operator value.
  PhysicalCoefficients pc;
  pc.alpha1 = [](double x, double, double) { return 1.0 + x * x; };
  pc.alpha2 = [](double, double, double) { return 2.0; };
  pc.beta = [](double x, double y, double) { return 0.3 * x * y; };
  pc.c1 = [](double, double y, double) { return y; };
  pc.c2 = [](double, double, double) { return -1.0; };
  pc.d = [](double, double, double) { return 0.5; };
  pc.s = [](double x, double y, double) {
    const double u = std::sin(x) * std::exp(y), ux = std::cos(x) * std::exp(y);
    return (1 + x * x) * u - 2.0 * u - 0.3 * x * y * ux + y * ux - u + 0.5 * u;
  };
  const Mapping m = similarity_mapping(1.5, 0.4, 0.2, 0.1);
  const Grid2D g = build_uniform_grid({}, 8, 8);
  const CoefficientField cf = transform_scalar_pde(m, g, pc, 0.0);
  const double ca = std::cos(0.4), sa = std::sin(0.4);
  for (int j = 1; j < g.N; ++j)
    for (int i = 1; i < g.M; ++i) {
      const Eigen::Vector2d p = m(g.x(i), g.y(j));
      const double u = std::sin(p.x()) * std::exp(p.y());
      const double ux = std::cos(p.x()) * std::exp(p.y()), uy = u;
      const double uxx = -u, uxy = ux, uyy = u;
      // derivatives with respect to xi, eta under the similarity map
      const double s = 1.5;
      const double uxi = s * (ca * ux + sa * uy), ueta = s * (-sa * ux + ca * uy);
      const double uxixi = s * s * (ca * ca * uxx + 2 * ca * sa * uxy + sa * sa * uyy);
      const double uetaeta = s * s * (sa * sa * uxx - 2 * ca * sa * uxy + ca * ca * uyy);
      const double uxieta = s * s * (-ca * sa * uxx + (ca * ca - sa * sa) * uxy + ca * sa * uyy);
      const double lhs = -cf.alpha1(i, j) * uxixi - cf.beta(i, j) * uxieta - cf.alpha2(i, j) * uetaeta +
                         cf.c1(i, j) * uxi + cf.c2(i, j) * ueta + cf.d(i, j) * u;
      CHECK(lhs == doctest::Approx(cf.s(i, j)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("Navier-Stokes coefficients on identity and conformal maps") {
  const Grid2D g = build_uniform_grid({}, 6, 6);
  const RealField omega = sample(g, [](double x, double y) { return x + y; });
  const RealField u = make_field(g, 2.0), v = make_field(g, -1.0);
  const auto id = transform_navier_stokes(compute_geometry(identity_mapping(), g), 10.0, omega, u, v);
  CHECK((id.a1t - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(id.e1t.abs().maxCoeff() < 1e-12);
  CHECK((id.f1t - omega).abs().maxCoeff() < 1e-12);
  CHECK((id.a2t - 0.1).abs().maxCoeff() < 1e-12);
  CHECK((id.c2t - 2.0).abs().maxCoeff() < 1e-12);
  CHECK((id.d2t + 1.0).abs().maxCoeff() < 1e-12);

  const auto lp = transform_navier_stokes(compute_geometry(log_polar_mapping(), g), 10.0, omega, u, v);
  CHECK(lp.e1t.abs().maxCoeff() < 1e-10);
  CHECK(lp.e2t.abs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(transform_navier_stokes(compute_geometry(identity_mapping(), g), 0.0, omega, u, v),
                  DomainError);
}
