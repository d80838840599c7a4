#include "hoc/problems.hpp"

#include <cmath>
#include <numbers>

#include "hoc/errors.hpp"

namespace hoc {

namespace {

constexpr double kPi = std::numbers::pi;

SpaceTimeFn constant(double v) {
  return [v](double, double, double) { return v; };
}

}  // namespace

TestProblem problem1() {
  TestProblem p;
  p.name = "problem1";

  // Derivatives of u = e (x^2 - y^2) C with C = cosh(x+y), S = sinh(x+y), e = exp(-pi t).
  p.exact = [](double x, double y, double t) { return problem1_exact(x, y, t); };
  p.exact_gradient = [](double x, double y, double t) {
    const double e = std::exp(-kPi * t), w = x * x - y * y;
    const double C = std::cosh(x + y), S = std::sinh(x + y);
    return Eigen::Vector2d(e * (2.0 * x * C + w * S), e * (-2.0 * y * C + w * S));
  };
  p.exact_hessian = [](double x, double y, double t) {
    const double e = std::exp(-kPi * t), w = x * x - y * y;
    const double C = std::cosh(x + y), S = std::sinh(x + y);
    return Eigen::Vector3d(e * (2.0 * C + 4.0 * x * S + w * C),
                           e * (2.0 * (x - y) * S + w * C),
                           e * (-2.0 * C - 4.0 * y * S + w * C));
  };
  p.exact_time_derivative = [](double x, double y, double t) {
    return -kPi * problem1_exact(x, y, t);
  };

  // The equation carries +(1-x)(1-y)e^{x+y} u_xy on the left; the operator form is -beta u_xy.
  auto beta = [](double x, double y, double) { return -(1.0 - x) * (1.0 - y) * std::exp(x + y); };
  auto c1 = [](double x, double y, double) { return 10.0 * x * (1.0 - y); };
  auto c2 = [](double, double y, double) { return -10.0 * y; };
  p.coeffs.alpha1 = constant(1.0);
  p.coeffs.alpha2 = constant(1.0);
  p.coeffs.beta = beta;
  p.coeffs.c1 = c1;
  p.coeffs.c2 = c2;
  p.coeffs.d = constant(0.0);
  auto grad = p.exact_gradient;
  auto hess = p.exact_hessian;
  p.coeffs.s = [grad, hess, beta, c1, c2](double x, double y, double t) {
    const Eigen::Vector2d g = grad(x, y, t);
    const Eigen::Vector3d H = hess(x, y, t);
    return -kPi * problem1_exact(x, y, t) - H(0) - beta(x, y, t) * H(1) - H(2) +
           c1(x, y, t) * g(0) + c2(x, y, t) * g(1);
  };

  p.recommended_grids = {11, 21, 41};
  p.recommended_t_end = 0.25;
  return p;
}

TestProblem problem2(double epsilon, double lambda) {
  if (!(epsilon > 0.0)) throw DomainError("problem2: epsilon must be positive");
  TestProblem p;
  p.name = "problem2";
  p.epsilon = epsilon;
  p.lambda = lambda;
  p.mapping = problem2_mapping(lambda);
  p.steady = true;

  const double q = 1.0 / epsilon, pw = 1.0 + q;
  // psi = E + W with E = e^{y-x}, W = (1+y)^pw Q^q, Q = A/B, A = 1 - 0.3 sin 6x, B = A + 1.
  struct Parts {
    double E, W, R, Rp;
  };
  auto parts = [q, pw](double x, double y) {
    const double s = std::sin(6.0 * x), c = std::cos(6.0 * x);
    const double A = 1.0 - 0.3 * s, B = 2.0 - 0.3 * s;
    const double W = std::exp(pw * std::log(1.0 + y) + q * std::log(A / B));
    const double R = -1.8 * q * c / (A * B);
    const double Rp = -1.8 * q * (-6.0 * s / (A * B) + 1.8 * c * c * (A + B) / (A * A * B * B));
    return Parts{std::exp(y - x), W, R, Rp};
  };

  p.exact = [epsilon](double x, double y, double) { return problem2_exact(x, y, epsilon); };
  p.exact_gradient = [parts, pw](double x, double y, double) {
    const Parts P = parts(x, y);
    return Eigen::Vector2d(-P.E + P.W * P.R, P.E + P.W * pw / (1.0 + y));
  };
  p.exact_hessian = [parts, pw](double x, double y, double) {
    const Parts P = parts(x, y);
    const double yy = 1.0 + y;
    return Eigen::Vector3d(P.E + P.W * (P.R * P.R + P.Rp), -P.E + P.W * P.R * pw / yy,
                           P.E + P.W * pw * (pw - 1.0) / (yy * yy));
  };
  p.exact_time_derivative = constant(0.0);

  auto c1 = [](double x, double, double) {
    const double s = std::sin(6.0 * x);
    return -1.8 * std::cos(6.0 * x) / ((1.0 - 0.3 * s) * (2.0 - 0.3 * s));
  };
  auto c2 = [](double, double y, double) { return 1.0 / (1.0 + y); };
  p.coeffs.alpha1 = constant(epsilon);
  p.coeffs.alpha2 = constant(epsilon);
  p.coeffs.beta = constant(0.0);
  p.coeffs.c1 = c1;
  p.coeffs.c2 = c2;
  p.coeffs.d = constant(0.0);
  auto grad = p.exact_gradient;
  auto hess = p.exact_hessian;
  p.coeffs.s = [grad, hess, c1, c2, epsilon](double x, double y, double t) {
    const Eigen::Vector2d g = grad(x, y, t);
    const Eigen::Vector3d H = hess(x, y, t);
    return -epsilon * (H(0) + H(2)) + c1(x, y, t) * g(0) + c2(x, y, t) * g(1);
  };

  p.recommended_grids = {65, 129, 257};
  return p;
}

TestProblem ns_vortex(double reynolds, Mapping mapping) {
  if (!(reynolds > 0.0)) throw DomainError("ns-vortex: Reynolds number must be positive");
  TestProblem p;
  p.name = "ns-vortex";
  p.reynolds = reynolds;
  p.mapping = std::move(mapping);
  p.steady = true;
  const double decay = 2.0 * kPi * kPi / reynolds;

  p.exact = [reynolds](double x, double y, double t) {
    return vortex_streamfunction(x, y, t, reynolds);
  };
  p.exact_gradient = [decay](double x, double y, double t) {
    const double e = std::exp(-decay * t);
    return Eigen::Vector2d(kPi * std::cos(kPi * x) * std::sin(kPi * y) * e,
                           kPi * std::sin(kPi * x) * std::cos(kPi * y) * e);
  };
  p.exact_hessian = [decay](double x, double y, double t) {
    const double e = std::exp(-decay * t);
    const double sxy = std::sin(kPi * x) * std::sin(kPi * y);
    return Eigen::Vector3d(-kPi * kPi * sxy * e,
                           kPi * kPi * std::cos(kPi * x) * std::cos(kPi * y) * e,
                           -kPi * kPi * sxy * e);
  };
  p.exact_time_derivative = [decay, reynolds](double x, double y, double t) {
    return -decay * vortex_streamfunction(x, y, t, reynolds);
  };
  p.exact_vorticity = [reynolds](double x, double y, double t) {
    return 2.0 * kPi * kPi * vortex_streamfunction(x, y, t, reynolds);
  };
  auto grad = p.exact_gradient;
  p.exact_vorticity_gradient = [grad](double x, double y, double t) -> Eigen::Vector2d {
    return 2.0 * kPi * kPi * grad(x, y, t);
  };

  p.coeffs.alpha1 = constant(1.0);
  p.coeffs.alpha2 = constant(1.0);
  p.coeffs.beta = constant(0.0);
  p.coeffs.c1 = constant(0.0);
  p.coeffs.c2 = constant(0.0);
  p.coeffs.d = constant(0.0);
  p.coeffs.s = p.exact_vorticity;

  p.recommended_grids = {33, 65};
  p.recommended_t_end = 0.1;
  return p;
}

TestProblem problem_by_name(const std::string& name, double epsilon, double lambda,
                            double reynolds) {
  if (name == "problem1") return problem1();
  if (name == "problem2") return problem2(epsilon, lambda);
  if (name == "ns-vortex") return ns_vortex(reynolds);
  throw ConfigError("unknown problem '" + name + "'");
}

double consistency_residual(const TestProblem& p, double x, double y, double t) {
  if (!p.has_exact()) throw DomainError(p.name + ": no exact solution");
  const auto& c = p.coeffs;
  const Eigen::Vector2d g = p.exact_gradient(x, y, t);
  const Eigen::Vector3d H = p.exact_hessian(x, y, t);
  double r = -c.alpha1(x, y, t) * H(0) - c.beta(x, y, t) * H(1) - c.alpha2(x, y, t) * H(2) +
             c.c1(x, y, t) * g(0) + c.c2(x, y, t) * g(1) + c.d(x, y, t) * p.exact(x, y, t) -
             c.s(x, y, t);
  if (!p.steady) r += p.exact_time_derivative(x, y, t);
  return r;
}

BoundarySpec exact_boundary(const TestProblem& p, bool normal_from_data) {
  if (!p.has_exact()) throw DomainError(p.name + ": no exact solution for boundary data");
  const Mapping map = p.mapping;
  auto u = p.exact;
  auto du = p.exact_gradient;
  BoundarySpec bc = BoundarySpec::dirichlet(
      [map, u](double xi, double eta, double t) {
        const Eigen::Vector2d X = map(xi, eta);
        return u(X(0), X(1), t);
      },
      [map, du](double xi, double eta, double t) {
        const Eigen::Vector2d X = map(xi, eta);
        const Metric m = map.metric_at(xi, eta);
        const Eigen::Vector2d g = du(X(0), X(1), t);
        return Eigen::Vector2d(g(0) * m.x_xi + g(1) * m.y_xi, g(0) * m.x_eta + g(1) * m.y_eta);
      });
  bc.normal_from_data = normal_from_data;
  return bc;
}

CoefficientField discretize(const TestProblem& p, const Grid2D& g, double t) {
  if (p.mapping.name == "identity") return sample_coefficients(g, p.coeffs, t);
  return transform_scalar_pde(p.mapping, g, p.coeffs, t);
}

CoefficientField discretize(const TestProblem& p, const GridGeometry& geo, const Grid2D& g,
                            double t) {
  if (p.mapping.name == "identity") return sample_coefficients(g, p.coeffs, t);
  return transform_scalar_pde(geo, g, p.coeffs, t);
}

RealField exact_field(const TestProblem& p, const Grid2D& g, double t) {
  if (!p.has_exact()) throw DomainError(p.name + ": no exact solution");
  return sample(g, [&](double xi, double eta) {
    const Eigen::Vector2d X = p.mapping(xi, eta);
    return p.exact(X(0), X(1), t);
  });
}

RealState exact_state(const TestProblem& p, const Grid2D& g, double t) {
  RealState s{exact_field(p, g, t), make_field(g), make_field(g)};
  for (int j = 0; j <= g.N; ++j) {
    for (int i = 0; i <= g.M; ++i) {
      const Eigen::Vector2d X = p.mapping(g.x(i), g.y(j));
      const Metric m = p.mapping.metric_at(g.x(i), g.y(j));
      const Eigen::Vector2d d = p.exact_gradient(X(0), X(1), t);
      s.phi_x(i, j) = d(0) * m.x_xi + d(1) * m.y_xi;
      s.phi_y(i, j) = d(0) * m.x_eta + d(1) * m.y_eta;
    }
  }
  return s;
}

ErrorNorms error_norms(const RealField& numerical, const RealField& exact) {
  if (numerical.rows() != exact.rows() || numerical.cols() != exact.cols())
    throw DomainError("error_norms: field shapes differ");
  if (numerical.size() == 0) throw DomainError("error_norms: empty field");
  const RealField e = (numerical - exact).abs();
  return {e.mean(), std::sqrt(e.square().mean()), e.maxCoeff()};
}

NormConvention norm_convention_from_name(const std::string& name) {
  if (name == "mean") return NormConvention::Mean;
  if (name == "grid-integral") return NormConvention::GridIntegral;
  throw ConfigError("unknown norm convention '" + name + "' (mean, grid-integral)");
}

std::string to_string(NormConvention c) {
  return c == NormConvention::Mean ? "mean" : "grid-integral";
}

ErrorNorms error_norms(const RealField& numerical, const RealField& exact, const Grid2D& g,
                       NormConvention convention) {
  require_shape(g, numerical, "error_norms");
  ErrorNorms e = error_norms(numerical, exact);
  if (convention == NormConvention::GridIntegral) {
    const double w = double(numerical.size()) * g.h * g.k;
    e.L1 *= w;
    e.L2 *= std::sqrt(w);
  }
  return e;
}

ErrorNorms error_norms(const RealField& numerical, const std::function<double(double, double)>& exact,
                       const Grid2D& g) {
  require_shape(g, numerical, "error_norms");
  return error_norms(numerical, sample(g, exact));
}

double convergence_order(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0))
    throw DomainError("convergence order undefined for non-positive errors");
  return std::log2(err_coarse / err_fine);
}

}  // namespace hoc
