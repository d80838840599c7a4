#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hoc/assembly.hpp"
#include "hoc/coefficients.hpp"
#include "hoc/grid.hpp"

namespace hoc {

using GradientFn = std::function<Eigen::Vector2d(double, double, double)>;

/// A model problem u_t + L u = f (or L u = f when steady) in physical coordinates.
struct TestProblem {
  std::string name;
  /// Physical coefficients; `coeffs.s` is the forcing f.
  PhysicalCoefficients coeffs;
  /// Exact solution and its physical gradient (u_x, u_y); empty when unknown.
  SpaceTimeFn exact;
  GradientFn exact_gradient;
  /// Second derivatives (u_xx, u_xy, u_yy) and u_t of the exact solution.
  std::function<Eigen::Vector3d(double, double, double)> exact_hessian;
  SpaceTimeFn exact_time_derivative;

  Mapping mapping = identity_mapping();
  /// Computational rectangle.
  Bounds bounds;
  bool steady = false;

  std::vector<int> recommended_grids;
  double recommended_t_end = 0.0;
  double recommended_dt = 0.0;

  double epsilon = 0.0;
  double lambda = 0.0;
  double reynolds = 0.0;

  /// Exact vorticity and its gradient (Navier-Stokes problems only).
  SpaceTimeFn exact_vorticity;
  GradientFn exact_vorticity_gradient;

  bool has_exact() const noexcept { return static_cast<bool>(exact); }
};

// Exact solutions, templated so that automatic differentiation can check the
// hand-derived forcing terms.

template <typename T>
T problem1_exact(const T& x, const T& y, const T& t) {
  using std::cosh, std::exp;
  return exp(-std::numbers::pi * t) * (x * x - y * y) * cosh(x + y);
}

template <typename T>
T problem2_exact(const T& x, const T& y, double epsilon) {
  using std::exp, std::log, std::sin;
  const T s = sin(6.0 * x);
  const T q = (1.0 - 0.3 * s) / (2.0 - 0.3 * s);
  return exp(y - x) + exp((1.0 + 1.0 / epsilon) * log(1.0 + y) + (1.0 / epsilon) * log(q));
}

template <typename T>
T vortex_streamfunction(const T& x, const T& y, const T& t, double reynolds) {
  using std::exp, std::sin;
  constexpr double pi = std::numbers::pi;
  return sin(pi * x) * sin(pi * y) * exp(-2.0 * pi * pi * t / reynolds);
}

/// u_t - u_xx + (1-x)(1-y) e^{x+y} u_xy - u_yy + 10 x (1-y) u_x - 10 y u_y = f on [0,1]^2,
/// u = e^{-pi t} (x^2 - y^2) cosh(x + y).
TestProblem problem1();

/// Steady boundary-layer problem on 0 <= y <= 1/(1 - 0.3 sin 6x) with the
/// stretching map of parameter lambda. Throws DomainError for epsilon <= 0.
TestProblem problem2(double epsilon, double lambda = 0.9);

/// Decaying vortex array psi = sin(pi x) sin(pi y) e^{-2 pi^2 t / Re}, omega = 2 pi^2 psi.
/// `coeffs` holds the stream-function equation -lap psi = omega.
TestProblem ns_vortex(double reynolds, Mapping mapping = identity_mapping());

/// problem1, problem2 (epsilon, lambda) or ns-vortex (reynolds).
TestProblem problem_by_name(const std::string& name, double epsilon = 0.01, double lambda = 0.9,
                            double reynolds = 10.0);

/// Continuous residual u_t + L u - f of the exact solution at a point.
double consistency_residual(const TestProblem& p, double x, double y, double t);

/// Dirichlet data from the exact solution expressed in computational coordinates.
/// With `normal_from_data` the edge-normal derivatives come from the exact gradient too.
BoundarySpec exact_boundary(const TestProblem& p, bool normal_from_data = false);

/// Computational-domain coefficients at time t (chain rule through the problem mapping).
CoefficientField discretize(const TestProblem& p, const Grid2D& g, double t);
CoefficientField discretize(const TestProblem& p, const GridGeometry& geo, const Grid2D& g, double t);

/// Exact solution sampled at the mapped nodes.
RealField exact_field(const TestProblem& p, const Grid2D& g, double t);

/// Exact state: phi and its computational-coordinate gradients.
RealState exact_state(const TestProblem& p, const Grid2D& g, double t);

struct ErrorNorms {
  double L1 = 0.0;  // mean |e|
  double L2 = 0.0;  // root-mean-square |e|
  double Linf = 0.0;
};

/// Mean/RMS/max over all nodes, or the cell-weighted sums h k sum|e| and
/// sqrt(h k sum e^2) (same max norm).
enum class NormConvention { Mean, GridIntegral };

NormConvention norm_convention_from_name(const std::string& name);
std::string to_string(NormConvention c);

/// Norms of numerical - exact over all nodes (mean convention).
ErrorNorms error_norms(const RealField& numerical, const RealField& exact);
ErrorNorms error_norms(const RealField& numerical, const RealField& exact, const Grid2D& g,
                       NormConvention convention);
ErrorNorms error_norms(const RealField& numerical, const std::function<double(double, double)>& exact,
                       const Grid2D& g);

/// log2(err_coarse / err_fine); throws DomainError unless both errors are positive.
double convergence_order(double err_coarse, double err_fine);

}  // namespace hoc
