#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <functional>

#include "hoc/coefficients.hpp"
#include "hoc/field.hpp"
#include "hoc/operators.hpp"

namespace hoc {

// ---------------------------------------------------------------------------
// Discrete operator A_hk

/// Compact fourth-order operator at an interior node:
///   (-2 a1 dxx - 2 a2 dyy + b dxdy + d) phi + (a1 dx - b dy + c1) phi_x + (a2 dy - b dx + c2) phi_y
template <typename Scalar>
Scalar apply_discrete_operator(const ConstantCoefficients& c, const SolutionState<Scalar>& s,
                               double h, double k, int i, int j) {
  const Scalar phi_part = -2.0 * c.alpha1 * delta2_x(s.phi, h, i, j) -
                          2.0 * c.alpha2 * delta2_y(s.phi, k, i, j) +
                          c.beta * delta_x_delta_y(s.phi, h, k, i, j) + c.d * s.phi(i, j);
  const Scalar x_part = c.alpha1 * delta_x(s.phi_x, h, i, j) - c.beta * delta_y(s.phi_x, k, i, j) +
                        c.c1 * s.phi_x(i, j);
  const Scalar y_part = c.alpha2 * delta_y(s.phi_y, k, i, j) - c.beta * delta_x(s.phi_y, h, i, j) +
                        c.c2 * s.phi_y(i, j);
  return phi_part + x_part + y_part;
}

inline ConstantCoefficients coefficients_at(const CoefficientField& cf, int i, int j) {
  return {cf.alpha1(i, j), cf.alpha2(i, j), cf.beta(i, j), cf.c1(i, j), cf.c2(i, j), cf.d(i, j)};
}

template <typename Scalar>
Scalar apply_discrete_operator(const CoefficientField& cf, const SolutionState<Scalar>& s,
                               double h, double k, int i, int j) {
  return apply_discrete_operator(coefficients_at(cf, i, j), s, h, k, i, j);
}

/// A_hk applied at every interior node; boundary entries are zero.
RealField apply_discrete_operator(const CoefficientField& cf, const RealState& s, const Grid2D& g);

/// The 27 weights of A_hk at one node, ordered [phi | phi_x | phi_y], each block
/// over offsets (di, dj) in {-1,0,1}^2 at index (di+1) + 3 (dj+1).
using StencilWeights = Eigen::Matrix<double, 27, 1>;
StencilWeights stencil_weights(const ConstantCoefficients& c, double h, double k);

constexpr int stencil_index(int di, int dj) { return (di + 1) + 3 * (dj + 1); }

// ---------------------------------------------------------------------------
// Boundary data and the assembled block system

enum class BoundaryKind { Dirichlet, Neumann, Robin };

/// Boundary conditions b1 phi + b2 d_n phi = g on the four edges (left, right, bottom, top).
/// Only Dirichlet edges are assembled.
struct BoundarySpec {
  std::array<BoundaryKind, 4> kind{BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                                   BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};
  /// g(xi, eta, t) in computational coordinates.
  SpaceTimeFn g;
  /// Optional analytic (g_xi, g_eta); used for derivatives tangential to each edge.
  std::function<Eigen::Vector2d(double, double, double)> g_gradient;
  /// Take the edge-normal derivatives from g_gradient as well instead of
  /// one-sided differences of the interior solution.
  bool normal_from_data = false;

  static BoundarySpec dirichlet(SpaceTimeFn g,
                                std::function<Eigen::Vector2d(double, double, double)> grad = {}) {
    BoundarySpec bc;
    bc.g = std::move(g);
    bc.g_gradient = std::move(grad);
    return bc;
  }
};

/// Coupled linear system A_hk phi = s over (phi, phi_x, phi_y) at interior nodes,
/// with Dirichlet values and edge-tangential gradients eliminated.
struct BlockSystem {
  Grid2D grid;
  /// One row of 27 weights per interior node, lexicographic with i fastest.
  Eigen::Array<double, Eigen::Dynamic, 27> weights;
  /// Nodal coefficients the weights were built from.
  CoefficientField coeffs;
  /// Right-hand side at interior nodes.
  RealField rhs;
  /// Dirichlet values on boundary nodes, zero in the interior.
  RealField boundary;
  /// Known phi_x on rows j = 0 and j = N; known phi_y on columns i = 0 and i = M.
  /// With `normal_from_data` also phi_x on columns i = 0, M and phi_y on rows j = 0, N.
  RealField edge_phi_x, edge_phi_y;
  bool normal_from_data = false;

  int row(int i, int j) const noexcept { return (i - 1) + (j - 1) * (grid.M - 1); }
  int size() const noexcept { return grid.interior_count(); }
};

/// phi_x, phi_y of a full phi field under the system's closure: Pade on interior
/// lines, one-sided normal derivatives at the ends, known tangential gradients on edges.
/// With `homogeneous` the known edge data are replaced by zero.
RealState complete_state(const BlockSystem& sys, RealField phi, bool homogeneous = false);

/// Embeds interior values (lexicographic) into a full field with the system's boundary data.
RealField embed_interior(const BlockSystem& sys, const Eigen::VectorXd& interior,
                         bool homogeneous = false);
Eigen::VectorXd extract_interior(const Grid2D& g, const RealField& f);

/// Stencil application at interior nodes (lexicographic vector).
Eigen::VectorXd apply_stencil(const BlockSystem& sys, const RealState& s);

/// rhs - A_hk phi at interior nodes, recomputed from the state.
Eigen::VectorXd block_residual(const BlockSystem& sys, const RealState& s);

/// Reference scale for relative residuals: residual of the zero-interior field.
double residual_scale(const BlockSystem& sys);

/// Edge-gradient data of `bc` at time t (analytic when supplied, Pade along the edge otherwise).
void fill_edge_gradients(const Grid2D& g, const BoundarySpec& bc, double t, RealField& edge_phi_x,
                         RealField& edge_phi_y);

/// Builds A_hk phi = s for steady problems. Throws IllPosedError when the diffusion
/// matrix is not positive definite and ConfigError for non-Dirichlet edges.
BlockSystem assemble_steady(const CoefficientField& coeffs, const BoundarySpec& bc,
                            const Grid2D& g);

/// State with phi from a full nodal field and gradients from the boundary closure at time t.
RealState make_state(const Grid2D& g, RealField phi, const BoundarySpec& bc, double t);

// ---------------------------------------------------------------------------
// Weighted (iota) time discretization

struct TimeIntegratorConfig {
  double iota = 0.5;
  double dt = 0.0;
  double t_end = 0.0;

  void validate() const;
  /// Theorem-type growth restriction dt < -1/(iota min d) when d < 0 somewhere.
  void check_growth_condition(double min_d) const;
  /// Number of steps; t_end must be an integer multiple of dt.
  int steps() const;
};

struct SolverConfig;
struct SolveReport;

/// One step of [1 + iota dt A] phi^{n+1} = [1 - (1-iota) dt A] phi^n + iota dt s^{n+1} + (1-iota) dt s^n.
/// Coefficients are sampled at t^n (coeffs_n) and t^{n+1} (coeffs_np1).
RealState step_theta(const Grid2D& g, const RealState& state_n, const CoefficientField& coeffs_n,
                     const CoefficientField& coeffs_np1, const BoundarySpec& bc,
                     const TimeIntegratorConfig& cfg, const SolverConfig& solver,
                     SolveReport* report = nullptr);

/// Marches from t = 0 to cfg.t_end; `observer(n, t, state)` runs after every step.
using CoefficientSampler = std::function<CoefficientField(double t)>;
RealState march(const Grid2D& g, RealState state, const CoefficientSampler& coeffs,
                const BoundarySpec& bc, const TimeIntegratorConfig& cfg, const SolverConfig& solver,
                const std::function<void(int, double, const RealState&)>& observer = {});

// ---------------------------------------------------------------------------
// Periodic, constant-coefficient variant (Fourier-mode verification)

/// A_hk on a doubly periodic field of n_x x n_y distinct nodes.
template <typename Scalar>
GridField<Scalar> apply_periodic_operator(const ConstantCoefficients& c, const GridField<Scalar>& phi,
                                          double h, double k) {
  const Eigen::Index nx = phi.rows(), ny = phi.cols();
  const GridField<Scalar> px = pade_gradient_x_periodic(phi, h);
  const GridField<Scalar> py = pade_gradient_y_periodic(phi, k);
  auto pad = [&](const GridField<Scalar>& f) {
    GridField<Scalar> p(nx + 2, ny + 2);
    for (Eigen::Index j = 0; j < ny + 2; ++j)
      for (Eigen::Index i = 0; i < nx + 2; ++i) p(i, j) = f((i - 1 + nx) % nx, (j - 1 + ny) % ny);
    return p;
  };
  const SolutionState<Scalar> s{pad(phi), pad(px), pad(py)};
  GridField<Scalar> out(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out(i, j) = apply_discrete_operator(c, s, h, k, i + 1, j + 1);
  return out;
}

/// One iota-step of phi_t + A_hk phi = 0 on a periodic grid (source-free).
GridField<std::complex<double>> step_theta_periodic(const ConstantCoefficients& c,
                                                    const GridField<std::complex<double>>& phi,
                                                    double h, double k, double dt, double iota,
                                                    double tolerance = 1e-14);

}  // namespace hoc
