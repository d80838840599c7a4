#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "hoc/assembly.hpp"
#include "hoc/errors.hpp"

namespace hoc {

enum class InnerSolver {
  /// BiCGSTAB on the coupled residual, preconditioned by a direct solve of the
  /// second-order nine-point approximation of the operator.
  Krylov,
  /// Lagged-gradient defect correction: phi-part of the stencil relaxed by
  /// alternating line Gauss-Seidel sweeps, gradients refreshed each pass.
  LineRelax,
};

InnerSolver inner_solver_from_name(const std::string& name);
std::string to_string(InnerSolver s);

struct SolverConfig {
  /// Target for the relative infinity-norm residual of the coupled rows.
  double residual_tolerance = 1e-10;
  int max_outer_iterations = 100;
  InnerSolver inner = InnerSolver::Krylov;
  /// Under-relaxation of the correction, in [0.3, 1].
  double relaxation = 1.0;
  int max_krylov_iterations = 400;
  int line_sweeps = 2;

  void validate() const;
};

struct SolveReport {
  int outer_iterations = 0;
  int inner_iterations = 0;
  /// Relative infinity-norm residual of the returned state.
  double residual = 0.0;
  std::vector<double> history;
};

struct SolveResult {
  RealState state;
  SolveReport report;
};

/// Relative residual ||rhs - A_hk phi||_inf / residual_scale(sys), recomputed from `s`.
double relative_residual(const BlockSystem& sys, const RealState& s);

/// Solves the coupled system. Without a guess the interior starts at zero.
/// Throws NonConvergenceError carrying the residual history.
SolveResult solve_block(const BlockSystem& sys, const SolverConfig& cfg,
                        const RealField* initial_phi = nullptr);

/// Direct LU solve of the monolithic (phi, phi_x, phi_y) matrix. Small grids only.
RealState dense_oracle_solve(const BlockSystem& sys);

/// Unknown count of the monolithic matrix used by dense_oracle_solve.
int dense_oracle_size(const Grid2D& g);

// ---------------------------------------------------------------------------

struct KrylovResult {
  int iterations = 0;
  double residual = 0.0;  // infinity norm of the recursive residual
  bool converged = false;
};

/// Right-preconditioned BiCGSTAB for op(x) = b starting from x.
/// `op(in, out)` applies the operator; `prec(in, out)` applies the preconditioner.
template <typename Scalar, typename Op, typename Prec>
KrylovResult bicgstab(Op&& op, Prec&& prec, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x, double abs_tol, int max_iter) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = b.size();
  Vec r(n), tmp(n);
  op(x, tmp);
  r = b - tmp;
  const Vec r_hat = r;
  Vec p = Vec::Zero(n), v = Vec::Zero(n), y(n), s(n), z(n), t(n);
  Scalar rho = 1, alpha = 1, omega = 1;
  KrylovResult res;
  res.residual = r.cwiseAbs().maxCoeff();
  if (res.residual <= abs_tol) {
    res.converged = true;
    return res;
  }
  for (int it = 1; it <= max_iter; ++it) {
    const Scalar rho_new = r_hat.dot(r);
    if (std::abs(rho_new) == 0.0) break;
    if (it == 1) {
      p = r;
    } else {
      const Scalar beta = (rho_new / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
    }
    rho = rho_new;
    prec(p, y);
    op(y, v);
    const Scalar denom = r_hat.dot(v);
    if (std::abs(denom) == 0.0) break;
    alpha = rho / denom;
    s = r - alpha * v;
    res.iterations = it;
    if (s.cwiseAbs().maxCoeff() <= abs_tol) {
      x += alpha * y;
      res.residual = s.cwiseAbs().maxCoeff();
      res.converged = true;
      return res;
    }
    prec(s, z);
    op(z, t);
    const double tt = t.squaredNorm();
    omega = tt > 0.0 ? Scalar(t.dot(s) / tt) : Scalar(0);
    x += alpha * y + omega * z;
    r = s - omega * t;
    res.residual = r.cwiseAbs().maxCoeff();
    if (res.residual <= abs_tol) {
      res.converged = true;
      return res;
    }
    if (std::abs(omega) == 0.0) break;
  }
  return res;
}

}  // namespace hoc
