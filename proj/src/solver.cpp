#include "hoc/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

namespace hoc {

InnerSolver inner_solver_from_name(const std::string& name) {
  if (name == "krylov") return InnerSolver::Krylov;
  if (name == "line-relax") return InnerSolver::LineRelax;
  throw ConfigError("unknown inner solver '" + name + "' (expected krylov or line-relax)");
}

std::string to_string(InnerSolver s) { return s == InnerSolver::Krylov ? "krylov" : "line-relax"; }

void SolverConfig::validate() const {
  if (!(residual_tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_outer_iterations < 1) throw ConfigError("solver needs at least one outer iteration");
  if (!(relaxation >= 0.3 && relaxation <= 1.0))
    throw ConfigError("relaxation factor must lie in [0.3, 1]");
  if (max_krylov_iterations < 1 || line_sweeps < 1)
    throw ConfigError("inner iteration counts must be positive");
}

double relative_residual(const BlockSystem& sys, const RealState& s) {
  return block_residual(sys, s).cwiseAbs().maxCoeff() / residual_scale(sys);
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Second-order nine-point discretization of the same operator; used as the
/// Krylov preconditioner with homogeneous boundary data.
SparseMatrix second_order_matrix(const BlockSystem& sys) {
  const Grid2D& g = sys.grid;
  const double h = g.h, k = g.k;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(sys.size()) * 9);
  for (int j = 1; j < g.N; ++j) {
    for (int i = 1; i < g.M; ++i) {
      const ConstantCoefficients c = coefficients_at(sys.coeffs, i, j);
      const int r = sys.row(i, j);
      auto add = [&](int di, int dj, double w) {
        if (g.is_interior(i + di, j + dj)) trip.emplace_back(r, sys.row(i + di, j + dj), w);
      };
      add(0, 0, 2.0 * c.alpha1 / (h * h) + 2.0 * c.alpha2 / (k * k) + c.d);
      add(1, 0, -c.alpha1 / (h * h) + c.c1 / (2.0 * h));
      add(-1, 0, -c.alpha1 / (h * h) - c.c1 / (2.0 * h));
      add(0, 1, -c.alpha2 / (k * k) + c.c2 / (2.0 * k));
      add(0, -1, -c.alpha2 / (k * k) - c.c2 / (2.0 * k));
      const double b = c.beta / (4.0 * h * k);
      add(1, 1, -b);
      add(-1, -1, -b);
      add(1, -1, b);
      add(-1, 1, b);
    }
  }
  SparseMatrix P(sys.size(), sys.size());
  P.setFromTriplets(trip.begin(), trip.end());
  P.makeCompressed();
  return P;
}

/// Solves a general tridiagonal system in place (rhs becomes the solution).
void thomas(const std::vector<double>& lo, const std::vector<double>& di,
            const std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  std::vector<double> cp(n);
  double denom = di[0];
  cp[0] = up[0] / denom;
  rhs[0] /= denom;
  for (std::size_t r = 1; r < n; ++r) {
    denom = di[r] - lo[r] * cp[r - 1];
    cp[r] = up[r] / denom;
    rhs[r] = (rhs[r] - lo[r] * rhs[r - 1]) / denom;
  }
  for (std::size_t r = n - 1; r-- > 0;) rhs[r] -= cp[r] * rhs[r + 1];
}

/// Approximate solve of the phi-part (first nine weights) by alternating
/// x-line and y-line Gauss-Seidel sweeps from a zero start.
Eigen::VectorXd line_relax(const BlockSystem& sys, const Eigen::VectorXd& r, int sweeps) {
  const Grid2D& g = sys.grid;
  RealField d = make_field(g);
  auto w = [&](int i, int j, int di, int dj) { return sys.weights(sys.row(i, j), stencil_index(di, dj)); };
  for (int s = 0; s < sweeps; ++s) {
    {
      const std::size_t n = std::size_t(g.M - 1);
      std::vector<double> lo(n), di(n), up(n), b(n);
      for (int j = 1; j < g.N; ++j) {
        for (int i = 1; i < g.M; ++i) {
          const std::size_t q = std::size_t(i - 1);
          lo[q] = w(i, j, -1, 0);
          di[q] = w(i, j, 0, 0);
          up[q] = w(i, j, 1, 0);
          double acc = r(sys.row(i, j));
          for (int dj : {-1, 1})
            for (int dx = -1; dx <= 1; ++dx) acc -= w(i, j, dx, dj) * d(i + dx, j + dj);
          b[q] = acc;
        }
        thomas(lo, di, up, b);
        for (int i = 1; i < g.M; ++i) d(i, j) = b[std::size_t(i - 1)];
      }
    }
    {
      const std::size_t n = std::size_t(g.N - 1);
      std::vector<double> lo(n), di(n), up(n), b(n);
      for (int i = 1; i < g.M; ++i) {
        for (int j = 1; j < g.N; ++j) {
          const std::size_t q = std::size_t(j - 1);
          lo[q] = w(i, j, 0, -1);
          di[q] = w(i, j, 0, 0);
          up[q] = w(i, j, 0, 1);
          double acc = r(sys.row(i, j));
          for (int dx : {-1, 1})
            for (int dy = -1; dy <= 1; ++dy) acc -= w(i, j, dx, dy) * d(i + dx, j + dy);
          b[q] = acc;
        }
        thomas(lo, di, up, b);
        for (int j = 1; j < g.N; ++j) d(i, j) = b[std::size_t(j - 1)];
      }
    }
  }
  return extract_interior(g, d);
}

std::string describe(const char* what, int iters, double residual) {
  std::ostringstream os;
  os << what << " did not converge after " << iters << " outer iterations (relative residual "
     << residual << ")";
  return os.str();
}

}  // namespace

SolveResult solve_block(const BlockSystem& sys, const SolverConfig& cfg, const RealField* initial_phi) {
  cfg.validate();
  const Grid2D& g = sys.grid;
  Eigen::VectorXd u =
      initial_phi ? extract_interior(g, *initial_phi) : Eigen::VectorXd::Zero(sys.size());
  const double scale = residual_scale(sys);

  SolveResult result;
  SolveReport& rep = result.report;
  RealState state = complete_state(sys, embed_interior(sys, u));
  Eigen::VectorXd r = block_residual(sys, state);
  auto check = [&]() {
    rep.residual = r.cwiseAbs().maxCoeff() / scale;
    rep.history.push_back(rep.residual);
    rep.outer_iterations = int(rep.history.size());
    return rep.residual <= cfg.residual_tolerance;
  };
  auto finish = [&]() {
    result.state = std::move(state);
    return result;
  };
  if (check()) return finish();

  auto homogeneous_op = [&sys](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    const RealState s = complete_state(sys, embed_interior(sys, in, true), true);
    out = apply_stencil(sys, s);
  };

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  if (cfg.inner == InnerSolver::Krylov) {
    const SparseMatrix P = second_order_matrix(sys);
    lu.analyzePattern(P);
    lu.factorize(P);
    if (lu.info() != Eigen::Success) throw NonConvergenceError("preconditioner factorization failed", rep.history);
  }
  auto precondition = [&lu](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out = lu.solve(in); };

  for (int outer = 1; outer < cfg.max_outer_iterations; ++outer) {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(sys.size());
    if (cfg.inner == InnerSolver::Krylov) {
      // Inner target well below the outer tolerance: the coupled system amplifies residual into error ~100x.
      const KrylovResult kr = bicgstab<double>(homogeneous_op, precondition, r, delta,
                                               1e-2 * cfg.residual_tolerance * scale,
                                               cfg.max_krylov_iterations);
      rep.inner_iterations += kr.iterations;
    } else {
      delta = line_relax(sys, r, cfg.line_sweeps);
      rep.inner_iterations += cfg.line_sweeps;
    }
    u += cfg.relaxation * delta;
    state = complete_state(sys, embed_interior(sys, u));
    r = block_residual(sys, state);
    // Also require the last correction to be small relative to the solution.
    const double step = cfg.relaxation * delta.cwiseAbs().maxCoeff();
    if (check() && step <= cfg.residual_tolerance * std::max(u.cwiseAbs().maxCoeff(), 1e-300)) return finish();
    if (!std::isfinite(rep.residual) || rep.residual > 1e12)
      throw NonConvergenceError(describe("block solver diverged;", rep.outer_iterations, rep.residual),
                                rep.history);
  }
  throw NonConvergenceError(describe("block solver", rep.outer_iterations, rep.residual), rep.history);
}

int dense_oracle_size(const Grid2D& g) {
  return (g.M - 1) * (g.N - 1) + (g.M + 1) * (g.N - 1) + (g.M - 1) * (g.N + 1);
}

RealState dense_oracle_solve(const BlockSystem& sys) {
  const Grid2D& g = sys.grid;
  const int M = g.M, N = g.N;
  const int n = dense_oracle_size(g);
  if (n > 20000) throw DomainError("dense oracle limited to 20000 unknowns");
  const int n_phi = (M - 1) * (N - 1);
  const int n_px = (M + 1) * (N - 1);
  auto idx_phi = [&](int i, int j) { return (i - 1) + (j - 1) * (M - 1); };
  auto idx_px = [&](int i, int j) { return n_phi + i + (j - 1) * (M + 1); };
  auto idx_py = [&](int i, int j) { return n_phi + n_px + (i - 1) + j * (M - 1); };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  enum Field { Phi, Px, Py };
  auto add = [&](int row, Field f, int i, int j, double coef) {
    switch (f) {
      case Phi:
        if (g.is_interior(i, j))
          A(row, idx_phi(i, j)) += coef;
        else
          b(row) -= coef * sys.boundary(i, j);
        break;
      case Px:
        if (j == 0 || j == N)
          b(row) -= coef * sys.edge_phi_x(i, j);
        else
          A(row, idx_px(i, j)) += coef;
        break;
      case Py:
        if (i == 0 || i == M)
          b(row) -= coef * sys.edge_phi_y(i, j);
        else
          A(row, idx_py(i, j)) += coef;
        break;
    }
  };

  // Discrete operator rows.
  for (int j = 1; j < N; ++j) {
    for (int i = 1; i < M; ++i) {
      const int row = idx_phi(i, j);
      const int wr = sys.row(i, j);
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int q = stencil_index(di, dj);
          add(row, Phi, i + di, j + dj, sys.weights(wr, q));
          add(row, Px, i + di, j + dj, sys.weights(wr, 9 + q));
          add(row, Py, i + di, j + dj, sys.weights(wr, 18 + q));
        }
      }
      b(row) += sys.rhs(i, j);
    }
  }
  constexpr double kOneSided[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
  // Pade rows and one-sided closures along x.
  for (int j = 1; j < N; ++j) {
    for (int i = 1; i < M; ++i) {
      const int row = idx_px(i, j);
      add(row, Px, i - 1, j, 1.0);
      add(row, Px, i, j, 4.0);
      add(row, Px, i + 1, j, 1.0);
      add(row, Phi, i + 1, j, -3.0 / g.h);
      add(row, Phi, i - 1, j, 3.0 / g.h);
    }
    add(idx_px(0, j), Px, 0, j, 1.0);
    add(idx_px(M, j), Px, M, j, 1.0);
    if (sys.normal_from_data) {
      b(idx_px(0, j)) += sys.edge_phi_x(0, j);
      b(idx_px(M, j)) += sys.edge_phi_x(M, j);
      continue;
    }
    for (int m = 0; m < 5; ++m) {
      add(idx_px(0, j), Phi, m, j, -kOneSided[m] / (12.0 * g.h));
      add(idx_px(M, j), Phi, M - m, j, kOneSided[m] / (12.0 * g.h));
    }
  }
  // Pade rows and one-sided closures along y.
  for (int i = 1; i < M; ++i) {
    for (int j = 1; j < N; ++j) {
      const int row = idx_py(i, j);
      add(row, Py, i, j - 1, 1.0);
      add(row, Py, i, j, 4.0);
      add(row, Py, i, j + 1, 1.0);
      add(row, Phi, i, j + 1, -3.0 / g.k);
      add(row, Phi, i, j - 1, 3.0 / g.k);
    }
    add(idx_py(i, 0), Py, i, 0, 1.0);
    add(idx_py(i, N), Py, i, N, 1.0);
    if (sys.normal_from_data) {
      b(idx_py(i, 0)) += sys.edge_phi_y(i, 0);
      b(idx_py(i, N)) += sys.edge_phi_y(i, N);
      continue;
    }
    for (int m = 0; m < 5; ++m) {
      add(idx_py(i, 0), Phi, i, m, -kOneSided[m] / (12.0 * g.k));
      add(idx_py(i, N), Phi, i, N - m, kOneSided[m] / (12.0 * g.k));
    }
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-15)) throw OracleFailureError("dense oracle matrix is singular");
  const Eigen::VectorXd x = lu.solve(b);

  RealState s{sys.boundary, sys.edge_phi_x, sys.edge_phi_y};
  for (int j = 1; j < N; ++j)
    for (int i = 1; i < M; ++i) s.phi(i, j) = x(idx_phi(i, j));
  for (int j = 1; j < N; ++j)
    for (int i = 0; i <= M; ++i) s.phi_x(i, j) = x(idx_px(i, j));
  for (int j = 0; j <= N; ++j)
    for (int i = 1; i < M; ++i) s.phi_y(i, j) = x(idx_py(i, j));
  return s;
}

}  // namespace hoc
