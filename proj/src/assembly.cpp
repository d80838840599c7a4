#include "hoc/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "hoc/solver.hpp"

namespace hoc {

RealField apply_discrete_operator(const CoefficientField& cf, const RealState& s, const Grid2D& g) {
  require_shape(g, s.phi, "apply_discrete_operator");
  return apply_interior(s, [&](const RealState& st, int i, int j) {
    return apply_discrete_operator(cf, st, g.h, g.k, i, j);
  });
}

StencilWeights stencil_weights(const ConstantCoefficients& c, double h, double k) {
  StencilWeights w = StencilWeights::Zero();
  const double hk4 = 4.0 * h * k;
  // phi block
  w(stencil_index(0, 0)) = 4.0 * c.alpha1 / (h * h) + 4.0 * c.alpha2 / (k * k) + c.d;
  w(stencil_index(1, 0)) = w(stencil_index(-1, 0)) = -2.0 * c.alpha1 / (h * h);
  w(stencil_index(0, 1)) = w(stencil_index(0, -1)) = -2.0 * c.alpha2 / (k * k);
  w(stencil_index(1, 1)) = w(stencil_index(-1, -1)) = c.beta / hk4;
  w(stencil_index(1, -1)) = w(stencil_index(-1, 1)) = -c.beta / hk4;
  // phi_x block
  constexpr int X = 9;
  w(X + stencil_index(0, 0)) = c.c1;
  w(X + stencil_index(1, 0)) = c.alpha1 / (2.0 * h);
  w(X + stencil_index(-1, 0)) = -c.alpha1 / (2.0 * h);
  w(X + stencil_index(0, 1)) = -c.beta / (2.0 * k);
  w(X + stencil_index(0, -1)) = c.beta / (2.0 * k);
  // phi_y block
  constexpr int Y = 18;
  w(Y + stencil_index(0, 0)) = c.c2;
  w(Y + stencil_index(0, 1)) = c.alpha2 / (2.0 * k);
  w(Y + stencil_index(0, -1)) = -c.alpha2 / (2.0 * k);
  w(Y + stencil_index(1, 0)) = -c.beta / (2.0 * h);
  w(Y + stencil_index(-1, 0)) = c.beta / (2.0 * h);
  return w;
}

RealState complete_state(const BlockSystem& sys, RealField phi, bool homogeneous) {
  const Grid2D& g = sys.grid;
  auto closure_x = BoundaryClosure<double>::one_sided();
  auto closure_y = BoundaryClosure<double>::one_sided();
  if (sys.normal_from_data) {
    const double w = homogeneous ? 0.0 : 1.0;
    closure_x = BoundaryClosure<double>::prescribed(w * sys.edge_phi_x.row(0).transpose().matrix(),
                                                    w * sys.edge_phi_x.row(g.M).transpose().matrix());
    closure_y = BoundaryClosure<double>::prescribed(w * sys.edge_phi_y.col(0).matrix(),
                                                    w * sys.edge_phi_y.col(g.N).matrix());
  }
  RealField px = pade_gradient_x(phi, g.h, closure_x, 1, g.N - 1);
  RealField py = pade_gradient_y(phi, g.k, closure_y, 1, g.M - 1);
  if (homogeneous) {
    px.col(0).setZero();
    px.col(g.N).setZero();
    py.row(0).setZero();
    py.row(g.M).setZero();
  } else {
    px.col(0) = sys.edge_phi_x.col(0);
    px.col(g.N) = sys.edge_phi_x.col(g.N);
    py.row(0) = sys.edge_phi_y.row(0);
    py.row(g.M) = sys.edge_phi_y.row(g.M);
  }
  return {std::move(phi), std::move(px), std::move(py)};
}

RealField embed_interior(const BlockSystem& sys, const Eigen::VectorXd& interior, bool homogeneous) {
  const Grid2D& g = sys.grid;
  RealField f = homogeneous ? make_field(g) : sys.boundary;
  for (int j = 1; j < g.N; ++j)
    for (int i = 1; i < g.M; ++i) f(i, j) = interior(sys.row(i, j));
  return f;
}

Eigen::VectorXd extract_interior(const Grid2D& g, const RealField& f) {
  require_shape(g, f, "extract_interior");
  Eigen::VectorXd v(g.interior_count());
  for (int j = 1; j < g.N; ++j)
    for (int i = 1; i < g.M; ++i) v((i - 1) + (j - 1) * (g.M - 1)) = f(i, j);
  return v;
}

Eigen::VectorXd apply_stencil(const BlockSystem& sys, const RealState& s) {
  const Grid2D& g = sys.grid;
  Eigen::VectorXd out(sys.size());
  for (int j = 1; j < g.N; ++j) {
    for (int i = 1; i < g.M; ++i) {
      const int r = sys.row(i, j);
      double acc = 0.0;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int q = stencil_index(di, dj);
          acc += sys.weights(r, q) * s.phi(i + di, j + dj) +
                 sys.weights(r, 9 + q) * s.phi_x(i + di, j + dj) +
                 sys.weights(r, 18 + q) * s.phi_y(i + di, j + dj);
        }
      }
      out(r) = acc;
    }
  }
  return out;
}

Eigen::VectorXd block_residual(const BlockSystem& sys, const RealState& s) {
  return extract_interior(sys.grid, sys.rhs) - apply_stencil(sys, s);
}

double residual_scale(const BlockSystem& sys) {
  const RealState zero = complete_state(sys, sys.boundary);
  const double scale = block_residual(sys, zero).cwiseAbs().maxCoeff();
  return scale > 0.0 ? scale : 1.0;
}

void fill_edge_gradients(const Grid2D& g, const BoundarySpec& bc, double t, RealField& ex,
                         RealField& ey) {
  ex = make_field(g);
  ey = make_field(g);
  if (bc.g_gradient) {
    for (int i = 0; i <= g.M; ++i) {
      ex(i, 0) = bc.g_gradient(g.x(i), g.y(0), t).x();
      ex(i, g.N) = bc.g_gradient(g.x(i), g.y(g.N), t).x();
    }
    for (int j = 0; j <= g.N; ++j) {
      ey(0, j) = bc.g_gradient(g.x(0), g.y(j), t).y();
      ey(g.M, j) = bc.g_gradient(g.x(g.M), g.y(j), t).y();
    }
    if (bc.normal_from_data) {
      for (int j = 0; j <= g.N; ++j) {
        ex(0, j) = bc.g_gradient(g.x(0), g.y(j), t).x();
        ex(g.M, j) = bc.g_gradient(g.x(g.M), g.y(j), t).x();
      }
      for (int i = 0; i <= g.M; ++i) {
        ey(i, 0) = bc.g_gradient(g.x(i), g.y(0), t).y();
        ey(i, g.N) = bc.g_gradient(g.x(i), g.y(g.N), t).y();
      }
    }
    return;
  }
  if (bc.normal_from_data) throw ConfigError("normal derivatives from data need g_gradient");
  if (g.M < 4 || g.N < 4) throw InvalidGridError("edge gradients need at least 4 intervals");
  // Pade along each edge of the Dirichlet data, one-sided at the corners.
  for (int j : {0, g.N}) {
    Eigen::VectorXd line(g.M + 1), out(g.M + 1);
    for (int i = 0; i <= g.M; ++i) line(i) = bc.g(g.x(i), g.y(j), t);
    out(0) = one_sided_start(line, g.h);
    out(g.M) = one_sided_end(line, g.M, g.h);
    pade_line(line, out, g.M, g.h);
    ex.col(j) = out.array();
  }
  for (int i : {0, g.M}) {
    Eigen::VectorXd line(g.N + 1), out(g.N + 1);
    for (int j = 0; j <= g.N; ++j) line(j) = bc.g(g.x(i), g.y(j), t);
    out(0) = one_sided_start(line, g.k);
    out(g.N) = one_sided_end(line, g.N, g.k);
    pade_line(line, out, g.N, g.k);
    ey.row(i) = out.transpose().array();
  }
}

BlockSystem assemble_steady(const CoefficientField& coeffs, const BoundarySpec& bc,
                            const Grid2D& g) {
  for (BoundaryKind kind : bc.kind)
    if (kind != BoundaryKind::Dirichlet)
      throw ConfigError("only Dirichlet boundaries are assembled");
  if (!bc.g) throw ConfigError("boundary data function missing");
  if (g.M < 4 || g.N < 4) throw InvalidGridError("compact scheme needs at least 4 intervals");
  require_shape(g, coeffs.alpha1, "assemble_steady");
  if (auto [bi, bj] = coeffs.first_indefinite_node(); bi >= 0)
    throw IllPosedError("diffusion matrix not positive definite at node (" + std::to_string(bi) +
                        "," + std::to_string(bj) + ")");

  BlockSystem sys;
  sys.grid = g;
  sys.coeffs = coeffs;
  sys.rhs = make_field(g);
  sys.weights.resize(g.interior_count(), 27);
  for (int j = 1; j < g.N; ++j) {
    for (int i = 1; i < g.M; ++i) {
      sys.weights.row(sys.row(i, j)) =
          stencil_weights(coefficients_at(coeffs, i, j), g.h, g.k).transpose().array();
      sys.rhs(i, j) = coeffs.s(i, j);
    }
  }
  sys.boundary = make_field(g);
  const double t = coeffs.time;
  for (int i = 0; i <= g.M; ++i) {
    sys.boundary(i, 0) = bc.g(g.x(i), g.y(0), t);
    sys.boundary(i, g.N) = bc.g(g.x(i), g.y(g.N), t);
  }
  for (int j = 0; j <= g.N; ++j) {
    sys.boundary(0, j) = bc.g(g.x(0), g.y(j), t);
    sys.boundary(g.M, j) = bc.g(g.x(g.M), g.y(j), t);
  }
  fill_edge_gradients(g, bc, t, sys.edge_phi_x, sys.edge_phi_y);
  sys.normal_from_data = bc.normal_from_data;
  return sys;
}

RealState make_state(const Grid2D& g, RealField phi, const BoundarySpec& bc, double t) {
  require_shape(g, phi, "make_state");
  BlockSystem edges;
  edges.grid = g;
  fill_edge_gradients(g, bc, t, edges.edge_phi_x, edges.edge_phi_y);
  edges.normal_from_data = bc.normal_from_data;
  return complete_state(edges, std::move(phi));
}

// ---------------------------------------------------------------------------

void TimeIntegratorConfig::validate() const {
  if (!(iota >= 0.0 && iota <= 1.0)) throw ConfigError("time weight iota must lie in [0, 1]");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (t_end < 0.0) throw ConfigError("final time must be non-negative");
}

void TimeIntegratorConfig::check_growth_condition(double min_d) const {
  if (min_d < 0.0 && iota > 0.0 && !(dt < -1.0 / (iota * min_d)))
    throw DomainError("time step violates dt < -1/(iota d) for negative reaction coefficient");
}

int TimeIntegratorConfig::steps() const {
  validate();
  const double ratio = t_end / dt;
  const long long n = std::llround(ratio);
  if (std::abs(ratio - double(n)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("final time must be an integer multiple of the time step");
  return int(n);
}

RealState step_theta(const Grid2D& g, const RealState& state_n, const CoefficientField& coeffs_n,
                     const CoefficientField& coeffs_np1, const BoundarySpec& bc,
                     const TimeIntegratorConfig& cfg, const SolverConfig& solver,
                     SolveReport* report) {
  cfg.validate();
  cfg.check_growth_condition(std::min(coeffs_n.d.minCoeff(), coeffs_np1.d.minCoeff()));
  require_shape(g, state_n.phi, "step_theta");
  const double dt = cfg.dt, iota = cfg.iota;
  const double t_next = coeffs_np1.time;

  // Explicit part: phi^n - (1-iota) dt (A^n phi^n - s^n).
  RealField explicit_part = state_n.phi;
  if (iota < 1.0) {
    const RealField a_n = apply_discrete_operator(coeffs_n, state_n, g);
    explicit_part -= (1.0 - iota) * dt * (a_n - coeffs_n.s);
  }

  if (iota == 0.0) {
    RealField phi = explicit_part;
    for (int i = 0; i <= g.M; ++i) {
      phi(i, 0) = bc.g(g.x(i), g.y(0), t_next);
      phi(i, g.N) = bc.g(g.x(i), g.y(g.N), t_next);
    }
    for (int j = 0; j <= g.N; ++j) {
      phi(0, j) = bc.g(g.x(0), g.y(j), t_next);
      phi(g.M, j) = bc.g(g.x(g.M), g.y(j), t_next);
    }
    if (report) *report = SolveReport{};
    return make_state(g, std::move(phi), bc, t_next);
  }

  // Implicit part as a steady system: (A^{n+1} + 1/(iota dt)) phi = s^{n+1} + E/(iota dt).
  CoefficientField shifted = coeffs_np1;
  shifted.d += 1.0 / (iota * dt);
  shifted.s += explicit_part / (iota * dt);
  const BlockSystem sys = assemble_steady(shifted, bc, g);
  SolveResult res = solve_block(sys, solver, &state_n.phi);
  if (report) *report = res.report;
  return std::move(res.state);
}

RealState march(const Grid2D& g, RealState state, const CoefficientSampler& coeffs,
                const BoundarySpec& bc, const TimeIntegratorConfig& cfg, const SolverConfig& solver,
                const std::function<void(int, double, const RealState&)>& observer) {
  const int steps = cfg.steps();
  CoefficientField c_n = coeffs(0.0);
  for (int n = 0; n < steps; ++n) {
    const double t_next = (n + 1) * cfg.dt;
    CoefficientField c_np1 = coeffs(t_next);
    state = step_theta(g, state, c_n, c_np1, bc, cfg, solver);
    if (observer) observer(n + 1, t_next, state);
    c_n = std::move(c_np1);
  }
  return state;
}

GridField<std::complex<double>> step_theta_periodic(const ConstantCoefficients& c,
                                                    const GridField<std::complex<double>>& phi,
                                                    double h, double k, double dt, double iota,
                                                    double tolerance) {
  using Cplx = std::complex<double>;
  using CField = GridField<Cplx>;
  using CVec = Eigen::Matrix<Cplx, Eigen::Dynamic, 1>;
  if (!c.positive_definite()) throw IllPosedError("diffusion matrix not positive definite");
  const Eigen::Index nx = phi.rows(), ny = phi.cols();
  CField rhs = phi;
  if (iota < 1.0) rhs -= (1.0 - iota) * dt * apply_periodic_operator(c, phi, h, k);
  if (iota == 0.0) return rhs;

  auto to_vec = [&](const CField& f) { return CVec(Eigen::Map<const CVec>(f.data(), f.size())); };
  auto op = [&](const CVec& in, CVec& out) {
    const CField f = Eigen::Map<const CField>(in.data(), nx, ny);
    const CField a = f + iota * dt * apply_periodic_operator(c, f, h, k);
    out = Eigen::Map<const CVec>(a.data(), a.size());
  };
  auto identity = [](const CVec& in, CVec& out) { out = in; };
  const CVec b = to_vec(rhs);
  CVec x = b;
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  const KrylovResult kr = bicgstab<Cplx>(op, identity, b, x, tolerance * scale, 2000);
  if (!kr.converged)
    throw NonConvergenceError("periodic implicit step did not converge", {kr.residual / scale});
  return Eigen::Map<const CField>(x.data(), nx, ny);
}

}  // namespace hoc
