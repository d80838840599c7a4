#include "hoc/navier_stokes.hpp"

#include <cmath>
#include <string>
#include <tuple>

#include "hoc/errors.hpp"

namespace hoc {

void NSConfig::validate() const {
  if (!(reynolds > 0.0)) throw ConfigError("Reynolds number must be positive");
  if (!(coupling_tolerance > 0.0)) throw ConfigError("coupling tolerance must be positive");
  if (max_coupling_iterations < 1) throw ConfigError("max coupling iterations must be at least 1");
  time_config().validate();
  solver.validate();
}

namespace {

CoefficientField as_coefficients(const RealField& a, const RealField& b, const RealField& e,
                                 const RealField& c, const RealField& d, const RealField& s,
                                 double t) {
  CoefficientField cf;
  cf.alpha1 = a;
  cf.alpha2 = b;
  cf.beta = e;
  cf.c1 = c;
  cf.c2 = d;
  cf.d = RealField::Zero(a.rows(), a.cols());
  cf.s = s;
  cf.time = t;
  return cf;
}

CoefficientField vorticity_coefficients(const GridGeometry& geo, double reynolds,
                                        const RealField& omega, const RealField& u,
                                        const RealField& v, double t) {
  const TransformedCoefficients tc = transform_navier_stokes(geo, reynolds, omega, u, v);
  return as_coefficients(tc.a2t, tc.b2t, tc.e2t, tc.c2t, tc.d2t,
                         RealField::Zero(omega.rows(), omega.cols()), t);
}

}  // namespace

RealState streamfunction_solve(const RealState& omega, const GridGeometry& geo, const Grid2D& g,
                               const BoundarySpec& bc, double t, const SolverConfig& solver,
                               const RealField* initial_psi) {
  require_shape(g, omega.phi, "streamfunction_solve");
  const RealField zero = RealField::Zero(g.nx(), g.ny());
  const TransformedCoefficients tc = transform_navier_stokes(geo, 1.0, omega.phi, zero, zero);
  const CoefficientField cf = as_coefficients(tc.a1t, tc.b1t, tc.e1t, tc.c1t, tc.d1t, tc.f1t, t);
  const BlockSystem sys = assemble_steady(cf, bc, g);
  return solve_block(sys, solver, initial_psi).state;
}

std::pair<RealField, RealField> velocity_recover(const RealState& psi, const GridGeometry& geo) {
  if ((geo.jac.abs() < 1e-12).any()) throw SingularMappingError("zero Jacobian in velocity recovery");
  RealField u = (psi.phi_y * geo.x_xi - psi.phi_x * geo.x_eta) / geo.jac;
  RealField v = (psi.phi_y * geo.y_xi - psi.phi_x * geo.y_eta) / geo.jac;
  return {std::move(u), std::move(v)};
}

RealState vorticity_step(const FlowState& flow, const RealField& u_next, const RealField& v_next,
                         const GridGeometry& geo, const Grid2D& g, const BoundarySpec& bc_omega,
                         const NSConfig& cfg) {
  const double t_next = flow.time + cfg.dt;
  const CoefficientField c_n =
      vorticity_coefficients(geo, cfg.reynolds, flow.omega.phi, flow.u, flow.v, flow.time);
  const CoefficientField c_np1 =
      vorticity_coefficients(geo, cfg.reynolds, flow.omega.phi, u_next, v_next, t_next);
  return step_theta(g, flow.omega, c_n, c_np1, bc_omega, cfg.time_config(), cfg.solver);
}

RealState vorticity_step(const FlowState& flow, const GridGeometry& geo, const Grid2D& g,
                         const BoundarySpec& bc_omega, const NSConfig& cfg) {
  return vorticity_step(flow, flow.u, flow.v, geo, g, bc_omega, cfg);
}

FlowState couple_step(const FlowState& flow, const GridGeometry& geo, const Grid2D& g,
                      const FlowBoundary& bcs, const NSConfig& cfg, CouplingReport* report) {
  cfg.validate();
  FlowState next;
  next.time = flow.time + cfg.dt;
  next.u = flow.u;
  next.v = flow.v;
  next.psi = flow.psi;
  RealField previous = flow.omega.phi;
  CouplingReport local;
  for (int it = 1; it <= cfg.max_coupling_iterations; ++it) {
    next.omega = vorticity_step(flow, next.u, next.v, geo, g, bcs.omega, cfg);
    next.psi = streamfunction_solve(next.omega, geo, g, bcs.psi, next.time, cfg.solver,
                                    &next.psi.phi);
    std::tie(next.u, next.v) = velocity_recover(next.psi, geo);
    const double change = (next.omega.phi - previous).abs().maxCoeff();
    local.iterations = it;
    local.history.push_back(change);
    previous = next.omega.phi;
    if (change < cfg.coupling_tolerance) {
      if (report) *report = std::move(local);
      return next;
    }
  }
  if (report) *report = local;
  throw NonConvergenceError("vorticity/stream-function coupling did not converge at t = " +
                                std::to_string(next.time),
                            local.history);
}

FlowState initial_flow(const RealField& psi, const RealField& omega, const GridGeometry& geo,
                       const Grid2D& g, const FlowBoundary& bcs, double t) {
  FlowState f;
  f.time = t;
  f.psi = make_state(g, psi, bcs.psi, t);
  f.omega = make_state(g, omega, bcs.omega, t);
  std::tie(f.u, f.v) = velocity_recover(f.psi, geo);
  return f;
}

FlowState ns_march(FlowState flow, const GridGeometry& geo, const Grid2D& g,
                   const FlowBoundary& bcs, const NSConfig& cfg, const FlowObserver& observer) {
  cfg.validate();
  const int steps = cfg.time_config().steps();
  const double t0 = flow.time;
  for (int n = 0; n < steps; ++n) {
    CouplingReport rep;
    flow = couple_step(flow, geo, g, bcs, cfg, &rep);
    flow.time = t0 + (n + 1) * cfg.dt;
    if (observer) observer(n + 1, flow, rep);
  }
  return flow;
}

double kinetic_energy(const FlowState& flow, const GridGeometry& geo, const Grid2D& g) {
  require_shape(g, flow.u, "kinetic_energy");
  double sum = 0.0;
  for (int j = 0; j <= g.N; ++j) {
    const double wy = (j == 0 || j == g.N) ? 0.5 : 1.0;
    for (int i = 0; i <= g.M; ++i) {
      const double wx = (i == 0 || i == g.M) ? 0.5 : 1.0;
      const double q = flow.u(i, j) * flow.u(i, j) + flow.v(i, j) * flow.v(i, j);
      sum += wx * wy * q * std::abs(geo.jac(i, j));
    }
  }
  return 0.5 * sum * g.h * g.k;
}

}  // namespace hoc
