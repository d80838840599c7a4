#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "hoc/assembly.hpp"
#include "hoc/grid.hpp"
#include "hoc/solver.hpp"

namespace hoc {

/// Stream function, vorticity (with compact gradients in computational
/// coordinates) and the nodal velocity at one time level.
struct FlowState {
  RealState psi;
  RealState omega;
  RealField u, v;
  double time = 0.0;
};

struct NSConfig {
  double reynolds = 1.0;
  double dt = 0.0;
  double t_end = 0.0;
  double iota = 0.5;
  /// Inner loop stops when successive vorticity iterates differ by less than this (max norm).
  double coupling_tolerance = 1e-8;
  int max_coupling_iterations = 50;
  SolverConfig solver;

  void validate() const;
  TimeIntegratorConfig time_config() const { return {iota, dt, t_end}; }
};

struct FlowBoundary {
  BoundarySpec psi;
  BoundarySpec omega;
};

struct CouplingReport {
  int iterations = 0;
  /// Max-norm change of the vorticity per inner iteration.
  std::vector<double> history;
};

/// Solves -a1t psi_xixi - e1t psi_xieta - b1t psi_etaeta + c1t psi_xi + d1t psi_eta = omega.
RealState streamfunction_solve(const RealState& omega, const GridGeometry& geo, const Grid2D& g,
                               const BoundarySpec& bc, double t, const SolverConfig& solver,
                               const RealField* initial_psi = nullptr);

/// u = (psi_eta x_xi - psi_xi x_eta) / J, v = (psi_eta y_xi - psi_xi y_eta) / J from the
/// stored gradients. Throws SingularMappingError where J vanishes.
std::pair<RealField, RealField> velocity_recover(const RealState& psi, const GridGeometry& geo);

/// One iota step of the vorticity transport equation. Level-n convection uses
/// flow.u, flow.v; level n+1 uses (u_next, v_next).
RealState vorticity_step(const FlowState& flow, const RealField& u_next, const RealField& v_next,
                         const GridGeometry& geo, const Grid2D& g, const BoundarySpec& bc_omega,
                         const NSConfig& cfg);
/// Same with the velocities frozen at level n.
RealState vorticity_step(const FlowState& flow, const GridGeometry& geo, const Grid2D& g,
                         const BoundarySpec& bc_omega, const NSConfig& cfg);

/// Advances the flow by cfg.dt with Picard iteration between the vorticity and
/// stream-function equations. Throws NonConvergenceError if the coupling stalls.
FlowState couple_step(const FlowState& flow, const GridGeometry& geo, const Grid2D& g,
                      const FlowBoundary& bcs, const NSConfig& cfg,
                      CouplingReport* report = nullptr);

/// Flow state from nodal psi and omega at time t (gradients from the boundary closure).
FlowState initial_flow(const RealField& psi, const RealField& omega, const GridGeometry& geo,
                       const Grid2D& g, const FlowBoundary& bcs, double t);

/// Marches to cfg.t_end; `observer(n, flow, report)` runs after every step.
using FlowObserver = std::function<void(int, const FlowState&, const CouplingReport&)>;
FlowState ns_march(FlowState flow, const GridGeometry& geo, const Grid2D& g,
                   const FlowBoundary& bcs, const NSConfig& cfg, const FlowObserver& observer = {});

/// 1/2 integral of u^2 + v^2 over the physical domain (trapezoidal rule in computational space).
double kinetic_energy(const FlowState& flow, const GridGeometry& geo, const Grid2D& g);

}  // namespace hoc
