#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "hoc/coefficients.hpp"
#include "hoc/field.hpp"

namespace hoc {

/// First derivatives of the map (xi, eta) -> (x, y).
struct Metric {
  double x_xi = 1.0, x_eta = 0.0, y_xi = 0.0, y_eta = 1.0;

  double jacobian() const noexcept { return x_xi * y_eta - x_eta * y_xi; }
};

/// Second derivatives of the map (xi, eta) -> (x, y).
struct MapHessian {
  double x_xixi = 0.0, x_xieta = 0.0, x_etaeta = 0.0;
  double y_xixi = 0.0, y_xieta = 0.0, y_etaeta = 0.0;
};

enum class MetricProvenance { Analytic, FiniteDifference };

/// Physical-to-computational coordinate map x = x(xi, eta), y = y(xi, eta).
///
/// When the analytic derivative callbacks are empty the metric terms are
/// computed by fourth-order centred differences of `forward`.
struct Mapping {
  std::string name;
  std::function<Eigen::Vector2d(double, double)> forward;
  std::function<Metric(double, double)> metric;
  std::function<MapHessian(double, double)> hessian;

  MetricProvenance provenance() const noexcept {
    return metric && hessian ? MetricProvenance::Analytic : MetricProvenance::FiniteDifference;
  }

  Eigen::Vector2d operator()(double xi, double eta) const { return forward(xi, eta); }
  Metric metric_at(double xi, double eta) const;
  MapHessian hessian_at(double xi, double eta) const;
};

Mapping identity_mapping();

/// x = xi, y = (eta + (lambda/pi) sin(pi eta)) / (1 - 0.3 sin(6 xi)).
/// Clusters nodes towards the top boundary; requires 0 <= lambda < 1.
Mapping problem2_mapping(double lambda);

/// x = exp(pi xi) cos(pi eta) / 2, y = exp(pi xi) sin(pi eta) / 2.
Mapping log_polar_mapping();

/// Similarity transform x = x0 + s (cos(a) xi - sin(a) eta), y = y0 + s (sin(a) xi + cos(a) eta).
Mapping similarity_mapping(double scale, double angle, double x0 = 0.0, double y0 = 0.0);

/// Map with metric terms left to finite differences.
Mapping finite_difference_mapping(std::string name, std::function<Eigen::Vector2d(double, double)> forward);

/// Resolves a mapping by its configuration name: identity, problem2-stretch, log-polar.
Mapping mapping_by_name(const std::string& name, double lambda = 0.9);

/// Nodal geometry of a mapped grid: physical coordinates, metric terms and
/// the first/second derivatives of the inverse map (xi, eta)(x, y).
struct GridGeometry {
  RealField x, y;
  RealField x_xi, x_eta, y_xi, y_eta, jac;
  RealField xi_x, xi_y, eta_x, eta_y;
  RealField xi_xx, xi_xy, xi_yy, eta_xx, eta_xy, eta_yy;
};

/// Throws SingularMappingError if the Jacobian vanishes at any node.
GridGeometry compute_geometry(const Mapping& map, const Grid2D& g);

/// Chain-rule transformation of a physical operator onto the computational rectangle.
CoefficientField transform_scalar_pde(const GridGeometry& geo, const Grid2D& g,
                                      const PhysicalCoefficients& pc, double t);
CoefficientField transform_scalar_pde(const Mapping& map, const Grid2D& g,
                                      const PhysicalCoefficients& pc, double t);

/// Transformed coefficients of the stream-function equation (suffix 1)
///   -a1t psi_xixi - e1t psi_xieta - b1t psi_etaeta + c1t psi_xi + d1t psi_eta = f1t
/// and of the vorticity transport equation (suffix 2)
///   omega_t - a2t omega_xixi - e2t omega_xieta - b2t omega_etaeta + c2t omega_xi + d2t omega_eta = 0.
struct TransformedCoefficients {
  RealField a1t, e1t, b1t, c1t, d1t, f1t;
  RealField a2t, e2t, b2t, c2t, d2t;
};

/// Builds the stream-function/vorticity coefficients from the geometry, the
/// Reynolds number, the current vorticity and the velocity field.
TransformedCoefficients transform_navier_stokes(const GridGeometry& geo, double reynolds,
                                                const RealField& omega, const RealField& u,
                                                const RealField& v);

}  // namespace hoc
