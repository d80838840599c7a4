#pragma once

#include <functional>

#include "hoc/field.hpp"

namespace hoc {

/// Scalar function of (x, y, t).
using SpaceTimeFn = std::function<double(double, double, double)>;

/// Continuous coefficients of
///   -alpha1 u_xx - beta u_xy - alpha2 u_yy + c1 u_x + c2 u_y + d u = s.
struct PhysicalCoefficients {
  SpaceTimeFn alpha1;
  SpaceTimeFn alpha2;
  SpaceTimeFn beta;
  SpaceTimeFn c1;
  SpaceTimeFn c2;
  SpaceTimeFn d;
  SpaceTimeFn s;
};

/// Nodal samples of the operator coefficients and forcing at one time level.
struct CoefficientField {
  RealField alpha1, alpha2, beta, c1, c2, d, s;
  double time = 0.0;

  /// First node violating alpha1 > 0, alpha2 > 0, beta^2 < 4 alpha1 alpha2,
  /// or (-1, -1) when the diffusion matrix is positive definite everywhere.
  std::pair<int, int> first_indefinite_node() const;
  bool positive_definite() const { return first_indefinite_node().first < 0; }
};

/// Spatially constant operator coefficients (von Neumann analysis, periodic tests).
struct ConstantCoefficients {
  double alpha1 = 1.0, alpha2 = 1.0, beta = 0.0, c1 = 0.0, c2 = 0.0, d = 0.0;

  bool positive_definite() const noexcept {
    return alpha1 > 0.0 && alpha2 > 0.0 && beta * beta < 4.0 * alpha1 * alpha2;
  }
};

/// Constant-valued coefficient field on g (forcing defaults to zero).
CoefficientField constant_coefficients(const Grid2D& g, double alpha1, double alpha2, double beta,
                                       double c1, double c2, double d, double s = 0.0);

/// Samples physical coefficients directly on the grid nodes (identity geometry).
CoefficientField sample_coefficients(const Grid2D& g, const PhysicalCoefficients& pc, double t);

}  // namespace hoc
