#pragma once

#include <Eigen/Core>
#include <string>

#include "hoc/errors.hpp"

namespace hoc {

/// Uniform, node-centred computational grid on [a1,a2] x [a3,a4].
///
/// Nodes are indexed 0..M in x and 0..N in y; boundary nodes are included.
struct Grid2D {
  int M = 0;
  int N = 0;
  double a1 = 0.0, a2 = 1.0, a3 = 0.0, a4 = 1.0;
  double h = 0.0;
  double k = 0.0;

  double x(int i) const noexcept { return a1 + i * h; }
  double y(int j) const noexcept { return a3 + j * k; }

  int nx() const noexcept { return M + 1; }
  int ny() const noexcept { return N + 1; }
  int interior_count() const noexcept { return (M - 1) * (N - 1); }
  bool is_interior(int i, int j) const noexcept { return i > 0 && i < M && j > 0 && j < N; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Rectangle bounds (a1, a2, a3, a4).
struct Bounds {
  double a1 = 0.0, a2 = 1.0, a3 = 0.0, a4 = 1.0;
};

Grid2D build_uniform_grid(const Bounds& bounds, int M, int N);

/// Nodal values on a Grid2D, stored (M+1) x (N+1) with i the fastest index.
template <typename Scalar>
using GridField = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealField = GridField<double>;

template <typename Scalar = double>
GridField<Scalar> make_field(const Grid2D& g, Scalar value = Scalar(0)) {
  return GridField<Scalar>::Constant(g.nx(), g.ny(), value);
}

/// Samples f(x, y) at every node.
template <typename Fn>
RealField sample(const Grid2D& g, Fn&& f) {
  RealField out(g.nx(), g.ny());
  for (int j = 0; j <= g.N; ++j)
    for (int i = 0; i <= g.M; ++i) out(i, j) = f(g.x(i), g.y(j));
  return out;
}

template <typename Derived>
void require_shape(const Grid2D& g, const Eigen::DenseBase<Derived>& f, const char* what) {
  if (f.rows() != g.nx() || f.cols() != g.ny())
    throw DomainError(std::string(what) + ": field shape does not match grid");
}

/// The unknown triple (phi, phi_x, phi_y) carried by the compact scheme.
template <typename Scalar>
struct SolutionState {
  GridField<Scalar> phi;
  GridField<Scalar> phi_x;
  GridField<Scalar> phi_y;
};

using RealState = SolutionState<double>;

}  // namespace hoc
