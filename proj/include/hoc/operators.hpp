#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hoc/errors.hpp"
#include "hoc/field.hpp"

namespace hoc {

// ---------------------------------------------------------------------------
// Central difference operators (interior nodes only)

namespace detail {

inline void require_interior(Eigen::Index rows, Eigen::Index cols, int i, int j, const char* op) {
  if (i < 1 || j < 1 || i >= rows - 1 || j >= cols - 1)
    throw OutOfStencilError(std::string(op) + ": node (" + std::to_string(i) + "," +
                            std::to_string(j) + ") is not interior");
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar delta_x(const Eigen::DenseBase<Derived>& f, double h, int i, int j) {
  detail::require_interior(f.rows(), f.cols(), i, j, "delta_x");
  return (f(i + 1, j) - f(i - 1, j)) / (2.0 * h);
}

template <typename Derived>
typename Derived::Scalar delta_y(const Eigen::DenseBase<Derived>& f, double k, int i, int j) {
  detail::require_interior(f.rows(), f.cols(), i, j, "delta_y");
  return (f(i, j + 1) - f(i, j - 1)) / (2.0 * k);
}

template <typename Derived>
typename Derived::Scalar delta2_x(const Eigen::DenseBase<Derived>& f, double h, int i, int j) {
  detail::require_interior(f.rows(), f.cols(), i, j, "delta2_x");
  return (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (h * h);
}

template <typename Derived>
typename Derived::Scalar delta2_y(const Eigen::DenseBase<Derived>& f, double k, int i, int j) {
  detail::require_interior(f.rows(), f.cols(), i, j, "delta2_y");
  return (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (k * k);
}

template <typename Derived>
typename Derived::Scalar delta_x_delta_y(const Eigen::DenseBase<Derived>& f, double h, double k,
                                         int i, int j) {
  detail::require_interior(f.rows(), f.cols(), i, j, "delta_x_delta_y");
  return (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * h * k);
}

// ---------------------------------------------------------------------------
// Fourth-order one-sided first derivatives (five-point biased stencils)

template <typename Line>
auto one_sided_start(const Line& f, double h) {
  return (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h);
}

template <typename Line>
auto one_sided_end(const Line& f, Eigen::Index n, double h) {
  return (25.0 * f(n) - 48.0 * f(n - 1) + 36.0 * f(n - 2) - 16.0 * f(n - 3) + 3.0 * f(n - 4)) /
         (12.0 * h);
}

// ---------------------------------------------------------------------------
// Pade gradient recovery: (I + h^2/6 delta^2) f' = delta f

/// End-point derivative treatment for a family of Pade lines.
template <typename Scalar>
struct BoundaryClosure {
  enum class Kind { OneSided, Prescribed };
  Kind kind = Kind::OneSided;
  /// Derivative at the first/last node of each line when Prescribed.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> start, end;

  static BoundaryClosure one_sided() { return {}; }
  static BoundaryClosure prescribed(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> s,
                                    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e) {
    return {Kind::Prescribed, std::move(s), std::move(e)};
  }
};

/// Solves d_{i-1} + 4 d_i + d_{i+1} = 3 (f_{i+1} - f_{i-1}) / h for i = 1..n-1
/// with d_0, d_n given. `in` and `out` are indexable lines of length n+1.
template <typename In, typename Out>
void pade_line(const In& in, Out&& out, Eigen::Index n, double h) {
  using Scalar = std::decay_t<decltype(in(0))>;
  if (n < 2) return;
  const Eigen::Index m = n - 1;
  // Thomas recurrence for the constant (1, 4, 1) matrix: strictly diagonally dominant.
  thread_local std::vector<double> cp;
  thread_local std::vector<Scalar> dp;
  cp.resize(m);
  dp.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index i = r + 1;
    Scalar rhs = 3.0 * (in(i + 1) - in(i - 1)) / h;
    if (r == 0) rhs -= out(0);
    if (r == m - 1) rhs -= out(n);
    const double denom = r == 0 ? 4.0 : 4.0 - cp[r - 1];
    cp[r] = 1.0 / denom;
    dp[r] = r == 0 ? rhs / denom : (rhs - dp[r - 1]) / denom;
  }
  out(m) = dp[m - 1];
  for (Eigen::Index r = m - 2; r >= 0; --r) out(r + 1) = dp[r] - cp[r] * out(r + 2);
}

/// Periodic variant on n distinct nodes (node n wraps to node 0), solved
/// with the Sherman-Morrison correction of the cyclic (1, 4, 1) system.
template <typename In, typename Out>
void pade_line_periodic(const In& in, Out&& out, Eigen::Index n, double h) {
  using Scalar = std::decay_t<decltype(in(0))>;
  if (n < 3) throw InvalidGridError("periodic Pade needs at least 3 nodes");
  auto wrap = [n](Eigen::Index i) { return (i % n + n) % n; };
  // A = T + u v^T with u = (gamma, 0..0, 1), v = (1, 0..0, 1/gamma).
  const double gamma = -4.0;
  std::vector<double> diag(n, 4.0);
  diag[0] = 4.0 - gamma;
  diag[n - 1] = 4.0 - 1.0 / gamma;
  std::vector<Scalar> rhs(n);
  std::vector<double> uvec(n, 0.0);
  uvec[0] = gamma;
  uvec[n - 1] = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) rhs[i] = 3.0 * (in(wrap(i + 1)) - in(wrap(i - 1))) / h;

  auto solve = [&](auto& b) {
    std::vector<double> cp(n);
    using T = std::decay_t<decltype(b[0])>;
    std::vector<T> dp(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double denom = r == 0 ? diag[0] : diag[r] - cp[r - 1];
      cp[r] = 1.0 / denom;
      dp[r] = r == 0 ? b[0] / denom : (b[r] - dp[r - 1]) / denom;
    }
    b[n - 1] = dp[n - 1];
    for (Eigen::Index r = n - 2; r >= 0; --r) b[r] = dp[r] - cp[r] * b[r + 1];
  };
  solve(rhs);
  solve(uvec);
  const Scalar vy = rhs[0] + rhs[n - 1] / gamma;
  const double vz = uvec[0] + uvec[n - 1] / gamma;
  const Scalar factor = vy / (1.0 + vz);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = rhs[i] - factor * uvec[i];
}

namespace detail {

template <typename Scalar>
void check_closure(const BoundaryClosure<Scalar>& c, Eigen::Index lines, const char* op) {
  if (c.kind == BoundaryClosure<Scalar>::Kind::Prescribed &&
      (c.start.size() != lines || c.end.size() != lines))
    throw ConfigError(std::string(op) + ": prescribed closure must supply one value per line");
}

}  // namespace detail

/// Solves one Pade system along x per grid row j in [j_begin, j_end].
template <typename Derived>
GridField<typename Derived::Scalar> pade_gradient_x(
    const Eigen::DenseBase<Derived>& phi, double h,
    const BoundaryClosure<typename Derived::Scalar>& closure, int j_begin = 0, int j_end = -1) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index M = phi.rows() - 1;
  if (M < 4) throw InvalidGridError("pade_gradient_x needs at least 4 intervals");
  if (j_end < 0) j_end = int(phi.cols()) - 1;
  detail::check_closure(closure, phi.cols(), "pade_gradient_x");
  GridField<Scalar> out = GridField<Scalar>::Zero(phi.rows(), phi.cols());
  for (int j = j_begin; j <= j_end; ++j) {
    auto in = [&](Eigen::Index i) { return phi(i, j); };
    auto o = [&](Eigen::Index i) -> Scalar& { return out(i, j); };
    if (closure.kind == BoundaryClosure<Scalar>::Kind::Prescribed) {
      out(0, j) = closure.start(j);
      out(M, j) = closure.end(j);
    } else {
      out(0, j) = one_sided_start(in, h);
      out(M, j) = one_sided_end(in, M, h);
    }
    pade_line(in, o, M, h);
  }
  return out;
}

/// Solves one Pade system along y per grid column i in [i_begin, i_end].
template <typename Derived>
GridField<typename Derived::Scalar> pade_gradient_y(
    const Eigen::DenseBase<Derived>& phi, double k,
    const BoundaryClosure<typename Derived::Scalar>& closure, int i_begin = 0, int i_end = -1) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index N = phi.cols() - 1;
  if (N < 4) throw InvalidGridError("pade_gradient_y needs at least 4 intervals");
  if (i_end < 0) i_end = int(phi.rows()) - 1;
  detail::check_closure(closure, phi.rows(), "pade_gradient_y");
  GridField<Scalar> out = GridField<Scalar>::Zero(phi.rows(), phi.cols());
  for (int i = i_begin; i <= i_end; ++i) {
    auto in = [&](Eigen::Index j) { return phi(i, j); };
    auto o = [&](Eigen::Index j) -> Scalar& { return out(i, j); };
    if (closure.kind == BoundaryClosure<Scalar>::Kind::Prescribed) {
      out(i, 0) = closure.start(i);
      out(i, N) = closure.end(i);
    } else {
      out(i, 0) = one_sided_start(in, k);
      out(i, N) = one_sided_end(in, N, k);
    }
    pade_line(in, o, N, k);
  }
  return out;
}

/// Periodic Pade gradients on an n_x x n_y field without duplicated end nodes.
template <typename Derived>
GridField<typename Derived::Scalar> pade_gradient_x_periodic(const Eigen::DenseBase<Derived>& phi,
                                                             double h) {
  using Scalar = typename Derived::Scalar;
  GridField<Scalar> out(phi.rows(), phi.cols());
  for (Eigen::Index j = 0; j < phi.cols(); ++j)
    pade_line_periodic([&](Eigen::Index i) { return phi(i, j); },
                       [&](Eigen::Index i) -> Scalar& { return out(i, j); }, phi.rows(), h);
  return out;
}

template <typename Derived>
GridField<typename Derived::Scalar> pade_gradient_y_periodic(const Eigen::DenseBase<Derived>& phi,
                                                             double k) {
  using Scalar = typename Derived::Scalar;
  GridField<Scalar> out(phi.rows(), phi.cols());
  for (Eigen::Index i = 0; i < phi.rows(); ++i)
    pade_line_periodic([&](Eigen::Index j) { return phi(i, j); },
                       [&](Eigen::Index j) -> Scalar& { return out(i, j); }, phi.cols(), k);
  return out;
}

// ---------------------------------------------------------------------------
// Compact second and mixed derivatives from (phi, phi_x, phi_y)

/// 2 delta_x^2 phi - delta_x phi_x, fourth order in h.
template <typename Scalar>
Scalar compact_second_x(const SolutionState<Scalar>& s, double h, int i, int j) {
  return 2.0 * delta2_x(s.phi, h, i, j) - delta_x(s.phi_x, h, i, j);
}

template <typename Scalar>
Scalar compact_second_y(const SolutionState<Scalar>& s, double k, int i, int j) {
  return 2.0 * delta2_y(s.phi, k, i, j) - delta_y(s.phi_y, k, i, j);
}

/// delta_x phi_y + delta_y phi_x - delta_x delta_y phi, accurate to O(h^2 k^2).
template <typename Scalar>
Scalar compact_mixed(const SolutionState<Scalar>& s, double h, double k, int i, int j) {
  return delta_x(s.phi_y, h, i, j) + delta_y(s.phi_x, k, i, j) -
         delta_x_delta_y(s.phi, h, k, i, j);
}

/// Whole-field application of a pointwise interior operator; boundary nodes are left at zero.
template <typename Scalar, typename Op>
GridField<Scalar> apply_interior(const SolutionState<Scalar>& s, Op&& op) {
  GridField<Scalar> out = GridField<Scalar>::Zero(s.phi.rows(), s.phi.cols());
  for (int j = 1; j < s.phi.cols() - 1; ++j)
    for (int i = 1; i < s.phi.rows() - 1; ++i) out(i, j) = op(s, i, j);
  return out;
}

}  // namespace hoc
