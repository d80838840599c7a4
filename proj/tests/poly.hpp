#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hoc/coefficients.hpp"
#include "hoc/field.hpp"

namespace hoc::test {

/// Bivariate polynomial sum c_pq x^p y^q with p + q <= degree.
struct Poly2 {
  struct Term {
    int p, q;
    double c;
  };
  std::vector<Term> terms;

  static Poly2 random(int degree, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Poly2 out;
    for (int p = 0; p <= degree; ++p)
      for (int q = 0; p + q <= degree; ++q) out.terms.push_back({p, q, U(rng)});
    return out;
  }

  /// d^a/dx^a d^b/dy^b at (x, y).
  double deriv(int a, int b, double x, double y) const {
    double acc = 0;
    for (const Term& t : terms) {
      if (t.p < a || t.q < b) continue;
      double f = t.c;
      for (int r = 0; r < a; ++r) f *= t.p - r;
      for (int r = 0; r < b; ++r) f *= t.q - r;
      acc += f * std::pow(x, t.p - a) * std::pow(y, t.q - b);
    }
    return acc;
  }
  double operator()(double x, double y) const { return deriv(0, 0, x, y); }

  RealState state(const Grid2D& g) const {
    return {sample(g, [&](double x, double y) { return deriv(0, 0, x, y); }),
            sample(g, [&](double x, double y) { return deriv(1, 0, x, y); }),
            sample(g, [&](double x, double y) { return deriv(0, 1, x, y); })};
  }

  /// Continuous operator -a1 u_xx - b u_xy - a2 u_yy + c1 u_x + c2 u_y + d u.
  double apply(const ConstantCoefficients& c, double x, double y) const {
    return -c.alpha1 * deriv(2, 0, x, y) - c.beta * deriv(1, 1, x, y) - c.alpha2 * deriv(0, 2, x, y) +
           c.c1 * deriv(1, 0, x, y) + c.c2 * deriv(0, 1, x, y) + c.d * deriv(0, 0, x, y);
  }

  /// Magnitude used for relative comparisons.
  double scale() const {
    double s = 0;
    for (const Term& t : terms) s += std::abs(t.c) * (1 + t.p * t.p + t.q * t.q) * 8;
    return s;
  }
};

}  // namespace hoc::test
