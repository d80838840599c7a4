#include "hoc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hoc/errors.hpp"

namespace hoc {

namespace {
constexpr double kPi = std::numbers::pi;
}

double characteristic_exact(double k1h, double k2k) { return -k1h * k2k; }

double characteristic_4oc_m(double k1h, double k2k) {
  return -std::sin(k1h) * std::sin(k2k) *
         (3.0 / (2.0 + std::cos(k1h)) + 3.0 / (2.0 + std::cos(k2k)) - 1.0);
}

double characteristic_2oc(double k1h, double k2k) { return -std::sin(k1h) * std::sin(k2k); }

double characteristic_4ow(double k1h, double k2k) {
  return -std::sin(k1h) * std::sin(k2k) * (4.0 - std::cos(k1h)) * (4.0 - std::cos(k2k)) / 9.0;
}

DispersionSample dispersion_sample(double k1h, double k2k) {
  return {k1h,
          k2k,
          characteristic_exact(k1h, k2k),
          characteristic_4oc_m(k1h, k2k),
          characteristic_2oc(k1h, k2k),
          characteristic_4ow(k1h, k2k)};
}

std::vector<DispersionSample> dispersion_table(const std::vector<double>& k2k_values, int resolution) {
  if (resolution < 2) throw DomainError("dispersion table needs at least two samples");
  std::vector<DispersionSample> rows;
  rows.reserve(k2k_values.size() * std::size_t(resolution));
  for (double k2k : k2k_values)
    for (int r = 0; r < resolution; ++r)
      rows.push_back(dispersion_sample(kPi * r / (resolution - 1), k2k));
  return rows;
}

double R_function(double tx, double ty) {
  const double cx = std::cos(tx), cy = std::cos(ty);
  return 2.0 * (8.0 + cx + cy - cx * cy) * std::cos(tx / 2.0) * std::cos(ty / 2.0) /
         std::sqrt((5.0 + cx) * (2.0 + cx) * (5.0 + cy) * (2.0 + cy));
}

namespace {

void require_definite(const ConstantCoefficients& c) {
  if (!c.positive_definite()) throw DomainError("diffusion matrix not positive definite");
}

double imaginary_part(const ConstantCoefficients& c, double h, double k, double tx, double ty) {
  return c.c1 * 3.0 * std::sin(tx) / (h * (2.0 + std::cos(tx))) +
         c.c2 * 3.0 * std::sin(ty) / (k * (2.0 + std::cos(ty)));
}

}  // namespace

Symbol symbol_F(const ConstantCoefficients& c, double h, double k, double tx, double ty) {
  require_definite(c);
  const double cx = std::cos(tx), cy = std::cos(ty);
  const double sx2 = std::sin(tx / 2.0), sy2 = std::sin(ty / 2.0);
  const double qx = (5.0 + cx) / (2.0 + cx), qy = (5.0 + cy) / (2.0 + cy);
  const double fr = 2.0 * c.alpha1 / (h * h) * sx2 * sx2 * qx +
                    2.0 * c.alpha2 / (k * k) * sy2 * sy2 * qy +
                    2.0 * c.beta / (h * k) * sx2 * sy2 * std::sqrt(qx) * std::sqrt(qy) *
                        R_function(tx, ty);
  return {fr, imaginary_part(c, h, k, tx, ty)};
}

Symbol symbol_F_unfactored(const ConstantCoefficients& c, double h, double k, double tx, double ty) {
  require_definite(c);
  const double cx = std::cos(tx), cy = std::cos(ty);
  const double sx = std::sin(tx), sy = std::sin(ty);
  const double fr = c.alpha1 / (h * h) * (4.0 * (1.0 - cx) - 3.0 * sx * sx / (2.0 + cx)) +
                    c.alpha2 / (k * k) * (4.0 * (1.0 - cy) - 3.0 * sy * sy / (2.0 + cy)) +
                    c.beta / (h * k) * sx * sy * (3.0 / (2.0 + cx) + 3.0 / (2.0 + cy) - 1.0);
  return {fr, imaginary_part(c, h, k, tx, ty)};
}

std::complex<double> amplification_factor(const ConstantCoefficients& c, double h, double k,
                                          double dt, double iota, double tx, double ty) {
  const Symbol f = symbol_F(c, h, k, tx, ty);
  const std::complex<double> F(f.F_R + c.d, f.F_I);
  const std::complex<double> denom = 1.0 + iota * dt * F;
  if (std::abs(denom) == 0.0) throw DomainError("amplification factor denominator vanishes");
  return (1.0 - (1.0 - iota) * dt * F) / denom;
}

double amplification(const ConstantCoefficients& c, double h, double k, double dt, double iota,
                     double tx, double ty) {
  const Symbol f = symbol_F(c, h, k, tx, ty);
  const double fr = f.F_R + c.d;
  const double num = std::pow(1.0 - (1.0 - iota) * dt * fr, 2) +
                     std::pow((1.0 - iota) * dt * f.F_I, 2);
  const double den = std::pow(1.0 + iota * dt * fr, 2) + std::pow(iota * dt * f.F_I, 2);
  if (den == 0.0) throw DomainError("amplification factor denominator vanishes");
  return std::sqrt(num / den);
}

StabilityScan stability_scan(const ConstantCoefficients& c, double h, double k, double dt,
                             double iota, int resolution) {
  if (resolution < 8) throw DomainError("stability scan resolution must be at least 8");
  StabilityScan scan;
  scan.coeffs = c;
  scan.h = h;
  scan.k = k;
  scan.dt = dt;
  scan.iota = iota;
  scan.resolution = resolution;
  scan.worst.G_magnitude = -1.0;
  scan.min_F_R = std::numeric_limits<double>::infinity();
  const double step = 2.0 * kPi / resolution;
  for (int b = 0; b < resolution; ++b) {
    for (int a = 0; a < resolution; ++a) {
      const double tx = a * step, ty = b * step;
      const Symbol f = symbol_F(c, h, k, tx, ty);
      const double g = amplification(c, h, k, dt, iota, tx, ty);
      scan.min_F_R = std::min(scan.min_F_R, f.F_R);
      if (g > scan.worst.G_magnitude) scan.worst = {tx, ty, f.F_R, f.F_I, g};
    }
  }
  scan.growth_rate = (scan.worst.G_magnitude - 1.0) / dt;
  return scan;
}

}  // namespace hoc
