#pragma once

#include <complex>
#include <vector>

#include "hoc/coefficients.hpp"

namespace hoc {

// ---------------------------------------------------------------------------
// Modified-wavenumber characteristics of mixed-derivative discretizations.
// Arguments are the nondimensional wavenumbers k1h = kappa1 h and k2k = kappa2 k,
// and results are normalized to h = k = 1.

double characteristic_exact(double k1h, double k2k);
/// Compact fourth-order mixed derivative with Pade gradients.
double characteristic_4oc_m(double k1h, double k2k);
/// Second-order central delta_x delta_y.
double characteristic_2oc(double k1h, double k2k);
/// Fourth-order wide-stencil central approximation.
double characteristic_4ow(double k1h, double k2k);

struct DispersionSample {
  double kappa1_h = 0.0;
  double kappa2_k = 0.0;
  double lambda_exact = 0.0;
  double lambda_4oc_m = 0.0;
  double lambda_2oc = 0.0;
  double lambda_4ow = 0.0;
};

DispersionSample dispersion_sample(double k1h, double k2k);

/// `resolution` uniformly spaced k1h in [0, pi] for every requested k2k.
std::vector<DispersionSample> dispersion_table(const std::vector<double>& k2k_values = {0.5, 1.0, 1.5, 2.0},
                                               int resolution = 101);

// ---------------------------------------------------------------------------
// von Neumann analysis of the iota scheme for constant coefficients

/// Real and imaginary parts of the operator symbol; the reaction term d is not included in F_R.
struct Symbol {
  double F_R = 0.0;
  double F_I = 0.0;
};

/// Factored form of F_R (with the R function) and F_I.
Symbol symbol_F(const ConstantCoefficients& c, double h, double k, double theta_x, double theta_y);
/// Unfactored F_R straight from substituting the Pade symbols into A_hk.
Symbol symbol_F_unfactored(const ConstantCoefficients& c, double h, double k, double theta_x,
                           double theta_y);

/// R(tx, ty) = 2 (8 + cos tx + cos ty - cos tx cos ty) cos(tx/2) cos(ty/2)
///             / sqrt((5 + cos tx)(2 + cos tx)(5 + cos ty)(2 + cos ty)).
double R_function(double theta_x, double theta_y);

/// Complex amplification factor (1 - (1-iota) dt F) / (1 + iota dt F), F = F_R + d + i F_I.
std::complex<double> amplification_factor(const ConstantCoefficients& c, double h, double k,
                                          double dt, double iota, double theta_x, double theta_y);
/// |G|.
double amplification(const ConstantCoefficients& c, double h, double k, double dt, double iota,
                     double theta_x, double theta_y);

struct StabilitySample {
  double theta_x = 0.0, theta_y = 0.0;
  double F_R = 0.0, F_I = 0.0;
  double G_magnitude = 0.0;
};

struct StabilityScan {
  ConstantCoefficients coeffs;
  double h = 0.0, k = 0.0, dt = 0.0, iota = 0.5;
  int resolution = 0;
  /// Maximum |G| and its first lexicographic maximizer (theta_x fastest).
  StabilitySample worst;
  /// Minimum F_R over the scan.
  double min_F_R = 0.0;
  /// (max|G| - 1) / dt, the K in |G| <= 1 + K dt.
  double growth_rate = 0.0;
};

/// Scans |G| over a uniform resolution x resolution grid on [0, 2 pi)^2.
StabilityScan stability_scan(const ConstantCoefficients& c, double h, double k, double dt,
                             double iota, int resolution);

}  // namespace hoc
