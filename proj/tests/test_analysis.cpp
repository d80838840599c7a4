#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hoc/analysis.hpp"
#include "hoc/assembly.hpp"

using namespace hoc;
using std::numbers::pi;

namespace {

ConstantCoefficients random_admissible(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ConstantCoefficients c;
  c.alpha1 = 0.01 + 10 * U(rng);
  c.alpha2 = 0.01 + 10 * U(rng);
  c.beta = (2 * U(rng) - 1) * 0.999 * 2 * std::sqrt(c.alpha1 * c.alpha2);
  c.c1 = 200 * (U(rng) - 0.5);
  c.c2 = 200 * (U(rng) - 0.5);
  c.d = 5 * U(rng);
  return c;
}

}  // namespace

TEST_CASE("R function extrema") {
  CHECK(std::abs(R_function(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(R_function(0, 2 * pi) + 1.0) < 1e-14);
  for (int a = 0; a < 40; ++a)
    for (int b = 0; b < 40; ++b) {
      const double r = R_function(2 * pi * a / 40, 2 * pi * b / 40);
      CHECK(r <= 1.0 + 1e-14);
      CHECK(r >= -1.0 - 1e-14);
    }
}

TEST_CASE("factored and unfactored symbols agree") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> T(0.0, 2 * pi);
  for (int n = 0; n < 200; ++n) {
    const ConstantCoefficients c = random_admissible(rng);
    const double tx = T(rng), ty = T(rng);
    const Symbol a = symbol_F(c, 0.05, 0.07, tx, ty);
    const Symbol b = symbol_F_unfactored(c, 0.05, 0.07, tx, ty);
    const double scale = std::abs(a.F_R) + std::abs(b.F_R) + 1.0;
    CHECK(std::abs(a.F_R - b.F_R) <= 1e-12 * scale * 1e3);
    CHECK(a.F_I == doctest::Approx(b.F_I).epsilon(1e-12).scale(1.0));
    CHECK(a.F_R >= -1e-9 * scale);
  }
}

TEST_CASE("symbol rejects indefinite diffusion") {
  ConstantCoefficients c{1.0, 1.0, 2.5, 0, 0, 0};
  CHECK_THROWS_AS(symbol_F(c, 0.1, 0.1, 0.3, 0.4), DomainError);
}

TEST_CASE("iota scheme is unconditionally stable for d >= 0") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 30; ++n) {
    const ConstantCoefficients c = random_admissible(rng);
    for (double iota : {0.5, 0.75, 1.0}) {
      const double dt = std::pow(10.0, -4 + 6 * U(rng));
      const StabilityScan s = stability_scan(c, 1.0 / 32, 1.0 / 40, dt, iota, 32);
      CHECK(s.worst.G_magnitude <= 1.0 + 1e-12);
      CHECK(s.min_F_R >= -1e-8);
    }
  }
}

TEST_CASE("explicit scheme with a large step is unstable") {
  const ConstantCoefficients c{1.0, 1.0, 0.5, 1.0, 1.0, 0.0};
  const StabilityScan s = stability_scan(c, 0.1, 0.1, 10.0, 0.0, 16);
  CHECK(s.worst.G_magnitude > 1.0);
  CHECK(s.growth_rate > 0.0);
  CHECK_THROWS_AS(stability_scan(c, 0.1, 0.1, 0.1, 0.5, 4), DomainError);
}

TEST_CASE("negative reaction bounds growth by 1 + K dt") {
  const ConstantCoefficients c{1.0, 1.0, 0.0, 0.0, 0.0, -2.0};
  const StabilityScan s = stability_scan(c, 0.1, 0.1, 0.01, 1.0, 16);
  CHECK(s.worst.G_magnitude > 1.0);
  CHECK(s.growth_rate <= 2.0 / (1.0 - 0.02) + 1e-9);
}

TEST_CASE("periodic stepper reproduces the amplification factor") {
  const int n = 16;
  const double h = 2 * pi / n / 3.0, k = 2 * pi / n / 2.0;
  const ConstantCoefficients c{0.7, 1.3, 0.6, 2.0, -1.5, 0.4};
  const int mx = 3, my = 2;
  const double tx = 2 * pi * mx / n, ty = 2 * pi * my / n;
  GridField<std::complex<double>> phi(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) phi(i, j) = std::polar(1.0, tx * i + ty * j);
  for (double iota : {0.0, 0.5, 1.0}) {
    const double dt = 0.01;
    const auto next = step_theta_periodic(c, phi, h, k, dt, iota);
    const std::complex<double> G = amplification_factor(c, h, k, dt, iota, tx, ty);
    double worst = 0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(next(i, j) / phi(i, j) - G));
    CHECK(worst <= 1e-8 * std::abs(G));
  }
}

TEST_CASE("dispersion: compact characteristic is closest to exact") {
  const auto table = dispersion_table({0.5, 1.0, 1.5, 2.0}, 201);
  CHECK(table.size() == 4 * 201);
  for (const DispersionSample& s : table) {
    if (s.kappa1_h <= 0.0 || s.kappa1_h > 2.0) continue;
    const double e4 = std::abs(s.lambda_4oc_m - s.lambda_exact);
    CHECK(e4 < std::abs(s.lambda_2oc - s.lambda_exact));
    CHECK(e4 < std::abs(s.lambda_4ow - s.lambda_exact));
  }
  CHECK(characteristic_exact(0.3, 0.4) == doctest::Approx(-0.12));
  CHECK(std::abs(characteristic_4oc_m(0.01, 0.02) - characteristic_exact(0.01, 0.02)) < 1e-10);
  CHECK_THROWS_AS(dispersion_table({1.0}, 1), DomainError);
}
