#include "hoc/grid.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace hoc {

namespace {

constexpr double kPi = std::numbers::pi;

// Fourth-order centred first-difference weights on offsets -2..2.
constexpr std::array<double, 5> kD1 = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
// Fourth-order centred second-difference weights on offsets -2..2.
constexpr std::array<double, 5> kD2 = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0,
                                       -1.0 / 12.0};
constexpr double kFirstStep = 1e-3;
constexpr double kSecondStep = 5e-3;

bool indefinite(double a1, double a2, double b) {
  return !(a1 > 0.0) || !(a2 > 0.0) || !(b * b < 4.0 * a1 * a2);
}

}  // namespace

Grid2D build_uniform_grid(const Bounds& b, int M, int N) {
  if (M < 2 || N < 2) throw InvalidGridError("grid needs at least 2 intervals per direction");
  if (!(b.a2 > b.a1) || !(b.a4 > b.a3) || !std::isfinite(b.a2 - b.a1) || !std::isfinite(b.a4 - b.a3))
    throw InvalidGridError("degenerate grid bounds");
  Grid2D g;
  g.M = M;
  g.N = N;
  g.a1 = b.a1;
  g.a2 = b.a2;
  g.a3 = b.a3;
  g.a4 = b.a4;
  g.h = (b.a2 - b.a1) / M;
  g.k = (b.a4 - b.a3) / N;
  return g;
}

std::pair<int, int> CoefficientField::first_indefinite_node() const {
  for (Eigen::Index j = 0; j < alpha1.cols(); ++j)
    for (Eigen::Index i = 0; i < alpha1.rows(); ++i)
      if (indefinite(alpha1(i, j), alpha2(i, j), beta(i, j))) return {int(i), int(j)};
  return {-1, -1};
}

CoefficientField constant_coefficients(const Grid2D& g, double alpha1, double alpha2, double beta,
                                       double c1, double c2, double d, double s) {
  CoefficientField cf;
  cf.alpha1 = make_field(g, alpha1);
  cf.alpha2 = make_field(g, alpha2);
  cf.beta = make_field(g, beta);
  cf.c1 = make_field(g, c1);
  cf.c2 = make_field(g, c2);
  cf.d = make_field(g, d);
  cf.s = make_field(g, s);
  return cf;
}

CoefficientField sample_coefficients(const Grid2D& g, const PhysicalCoefficients& pc, double t) {
  auto at = [&](const SpaceTimeFn& f) {
    return sample(g, [&](double x, double y) { return f ? f(x, y, t) : 0.0; });
  };
  CoefficientField cf;
  cf.alpha1 = at(pc.alpha1);
  cf.alpha2 = at(pc.alpha2);
  cf.beta = at(pc.beta);
  cf.c1 = at(pc.c1);
  cf.c2 = at(pc.c2);
  cf.d = at(pc.d);
  cf.s = at(pc.s);
  cf.time = t;
  return cf;
}

Metric Mapping::metric_at(double xi, double eta) const {
  if (metric) return metric(xi, eta);
  Eigen::Vector2d dxi = Eigen::Vector2d::Zero(), deta = Eigen::Vector2d::Zero();
  for (int a = 0; a < 5; ++a) {
    const double off = (a - 2) * kFirstStep;
    dxi += kD1[a] * forward(xi + off, eta);
    deta += kD1[a] * forward(xi, eta + off);
  }
  dxi /= kFirstStep;
  deta /= kFirstStep;
  return {dxi.x(), deta.x(), dxi.y(), deta.y()};
}

MapHessian Mapping::hessian_at(double xi, double eta) const {
  if (hessian) return hessian(xi, eta);
  const double s = kSecondStep;
  Eigen::Vector2d fxx = Eigen::Vector2d::Zero(), fyy = Eigen::Vector2d::Zero(),
                  fxy = Eigen::Vector2d::Zero();
  for (int a = 0; a < 5; ++a) {
    const double oa = (a - 2) * s;
    fxx += kD2[a] * forward(xi + oa, eta);
    fyy += kD2[a] * forward(xi, eta + oa);
    for (int b = 0; b < 5; ++b) {
      if (kD1[a] == 0.0 || kD1[b] == 0.0) continue;
      fxy += kD1[a] * kD1[b] * forward(xi + oa, eta + (b - 2) * s);
    }
  }
  fxx /= s * s;
  fyy /= s * s;
  fxy /= s * s;
  return {fxx.x(), fxy.x(), fyy.x(), fxx.y(), fxy.y(), fyy.y()};
}

Mapping identity_mapping() {
  Mapping m;
  m.name = "identity";
  m.forward = [](double xi, double eta) { return Eigen::Vector2d(xi, eta); };
  m.metric = [](double, double) { return Metric{}; };
  m.hessian = [](double, double) { return MapHessian{}; };
  return m;
}

Mapping problem2_mapping(double lambda) {
  if (lambda < 0.0) throw DomainError("stretch parameter must be non-negative");
  if (lambda >= 1.0) throw NonMonotoneMappingError("stretch parameter must be below 1");
  Mapping m;
  m.name = "problem2-stretch";
  m.forward = [lambda](double xi, double eta) {
    const double p = eta + lambda / kPi * std::sin(kPi * eta);
    return Eigen::Vector2d(xi, p / (1.0 - 0.3 * std::sin(6.0 * xi)));
  };
  m.metric = [lambda](double xi, double eta) {
    const double D = 1.0 - 0.3 * std::sin(6.0 * xi);
    const double Dp = -1.8 * std::cos(6.0 * xi);
    const double P = eta + lambda / kPi * std::sin(kPi * eta);
    const double Pp = 1.0 + lambda * std::cos(kPi * eta);
    return Metric{1.0, 0.0, -P * Dp / (D * D), Pp / D};
  };
  m.hessian = [lambda](double xi, double eta) {
    const double D = 1.0 - 0.3 * std::sin(6.0 * xi);
    const double Dp = -1.8 * std::cos(6.0 * xi);
    const double Dpp = 10.8 * std::sin(6.0 * xi);
    const double P = eta + lambda / kPi * std::sin(kPi * eta);
    const double Pp = 1.0 + lambda * std::cos(kPi * eta);
    const double Ppp = -lambda * kPi * std::sin(kPi * eta);
    MapHessian hs;
    hs.y_xixi = P * (2.0 * Dp * Dp / (D * D * D) - Dpp / (D * D));
    hs.y_xieta = -Pp * Dp / (D * D);
    hs.y_etaeta = Ppp / D;
    return hs;
  };
  return m;
}

Mapping log_polar_mapping() {
  Mapping m;
  m.name = "log-polar";
  m.forward = [](double xi, double eta) {
    const double r = 0.5 * std::exp(kPi * xi);
    return Eigen::Vector2d(r * std::cos(kPi * eta), r * std::sin(kPi * eta));
  };
  m.metric = [](double xi, double eta) {
    const double r = 0.5 * std::exp(kPi * xi);
    const double x = r * std::cos(kPi * eta), y = r * std::sin(kPi * eta);
    return Metric{kPi * x, -kPi * y, kPi * y, kPi * x};
  };
  m.hessian = [](double xi, double eta) {
    const double r = 0.5 * std::exp(kPi * xi);
    const double x = r * std::cos(kPi * eta), y = r * std::sin(kPi * eta);
    const double p2 = kPi * kPi;
    return MapHessian{p2 * x, -p2 * y, -p2 * x, p2 * y, p2 * x, -p2 * y};
  };
  return m;
}

Mapping similarity_mapping(double scale, double angle, double x0, double y0) {
  if (!(scale > 0.0)) throw SingularMappingError("similarity scale must be positive");
  const double c = scale * std::cos(angle), s = scale * std::sin(angle);
  Mapping m;
  m.name = "similarity";
  m.forward = [=](double xi, double eta) {
    return Eigen::Vector2d(x0 + c * xi - s * eta, y0 + s * xi + c * eta);
  };
  m.metric = [=](double, double) { return Metric{c, -s, s, c}; };
  m.hessian = [](double, double) { return MapHessian{}; };
  return m;
}

Mapping finite_difference_mapping(std::string name,
                                  std::function<Eigen::Vector2d(double, double)> forward) {
  Mapping m;
  m.name = std::move(name);
  m.forward = std::move(forward);
  return m;
}

Mapping mapping_by_name(const std::string& name, double lambda) {
  if (name == "identity") return identity_mapping();
  if (name == "problem2-stretch") return problem2_mapping(lambda);
  if (name == "log-polar") return log_polar_mapping();
  throw ConfigError("unknown mapping '" + name + "'");
}

GridGeometry compute_geometry(const Mapping& map, const Grid2D& g) {
  GridGeometry geo;
  for (RealField* f : {&geo.x, &geo.y, &geo.x_xi, &geo.x_eta, &geo.y_xi, &geo.y_eta, &geo.jac,
                       &geo.xi_x, &geo.xi_y, &geo.eta_x, &geo.eta_y, &geo.xi_xx, &geo.xi_xy,
                       &geo.xi_yy, &geo.eta_xx, &geo.eta_xy, &geo.eta_yy})
    f->resize(g.nx(), g.ny());

  for (int j = 0; j <= g.N; ++j) {
    for (int i = 0; i <= g.M; ++i) {
      const double xi = g.x(i), eta = g.y(j);
      const Eigen::Vector2d p = map(xi, eta);
      const Metric mt = map.metric_at(xi, eta);
      const double J = mt.jacobian();
      if (!std::isfinite(J) || std::abs(J) < 1e-12)
        throw SingularMappingError("mapping '" + map.name + "' has vanishing Jacobian at node (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
      geo.x(i, j) = p.x();
      geo.y(i, j) = p.y();
      geo.x_xi(i, j) = mt.x_xi;
      geo.x_eta(i, j) = mt.x_eta;
      geo.y_xi(i, j) = mt.y_xi;
      geo.y_eta(i, j) = mt.y_eta;
      geo.jac(i, j) = J;

      // K = d(xi,eta)/d(x,y) is the inverse of the map Jacobian.
      Eigen::Matrix2d K;
      K << mt.y_eta / J, -mt.x_eta / J, -mt.y_xi / J, mt.x_xi / J;
      geo.xi_x(i, j) = K(0, 0);
      geo.xi_y(i, j) = K(0, 1);
      geo.eta_x(i, j) = K(1, 0);
      geo.eta_y(i, j) = K(1, 1);

      const MapHessian hs = map.hessian_at(xi, eta);
      Eigen::Matrix2d Hx, Hy;
      Hx << hs.x_xixi, hs.x_xieta, hs.x_xieta, hs.x_etaeta;
      Hy << hs.y_xixi, hs.y_xieta, hs.y_xieta, hs.y_etaeta;
      // d2 xi^a / dx^p dx^q = -K^a_b H^b_cd K^c_p K^d_q
      const Eigen::Matrix2d Sx = K.transpose() * Hx * K;
      const Eigen::Matrix2d Sy = K.transpose() * Hy * K;
      const Eigen::Matrix2d Sxi = -(K(0, 0) * Sx + K(0, 1) * Sy);
      const Eigen::Matrix2d Seta = -(K(1, 0) * Sx + K(1, 1) * Sy);
      geo.xi_xx(i, j) = Sxi(0, 0);
      geo.xi_xy(i, j) = Sxi(0, 1);
      geo.xi_yy(i, j) = Sxi(1, 1);
      geo.eta_xx(i, j) = Seta(0, 0);
      geo.eta_xy(i, j) = Seta(0, 1);
      geo.eta_yy(i, j) = Seta(1, 1);
    }
  }
  return geo;
}

CoefficientField transform_scalar_pde(const GridGeometry& geo, const Grid2D& g,
                                      const PhysicalCoefficients& pc, double t) {
  require_shape(g, geo.x, "transform_scalar_pde");
  auto eval = [t](const SpaceTimeFn& f, double x, double y) { return f ? f(x, y, t) : 0.0; };
  CoefficientField cf = constant_coefficients(g, 0, 0, 0, 0, 0, 0, 0);
  cf.time = t;
  for (int j = 0; j <= g.N; ++j) {
    for (int i = 0; i <= g.M; ++i) {
      const double x = geo.x(i, j), y = geo.y(i, j);
      const double a11 = eval(pc.alpha1, x, y), a22 = eval(pc.alpha2, x, y);
      const double b = eval(pc.beta, x, y);
      const double c1 = eval(pc.c1, x, y), c2 = eval(pc.c2, x, y);
      const double xx = geo.xi_x(i, j), xy = geo.xi_y(i, j);
      const double ex = geo.eta_x(i, j), ey = geo.eta_y(i, j);

      cf.alpha1(i, j) = a11 * xx * xx + b * xx * xy + a22 * xy * xy;
      cf.alpha2(i, j) = a11 * ex * ex + b * ex * ey + a22 * ey * ey;
      cf.beta(i, j) = 2.0 * a11 * xx * ex + b * (xx * ey + xy * ex) + 2.0 * a22 * xy * ey;
      cf.c1(i, j) = c1 * xx + c2 * xy -
                    (a11 * geo.xi_xx(i, j) + b * geo.xi_xy(i, j) + a22 * geo.xi_yy(i, j));
      cf.c2(i, j) = c1 * ex + c2 * ey -
                    (a11 * geo.eta_xx(i, j) + b * geo.eta_xy(i, j) + a22 * geo.eta_yy(i, j));
      cf.d(i, j) = eval(pc.d, x, y);
      cf.s(i, j) = eval(pc.s, x, y);
    }
  }
  if (auto [bi, bj] = cf.first_indefinite_node(); bi >= 0)
    throw IllPosedError("transformed diffusion matrix not positive definite at node (" +
                        std::to_string(bi) + "," + std::to_string(bj) + ")");
  return cf;
}

CoefficientField transform_scalar_pde(const Mapping& map, const Grid2D& g,
                                      const PhysicalCoefficients& pc, double t) {
  return transform_scalar_pde(compute_geometry(map, g), g, pc, t);
}

TransformedCoefficients transform_navier_stokes(const GridGeometry& geo, double reynolds,
                                                const RealField& omega, const RealField& u,
                                                const RealField& v) {
  if (!(reynolds > 0.0)) throw DomainError("Reynolds number must be positive");
  const double nu = 1.0 / reynolds;
  TransformedCoefficients tc;
  tc.a1t = geo.xi_x.square() + geo.xi_y.square();
  tc.b1t = geo.eta_x.square() + geo.eta_y.square();
  tc.e1t = 2.0 * (geo.xi_x * geo.eta_x + geo.xi_y * geo.eta_y);
  tc.c1t = -(geo.xi_xx + geo.xi_yy);
  tc.d1t = -(geo.eta_xx + geo.eta_yy);
  tc.f1t = omega;

  tc.a2t = nu * tc.a1t;
  tc.b2t = nu * tc.b1t;
  tc.e2t = nu * tc.e1t;
  tc.c2t = u * geo.xi_x + v * geo.xi_y + nu * tc.c1t;
  tc.d2t = u * geo.eta_x + v * geo.eta_y + nu * tc.d1t;

  for (Eigen::Index j = 0; j < tc.a1t.cols(); ++j)
    for (Eigen::Index i = 0; i < tc.a1t.rows(); ++i)
      if (indefinite(tc.a1t(i, j), tc.b1t(i, j), tc.e1t(i, j)) ||
          indefinite(tc.a2t(i, j), tc.b2t(i, j), tc.e2t(i, j)))
        throw IllPosedError("transformed Navier-Stokes diffusion not positive definite");
  return tc;
}

}  // namespace hoc
