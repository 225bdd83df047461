#include "prte/dgp.hpp"

#include <cmath>
#include <stdexcept>

#include "prte/normal.hpp"

namespace prte::dgp {

namespace {

// sd of the selection index 0.2 + 0.3 Z1 + 0.1 Z2: sqrt(0.09*9 + 0.01*9)
constexpr double kIndexSd = 0.9486832980505138;  // sqrt(0.9)
constexpr double kInvIndexSd = 1.0540925533894598;  // sqrt(10)/3

void check_open_unit(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(who) + ": p must lie in (0,1)");
  }
}

// integrate g(Phi(s)) phi(s) ds over s in [-8, 8], i.e. over p in (0,1)
// with endpoint-avoiding nodes
double integrate_over_p(const std::function<double(double)>& g, double tol) {
  return adaptive_simpson(
      [&](double s) { return g(norm_cdf(s)) * norm_pdf(s); }, -8.0, 8.0, tol);
}

}  // namespace

Dataset generate_sample(int n, Rng& rng, const DgpParams& par) {
  SampleLatents unused;
  return generate_sample(n, rng, unused, par);
}

Dataset generate_sample(int n, Rng& rng, SampleLatents& latents,
                        const DgpParams& par) {
  if (n < 1) throw std::invalid_argument("generate_sample: n must be >= 1");
  Dataset d;
  d.y.resize(n);
  d.s.resize(n);
  d.x.resize(n, 2);
  d.z.resize(n, 2);
  latents.u0.resize(n);
  latents.u1.resize(n);
  latents.u.resize(n);
  for (int i = 0; i < n; ++i) {
    const double e1 = rng.normal(), e2 = rng.normal(), e3 = rng.normal();
    const double x1 = par.x1_mean + par.x1_sd * rng.normal();
    const double x2 = par.x2_mean + par.x2_sd * rng.normal();
    const double z1 = par.z1_mean + par.z1_sd * rng.normal();
    const double z2 = par.z2_mean + par.z2_sd * rng.normal();
    const double u0 = par.l01 * e1 + par.l03 * e3;
    const double u1 = par.l11 * e1 + par.l12 * e2;
    const double us = par.ls1 * e1;
    const double y1 = par.y1_intercept + par.y1_x1 * x1 + par.y1_x2 * x2 + u1;
    const double y0 = par.y0_intercept + par.y0_x1 * x1 + par.y0_x2 * x2 + u0;
    const double s =
        (par.s_intercept + par.s_z1 * z1 + par.s_z2 * z2 - us > 0.0) ? 1.0
                                                                     : 0.0;
    d.x(i, 0) = x1;
    d.x(i, 1) = x2;
    d.z(i, 0) = z1;
    d.z(i, 1) = z2;
    d.s[i] = s;
    d.y[i] = s * y1 + (1.0 - s) * y0;
    latents.u0[i] = u0;
    latents.u1[i] = u1;
    latents.u[i] = s * u1 + (1.0 - s) * u0;
  }
  return d;
}

double true_propensity(double z1, double z2) {
  return norm_cdf(0.2 + 0.3 * z1 + 0.1 * z2);
}

CdfPdf true_fp(double p) {
  check_open_unit(p, "true_fp");
  const double c = norm_quantile(p);  // = -Phi^{-1}(1-p)
  CdfPdf out;
  out.cdf = norm_cdf(kInvIndexSd * c);
  out.pdf = kInvIndexSd * norm_pdf(kInvIndexSd * c) / norm_pdf(c);
  return out;
}

CdfPdf true_fpstar(double p, double a) {
  if (!(a >= 0.0 && a < 1.0)) {
    throw std::invalid_argument("true_fpstar: a must lie in [0,1)");
  }
  if (p <= a) return {0.0, 0.0};
  if (p >= 1.0) return {1.0, 0.0};
  const CdfPdf base = true_fp((p - a) / (1.0 - a));
  return {base.cdf, base.pdf / (1.0 - a)};
}

double true_mte(double x1, double x2, double p) {
  check_open_unit(p, "true_mte");
  return 0.220 + 0.300 * x1 + 0.300 * x2 + 0.062 * norm_quantile(1.0 - p);
}

double true_g_u_given_p(double p) {
  check_open_unit(p, "true_g_u_given_p");
  return 0.062 * norm_pdf(norm_quantile(1.0 - p));
}

double true_delta_u_given_p(double p) {
  check_open_unit(p, "true_delta_u_given_p");
  return 0.062 * norm_quantile(1.0 - p);
}

double true_resid_mean_given_p(double p) {
  return 0.02 + 0.22 * p + true_g_u_given_p(p);
}

double true_resid_delta_given_p(double p) {
  return 0.22 + true_delta_u_given_p(p);
}

double true_g_y_given_p(double p) {
  // E[Y|P=p] = p(0.24 + mubar'b1) + (1-p)(0.02 + mubar'b0) + g_u(p)
  // with mubar = (-2, 2): mubar'b1 = mubar'b0 = -0.8.
  return true_resid_mean_given_p(p) - 0.8;
}

double true_density_ratio(double p, double a) {
  check_open_unit(p, "true_density_ratio");
  const double fp = true_fp(p).pdf;
  const double fps = true_fpstar(p, a).pdf;
  return fps / fp;
}

double true_prte(double a) {
  if (!(a >= 0.0 && a < 1.0)) {
    throw std::invalid_argument("true_prte: a must lie in [0,1)");
  }
  if (a == 0.0) return 0.0;
  return integrate_over_p(
      [&](double p) {
        const double gap = true_fp(p).cdf - true_fpstar(p, a).cdf;
        return (0.220 + 0.062 * norm_quantile(1.0 - p)) * gap;
      },
      1e-10);
}

double true_prte_zshift(double mean_shift) {
  if (mean_shift == 0.0) return 0.0;
  // P* = Phi(W + m), W ~ N(0, 0.9): F_{P*}(p) = Phi((Phi^{-1}(p) - m)/sd(W))
  return integrate_over_p(
      [&](double p) {
        const double gap =
            true_fp(p).cdf -
            norm_cdf((norm_quantile(p) - mean_shift) / kIndexSd);
        return (0.220 + 0.062 * norm_quantile(1.0 - p)) * gap;
      },
      1e-10);
}

Eigen::VectorXd true_beta() {
  Eigen::VectorXd b(4);
  b << 0.5, 0.1, 0.8, 0.4;
  return b;
}

namespace {
// E[P] = 1/2 by symmetry; E[P^2] = 1/4 + arcsin(rho)/(2 pi) with
// rho = var(W)/(1+var(W)) for P = Phi(W), W ~ N(0, 0.9).
constexpr double kVarW = 0.9;
const double kEP2 = 0.25 + std::asin(kVarW / (1.0 + kVarW)) / (2.0 * M_PI);
const double kEPQ = 0.5 - kEP2;  // E[P(1-P)]; E[(1-P)^2] = E[P^2] by symmetry
constexpr double kVarX = 4.0;    // both covariates
}  // namespace

Eigen::VectorXd true_theta1() {
  // E[xi1] with v = ((1-P)(x - mubar); P(x - mubar)), X independent of P.
  Eigen::VectorXd b = true_beta();
  const Eigen::Vector2d b0 = b.head<2>(), b1 = b.tail<2>();
  Eigen::MatrixXd B(4, 4);
  B.setZero();
  B(0, 0) = B(1, 1) = kEP2 * kVarX;
  B(2, 2) = B(3, 3) = kEP2 * kVarX;
  B(0, 2) = B(1, 3) = B(2, 0) = B(3, 1) = kEPQ * kVarX;
  Eigen::VectorXd A(4);
  A.head<2>() = kVarX * (kEPQ * b1 + kEP2 * b0);
  A.tail<2>() = kVarX * (kEP2 * b1 + kEPQ * b0);
  Eigen::VectorXd th(20);
  for (int j = 0; j < 4; ++j) th.segment<4>(4 * j) = B.col(j);
  th.tail<4>() = A;
  return th;
}

Eigen::VectorXd true_theta2(double a) {
  Eigen::VectorXd th(4);
  th << -2.0, 2.0, -2.0, 2.0;
  return th * (0.5 * a);  // E[(x,x)'(P*-P)] = a E[1-P] E[(x,x)'], E[P] = 1/2
}

double true_theta3(double a) {
  if (a == 0.0) return 0.0;
  return integrate_over_p(
      [&](double p) {
        const double gap = true_fp(p).cdf - true_fpstar(p, a).cdf;
        return true_resid_delta_given_p(p) * gap;
      },
      1e-10);
}

Eigen::VectorXd true_zeta(double z1, double z2) {
  const double p = true_propensity(z1, z2);
  Eigen::VectorXd b = true_beta();
  const Eigen::Vector2d bbar =
      p * b.tail<2>() + (1.0 - p) * b.head<2>();
  // E[d/dp (v v') | Z] blocks and E[(dv/dp) r | Z] tail, X independent of Z
  Eigen::MatrixXd M(4, 4);
  M.setZero();
  M(0, 0) = M(1, 1) = -2.0 * (1.0 - p) * kVarX;
  M(2, 2) = M(3, 3) = 2.0 * p * kVarX;
  M(0, 2) = M(1, 3) = M(2, 0) = M(3, 1) = (1.0 - 2.0 * p) * kVarX;
  Eigen::VectorXd zeta(20);
  for (int j = 0; j < 4; ++j) zeta.segment<4>(4 * j) = M.col(j);
  zeta.segment<2>(16) = -kVarX * bbar;
  zeta.segment<2>(18) = kVarX * bbar;
  return zeta;
}

}  // namespace prte::dgp
