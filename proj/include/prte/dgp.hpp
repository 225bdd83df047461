#pragma once

#include <Eigen/Dense>

#include "prte/rng.hpp"
#include "prte/types.hpp"

namespace prte::dgp {

// Fixed coefficients of the simulation design.
struct DgpParams {
  // outcome equations
  double y1_intercept = 0.240, y1_x1 = 0.800, y1_x2 = 0.400;
  double y0_intercept = 0.020, y0_x1 = 0.500, y0_x2 = 0.100;
  // selection index
  double s_intercept = 0.200, s_z1 = 0.300, s_z2 = 0.100;
  // error loadings: u0 = l01*e1 + l03*e3, u1 = l11*e1 + l12*e2, us = ls1*e1
  double l01 = -0.050, l03 = 0.020;
  double l11 = 0.012, l12 = 0.010;
  double ls1 = -1.000;
  // covariate / instrument moments (mean, sd)
  double x1_mean = -2.0, x1_sd = 2.0, x2_mean = 2.0, x2_sd = 2.0;
  double z1_mean = -1.0, z1_sd = 3.0, z2_mean = 1.0, z2_sd = 3.0;
};

// Latent error draws kept alongside a generated sample; u = s*u1 + (1-s)*u0
// is the centered outcome error used by the conditional-mean oracles.
struct SampleLatents {
  Eigen::VectorXd u0, u1, u;
};

Dataset generate_sample(int n, Rng& rng, const DgpParams& par = DgpParams{});
Dataset generate_sample(int n, Rng& rng, SampleLatents& latents,
                        const DgpParams& par = DgpParams{});

// True propensity Phi(0.2 + 0.3 z1 + 0.1 z2).
double true_propensity(double z1, double z2);

struct CdfPdf {
  double cdf, pdf;
};

// Law of the propensity score P. p in (0,1); endpoints are a domain error.
CdfPdf true_fp(double p);

// Law of the shifted propensity P + a(1-P); zero density below a.
CdfPdf true_fpstar(double p, double a);

double true_mte(double x1, double x2, double p);

// Conditional mean of the centered outcome error u = s*u1+(1-s)*u0 given P=p,
// and its derivative in p.
double true_g_u_given_p(double p);
double true_delta_u_given_p(double p);

// Same objects for the estimator's residual scale U(W, beta_true) =
// y - (1-s) mu0(x)'b0 - s mu1(x)'b1, which absorbs the outcome intercepts:
// E[U|P=p] = 0.02 + 0.22 p + true_g_u_given_p(p).
double true_resid_mean_given_p(double p);
double true_resid_delta_given_p(double p);

// Conditional mean of Y given P=p.
double true_g_y_given_p(double p);

// Raw density ratio f_{P*}(p) / f_P(p) for the proportional shift.
double true_density_ratio(double p, double a);

// True PRTE of the proportional shift by adaptive quadrature (tol 1e-6
// guaranteed; internally tighter).
double true_prte(double a);

// True PRTE when the policy shifts the selection index by mean_shift
// (translation z* = z + c gives mean_shift = 0.3 c1 + 0.1 c2).
double true_prte_zshift(double mean_shift);

// Population moments of the score, used as oracles:
// theta1 = E[xi1], theta2 = E[(mu0,mu1)'(P*-P)], theta3 via quadrature.
Eigen::VectorXd true_theta1();
Eigen::VectorXd true_theta2(double a);
double true_theta3(double a);
Eigen::VectorXd true_beta();  // (b0', b1')' = (0.5, 0.1, 0.8, 0.4)

// True projection of the xi1 derivative on the instruments, evaluated at
// p = true_propensity(z1,z2); 20-dimensional for this design.
Eigen::VectorXd true_zeta(double z1, double z2);

}  // namespace prte::dgp
