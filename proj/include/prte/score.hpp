#pragma once

#include <Eigen/Dense>

#include "prte/nuisance.hpp"
#include "prte/types.hpp"

namespace prte {

// Estimated moment vector theta = (theta1', theta2', theta3)' together with
// the partial-linear coefficients implied by theta1.
struct ThetaEstimate {
  Eigen::VectorXd theta1;  // 2p(2p+1)
  Eigen::VectorXd theta2;  // 2p, ordered (theta_{2,0}', theta_{2,1}')'
  double theta3 = 0.0;
  Eigen::VectorXd beta0, beta1;  // p each, beta = d(theta1)

  int p() const { return static_cast<int>(beta0.size()); }
  Eigen::Index dim() const { return theta1.size() + theta2.size() + 1; }
  Eigen::VectorXd beta() const {
    Eigen::VectorXd b(beta0.size() + beta1.size());
    b << beta0, beta1;
    return b;
  }
};

// One observation in feature space.
struct Observation {
  double y = 0.0, s = 0.0;
  Eigen::VectorXd mu0x, mu1x;
  Eigen::RowVectorXd z;
};

// Theta-free decomposition components: m1 = m11 - theta1, m2 = m21 - theta2,
// m3 = m31 - theta3 - m32' d(theta1).
struct DecomposedRow {
  Eigen::VectorXd m11, m21;
  double m31 = 0.0;
  Eigen::VectorXd m32;
};

// Solve B beta = A for theta1 = (vec B, A); throws IdentificationError when
// B is numerically singular (reciprocal condition below 1/cond_limit).
Eigen::VectorXd d_transform(const Eigen::VectorXd& theta1,
                            double cond_limit = 1e12);

// PRTE plug-in theta_{2,1}' beta1 - theta_{2,0}' beta0 + theta3.
double lambda_map(const ThetaEstimate& theta);

double residual_u(const Observation& w, const Eigen::VectorXd& beta0,
                  const Eigen::VectorXd& beta1);

Eigen::VectorXd score_m1(const Observation& w, const Eigen::VectorXd& theta1,
                         const NuisanceFns& nu);
Eigen::VectorXd score_m2(const Observation& w, const Eigen::VectorXd& theta2,
                         const NuisanceFns& nu, const Policy& policy);
double score_m3(const Observation& w, const ThetaEstimate& theta,
                const NuisanceFns& nu, const Policy& policy);
Eigen::VectorXd score_m2_zshift(const Observation& w,
                                const Eigen::VectorXd& theta2,
                                const NuisanceFns& nu);
double score_m3_zshift(const Observation& w, const ThetaEstimate& theta,
                       const NuisanceFns& nu);

DecomposedRow score_decomposed(const Observation& w, const NuisanceFns& nu,
                               const Policy& policy);

// Jacobian of d at theta1 by coordinatewise central differences.
Eigen::MatrixXd numeric_jacobian_d(const Eigen::VectorXd& theta1, double step);

// Derivative of the PRTE plug-in:
// [theta2' blockdiag(-I, I) Jd | (-beta0', beta1') | 1].
Eigen::RowVectorXd lambda_gradient(const ThetaEstimate& theta,
                                   const Eigen::MatrixXd& jac_d);

// Estimate of -dE[m]/dtheta': identity except the lower-left block
// E[m32]' Jd.
Eigen::MatrixXd m_hat_matrix(const Eigen::VectorXd& mean_m32,
                             const Eigen::MatrixXd& jac_d);

struct SandwichResult {
  Eigen::MatrixXd var_theta;  // (M'M)^{-1} M' Sigma M (M'M)^{-1}
  double var_prte = 0.0;      // lambda var_theta lambda'
};

// score_rows holds one m(W_i; theta, gamma) per row.
SandwichResult sandwich_variance(const Eigen::MatrixXd& score_rows,
                                 const Eigen::MatrixXd& m_hat,
                                 const Eigen::RowVectorXd& lambda_grad);

}  // namespace prte
