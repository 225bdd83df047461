#include "prte/score.hpp"

#include <cmath>
#include <stdexcept>

namespace prte {

namespace {

// dimension 2p of the B block from dim(theta1) = 2p(2p+1)
Eigen::Index block_dim(Eigen::Index d1) {
  const double r = (-1.0 + std::sqrt(1.0 + 4.0 * static_cast<double>(d1))) / 2.0;
  const Eigen::Index q = static_cast<Eigen::Index>(std::llround(r));
  if (q < 2 || q * (q + 1) != d1) {
    throw std::invalid_argument("theta1 length is not 2p(2p+1)");
  }
  return q;
}

Eigen::VectorXd stack_features(const Observation& w) {
  Eigen::VectorXd mu2(w.mu0x.size() + w.mu1x.size());
  mu2 << w.mu0x, w.mu1x;
  return mu2;
}

}  // namespace

Eigen::VectorXd d_transform(const Eigen::VectorXd& theta1, double cond_limit) {
  const Eigen::Index q = block_dim(theta1.size());
  Eigen::MatrixXd B(q, q);
  for (Eigen::Index j = 0; j < q; ++j) B.col(j) = theta1.segment(j * q, q);
  const Eigen::VectorXd A = theta1.tail(q);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / cond_limit)) {
    throw IdentificationError("d_transform: B is numerically singular");
  }
  return lu.solve(A);
}

double lambda_map(const ThetaEstimate& theta) {
  const int p = theta.p();
  return theta.theta2.tail(p).dot(theta.beta1) -
         theta.theta2.head(p).dot(theta.beta0) + theta.theta3;
}

double residual_u(const Observation& w, const Eigen::VectorXd& beta0,
                  const Eigen::VectorXd& beta1) {
  return w.y - (1.0 - w.s) * w.mu0x.dot(beta0) - w.s * w.mu1x.dot(beta1);
}

Eigen::VectorXd score_m1(const Observation& w, const Eigen::VectorXd& theta1,
                         const NuisanceFns& nu) {
  const double phat = nu.propensity(w.z);
  return nu.xi1(w.mu0x, w.mu1x, w.y, phat) - theta1 +
         nu.zeta(w.z) * (w.s - phat);
}

Eigen::VectorXd score_m2(const Observation& w, const Eigen::VectorXd& theta2,
                         const NuisanceFns& nu, const Policy& policy) {
  const double phat = nu.propensity(w.z);
  const Eigen::VectorXd z = w.z.transpose();
  const double ps = policy_pstar(policy, phat, z);
  const double dps = policy_dpstar(policy, phat, z);
  const Eigen::VectorXd mu2 = stack_features(w);
  return mu2 * (ps - phat) - theta2 + mu2 * ((dps - 1.0) * (w.s - phat));
}

double score_m3(const Observation& w, const ThetaEstimate& theta,
                const NuisanceFns& nu, const Policy& policy) {
  const double phat = nu.propensity(w.z);
  const Eigen::VectorXd z = w.z.transpose();
  const double ps = policy_pstar(policy, phat, z);
  const double dps = policy_dpstar(policy, phat, z);
  const double ratio = nu.density_ratio(w.z);
  const double u = residual_u(w, theta.beta0, theta.beta1);
  return nu.g_u(ps) - u - theta.theta3 + ratio * (u - nu.g_u(phat)) +
         (nu.delta_u(ps) * dps - ratio * nu.delta_u(phat)) * (w.s - phat);
}

Eigen::VectorXd score_m2_zshift(const Observation& w,
                                const Eigen::VectorXd& theta2,
                                const NuisanceFns& nu) {
  const double phat = nu.propensity(w.z);
  const double phat_star = nu.propensity_at_zstar(w.z);
  const double zratio = nu.z_density_ratio(w.z);
  const Eigen::VectorXd kap = nu.kappa(w.z);
  const Eigen::VectorXd mu2 = stack_features(w);
  return mu2 * (phat_star - phat) - theta2 +
         (mu2.array() * (kap.array() * zratio - 1.0)).matrix() *
             (w.s - phat);
}

double score_m3_zshift(const Observation& w, const ThetaEstimate& theta,
                       const NuisanceFns& nu) {
  const double phat = nu.propensity(w.z);
  const double phat_star = nu.propensity_at_zstar(w.z);
  const double zratio = nu.z_density_ratio(w.z);
  const double u = residual_u(w, theta.beta0, theta.beta1);
  return nu.g_u(phat_star) - u - theta.theta3 +
         zratio * (u - nu.g_u(phat));
}

DecomposedRow score_decomposed(const Observation& w, const NuisanceFns& nu,
                               const Policy& policy) {
  DecomposedRow row;
  const double phat = nu.propensity(w.z);
  const Eigen::VectorXd mu2 = stack_features(w);
  row.m11 = nu.xi1(w.mu0x, w.mu1x, w.y, phat) + nu.zeta(w.z) * (w.s - phat);
  double ratio;
  if (is_zshift(policy)) {
    const double phat_star = nu.propensity_at_zstar(w.z);
    ratio = nu.z_density_ratio(w.z);
    const Eigen::VectorXd kap = nu.kappa(w.z);
    row.m21 = mu2 * (phat_star - phat) +
              (mu2.array() * (kap.array() * ratio - 1.0)).matrix() *
                  (w.s - phat);
    row.m31 = nu.g_u(phat_star) - w.y + ratio * (w.y - nu.g_u(phat));
  } else {
    const Eigen::VectorXd z = w.z.transpose();
    const double ps = policy_pstar(policy, phat, z);
    const double dps = policy_dpstar(policy, phat, z);
    ratio = nu.density_ratio(w.z);
    row.m21 = mu2 * (ps - phat) + mu2 * ((dps - 1.0) * (w.s - phat));
    row.m31 = nu.g_u(ps) - w.y + ratio * (w.y - nu.g_u(phat)) +
              (nu.delta_u(ps) * dps - ratio * nu.delta_u(phat)) *
                  (w.s - phat);
  }
  Eigen::VectorXd m32(mu2.size());
  m32.head(w.mu0x.size()) = (1.0 - w.s) * w.mu0x;
  m32.tail(w.mu1x.size()) = w.s * w.mu1x;
  row.m32 = (ratio - 1.0) * m32;
  return row;
}

Eigen::MatrixXd numeric_jacobian_d(const Eigen::VectorXd& theta1,
                                   double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("numeric_jacobian_d: step must be > 0");
  }
  const Eigen::Index q = block_dim(theta1.size());
  Eigen::MatrixXd jac(q, theta1.size());
  Eigen::VectorXd bumped = theta1;
  for (Eigen::Index k = 0; k < theta1.size(); ++k) {
    bumped[k] = theta1[k] + step;
    const Eigen::VectorXd hi = d_transform(bumped);
    bumped[k] = theta1[k] - step;
    const Eigen::VectorXd lo = d_transform(bumped);
    bumped[k] = theta1[k];
    jac.col(k) = (hi - lo) / (2.0 * step);
  }
  return jac;
}

Eigen::RowVectorXd lambda_gradient(const ThetaEstimate& theta,
                                   const Eigen::MatrixXd& jac_d) {
  const int p = theta.p();
  Eigen::VectorXd signed_theta2(2 * p);
  signed_theta2.head(p) = -theta.theta2.head(p);
  signed_theta2.tail(p) = theta.theta2.tail(p);
  Eigen::RowVectorXd grad(theta.dim());
  grad.head(theta.theta1.size()) = signed_theta2.transpose() * jac_d;
  grad.segment(theta.theta1.size(), p) = -theta.beta0.transpose();
  grad.segment(theta.theta1.size() + p, p) = theta.beta1.transpose();
  grad[theta.dim() - 1] = 1.0;
  return grad;
}

Eigen::MatrixXd m_hat_matrix(const Eigen::VectorXd& mean_m32,
                             const Eigen::MatrixXd& jac_d) {
  const Eigen::Index d1 = jac_d.cols();
  const Eigen::Index q = jac_d.rows();
  const Eigen::Index dim = d1 + q + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
  m.block(dim - 1, 0, 1, d1) = mean_m32.transpose() * jac_d;
  return m;
}

SandwichResult sandwich_variance(const Eigen::MatrixXd& score_rows,
                                 const Eigen::MatrixXd& m_hat,
                                 const Eigen::RowVectorXd& lambda_grad) {
  const Eigen::Index n = score_rows.rows();
  if (n < 1) throw std::invalid_argument("sandwich_variance: no score rows");
  Eigen::MatrixXd sigma(score_rows.cols(), score_rows.cols());
  sigma.noalias() = score_rows.transpose() * score_rows /
                    static_cast<double>(n);
  const Eigen::MatrixXd gram = m_hat.transpose() * m_hat;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    throw NumericError("sandwich_variance: M'M factorization failed");
  }
  const Eigen::MatrixXd inner = m_hat.transpose() * sigma * m_hat;
  Eigen::MatrixXd half = ldlt.solve(inner);
  SandwichResult out;
  out.var_theta = ldlt.solve(half.transpose()).transpose();
  const double v = lambda_grad * out.var_theta * lambda_grad.transpose();
  if (!std::isfinite(v)) {
    throw NumericError("sandwich_variance: non-finite PRTE variance");
  }
  const double scale = std::max(1.0, out.var_theta.cwiseAbs().maxCoeff());
  if (v < -1e-12 * scale) {
    throw NumericError("sandwich_variance: negative PRTE variance");
  }
  out.var_prte = std::max(v, 0.0);
  return out;
}

}  // namespace prte
