#include "prte/estimator.hpp"

#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace prte {

FoldPlan make_folds(int n, int L, Rng& rng) {
  if (L < 2) throw std::invalid_argument("make_folds: L must be >= 2");
  if (n < 2 * L) {
    throw std::invalid_argument("make_folds: need n >= 2L observations");
  }
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.bounded(static_cast<uint64_t>(i + 1)));
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  FoldPlan plan;
  plan.L = L;
  plan.assignment.assign(static_cast<size_t>(n), 0);
  const int base = n / L, rem = n % L;
  int pos = 0;
  for (int f = 0; f < L; ++f) {
    const int size = base + (f < rem ? 1 : 0);
    for (int k = 0; k < size; ++k) {
      plan.assignment[static_cast<size_t>(perm[static_cast<size_t>(pos++)])] =
          f;
    }
  }
  return plan;
}

CrossFitEngine::CrossFitEngine(const Dataset& data,
                               const EstimationConfig& config)
    : data_(data), config_(config) {
  config_.validate();
  data_.validate();
  mu0_ = data_.mu0_matrix();
  mu1_ = data_.mu1_matrix();
  if (mu0_.cols() != mu1_.cols()) {
    throw std::invalid_argument("feature maps must share one dimension p");
  }
  validate_policy_derivative(config_.policy, data_.z.row(0).transpose());
}

Observation CrossFitEngine::observation(int i) const {
  Observation w;
  w.y = data_.y[i];
  w.s = data_.s[i];
  w.mu0x = mu0_.row(i).transpose();
  w.mu1x = mu1_.row(i).transpose();
  w.z = data_.z.row(i);
  return w;
}

Eigen::VectorXd CrossFitEngine::fold_weighted_mean(
    const Eigen::MatrixXd& rows) const {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(rows.cols());
  const auto folds = plan_.folds();
  for (const auto& fold : folds) {
    Eigen::VectorXd fold_acc = Eigen::VectorXd::Zero(rows.cols());
    for (int i : fold) fold_acc += rows.row(i).transpose();
    acc += fold_acc / static_cast<double>(fold.size());
  }
  return acc / static_cast<double>(plan_.L);
}

EstimateResult CrossFitEngine::estimate() {
  const int n = static_cast<int>(data_.n());
  const int p = static_cast<int>(mu0_.cols());
  const int d1 = 2 * p * (2 * p + 1);
  Rng rng(config_.seed);
  plan_ = make_folds(n, config_.L, rng);
  const auto folds = plan_.folds();
  const bool zshift = is_zshift(config_.policy);

  phat_.resize(n);
  m11_.resize(n, d1);
  m21_.resize(n, 2 * p);
  m31_.resize(n);
  m32_.resize(n, 2 * p);
  Eigen::VectorXd phat_star(n), zratio(n);
  Eigen::MatrixXd kappa_rows;
  if (zshift) kappa_rows.resize(n, 2 * p);

  // pass 1: propensity, conditional means, xi1, zeta per fold complement;
  // evaluate the theta1/theta2 components on the held-out folds
  nuisances_.clear();
  nuisances_.reserve(static_cast<size_t>(config_.L));
  for (int f = 0; f < config_.L; ++f) {
    const auto comp = plan_.complement(f);
    const Eigen::Index m = static_cast<Eigen::Index>(comp.size());
    Eigen::MatrixXd zc(m, data_.z.cols()), m0c(m, p), m1c(m, p);
    Eigen::VectorXd sc(m), yc(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const int j = comp[static_cast<size_t>(k)];
      zc.row(k) = data_.z.row(j);
      m0c.row(k) = mu0_.row(j);
      m1c.row(k) = mu1_.row(j);
      sc[k] = data_.s[j];
      yc[k] = data_.y[j];
    }
    auto nu = std::make_unique<FoldNuisance>(
        std::move(zc), std::move(sc), std::move(yc), std::move(m0c),
        std::move(m1c), config_.bw, config_.eps_p, f, &counters_);
    nu->fit_pass1();
    if (zshift) nu->fit_zshift(std::get<ZShift>(config_.policy).zstar);

    for (int i : folds[static_cast<size_t>(f)]) {
      assert(plan_.assignment[static_cast<size_t>(i)] ==
             nu->held_out_fold());
      const Observation w = observation(i);
      const double ph = nu->propensity(w.z);
      phat_[i] = ph;
      m11_.row(i) = (nu->xi1(w.mu0x, w.mu1x, w.y, ph) +
                     nu->zeta(w.z) * (w.s - ph))
                        .transpose();
      Eigen::VectorXd mu2(2 * p);
      mu2 << w.mu0x, w.mu1x;
      if (zshift) {
        const double pz = nu->propensity_at_zstar(w.z);
        const double rz = nu->z_density_ratio(w.z);
        const Eigen::VectorXd kap = nu->kappa(w.z);
        phat_star[i] = pz;
        zratio[i] = rz;
        kappa_rows.row(i) = kap.transpose();
        m21_.row(i) =
            (mu2 * (pz - ph) +
             (mu2.array() * (kap.array() * rz - 1.0)).matrix() * (w.s - ph))
                .transpose();
      } else {
        const Eigen::VectorXd zi = w.z.transpose();
        const double ps = policy_pstar(config_.policy, ph, zi);
        const double dps = policy_dpstar(config_.policy, ph, zi);
        m21_.row(i) =
            (mu2 * (ps - ph) + mu2 * ((dps - 1.0) * (w.s - ph))).transpose();
      }
    }
    nuisances_.push_back(std::move(nu));
  }

  ThetaEstimate theta;
  theta.theta1 = fold_weighted_mean(m11_);
  theta.theta2 = fold_weighted_mean(m21_);
  const Eigen::VectorXd beta = d_transform(theta.theta1);
  theta.beta0 = beta.head(p);
  theta.beta1 = beta.tail(p);

  // pass 2: residual-based objects per fold complement, then theta3
  Eigen::VectorXd resid(n);
  for (int i = 0; i < n; ++i) {
    resid[i] = data_.y[i] -
               (1.0 - data_.s[i]) * mu0_.row(i).dot(theta.beta0) -
               data_.s[i] * mu1_.row(i).dot(theta.beta1);
  }
  for (int f = 0; f < config_.L; ++f) {
    auto& nu = *nuisances_[static_cast<size_t>(f)];
    const auto comp = plan_.complement(f);
    Eigen::VectorXd rc(static_cast<Eigen::Index>(comp.size()));
    for (size_t k = 0; k < comp.size(); ++k) rc[static_cast<Eigen::Index>(k)] = resid[comp[k]];
    nu.fit_pass2(std::move(rc), config_.policy);

    for (int i : folds[static_cast<size_t>(f)]) {
      const Observation w = observation(i);
      const double ph = phat_[i];
      Eigen::VectorXd m32_base(2 * p);
      m32_base.head(p) = (1.0 - w.s) * w.mu0x;
      m32_base.tail(p) = w.s * w.mu1x;
      if (zshift) {
        const double rz = zratio[i];
        m31_[i] = nu.g_u(phat_star[i]) - w.y + rz * (w.y - nu.g_u(ph));
        m32_.row(i) = ((rz - 1.0) * m32_base).transpose();
      } else {
        const Eigen::VectorXd zi = w.z.transpose();
        const double ps = policy_pstar(config_.policy, ph, zi);
        const double dps = policy_dpstar(config_.policy, ph, zi);
        const double ratio = nu.density_ratio_at_p(ph);
        m31_[i] = nu.g_u(ps) - w.y + ratio * (w.y - nu.g_u(ph)) +
                  (nu.delta_u(ps) * dps - ratio * nu.delta_u(ph)) *
                      (w.s - ph);
        m32_.row(i) = ((ratio - 1.0) * m32_base).transpose();
      }
    }
  }
  gm_m11_ = theta.theta1;
  gm_m21_ = theta.theta2;
  gm_m31_ = fold_weighted_mean(m31_)[0];
  gm_m32_ = fold_weighted_mean(m32_);
  theta.theta3 = gm_m31_ - gm_m32_.dot(beta);
  fitted_ = true;

  // closed-form solve must satisfy the estimating equation
  const double residual_norm =
      mean_score(theta).cwiseAbs().maxCoeff();
  if (!(residual_norm <= 1e-10)) {
    throw NumericError("estimate: estimating equation residual " +
                       std::to_string(residual_norm));
  }

  EstimateResult out;
  out.theta = theta;
  out.prte_hat = lambda_map(theta);

  // sandwich variance at theta-hat
  const Eigen::MatrixXd jac = numeric_jacobian_d(theta.theta1, config_.bw.delta);
  const Eigen::RowVectorXd lam = lambda_gradient(theta, jac);
  const Eigen::MatrixXd mhat =
      m_hat_matrix(m32_.colwise().mean().transpose(), jac);
  Eigen::MatrixXd rows(n, theta.dim());
  rows.leftCols(d1) = m11_.rowwise() - theta.theta1.transpose();
  rows.middleCols(d1, 2 * p) = m21_.rowwise() - theta.theta2.transpose();
  rows.rightCols(1) =
      (m31_.array() - theta.theta3 - (m32_ * beta).array()).matrix();
  const SandwichResult sw = sandwich_variance(rows, mhat, lam);
  out.se = std::sqrt(sw.var_prte / static_cast<double>(n));
  if (!std::isfinite(out.se)) {
    throw NumericError("estimate: non-finite standard error");
  }
  out.ci_lo = out.prte_hat - config_.z_quantile * out.se;
  out.ci_hi = out.prte_hat + config_.z_quantile * out.se;
  out.diagnostics.empty_neighborhood = counters_.empty_neighborhood.load();
  out.diagnostics.ratio_fallback = counters_.ratio_fallback.load();
  out.diagnostics.propensity_clamp = counters_.propensity_clamp.load();
  out.diagnostics.kappa_fallback = counters_.kappa_fallback.load();
  out.diagnostics.eq_residual = residual_norm;
  return out;
}

Eigen::VectorXd CrossFitEngine::mean_score(const ThetaEstimate& theta) const {
  if (!fitted_) throw std::logic_error("mean_score: engine not fitted");
  Eigen::VectorXd out(theta.dim());
  const Eigen::VectorXd beta = d_transform(theta.theta1);
  out.head(gm_m11_.size()) = gm_m11_ - theta.theta1;
  out.segment(gm_m11_.size(), gm_m21_.size()) = gm_m21_ - theta.theta2;
  out[out.size() - 1] = gm_m31_ - theta.theta3 - gm_m32_.dot(beta);
  return out;
}

EstimateResult estimate(const Dataset& data, const EstimationConfig& config) {
  CrossFitEngine engine(data, config);
  return engine.estimate();
}

Eigen::VectorXd estimating_equation_residual(const Dataset& data,
                                             const EstimationConfig& config,
                                             const ThetaEstimate& theta) {
  CrossFitEngine engine(data, config);
  engine.estimate();
  return engine.mean_score(theta);
}

}  // namespace prte
