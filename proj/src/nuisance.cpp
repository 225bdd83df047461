#include "prte/nuisance.hpp"

#include <cmath>
#include <stdexcept>

namespace prte {

Eigen::VectorXd xi1_eval(const Eigen::VectorXd& mu0x,
                         const Eigen::VectorXd& mu1x, double y, double p,
                         const CondMeans& means) {
  const Eigen::Index q = mu0x.size();
  Eigen::VectorXd v(2 * q);
  v.head(q) = (1.0 - p) * (mu0x - means.mu0);
  v.tail(q) = p * (mu1x - means.mu1);
  const double r = y - means.y;
  const Eigen::Index twoq = 2 * q;
  Eigen::VectorXd out(twoq * (twoq + 1));
  for (Eigen::Index j = 0; j < twoq; ++j) {
    out.segment(j * twoq, twoq) = v * v[j];
  }
  out.tail(twoq) = v * r;
  return out;
}

Eigen::MatrixXd xi2_targets(
    const std::function<Eigen::VectorXd(int, double)>& xi1_of,
    const Eigen::VectorXd& centers, double delta) {
  const Eigen::Index m = centers.size();
  Eigen::MatrixXd out;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd hi = xi1_of(static_cast<int>(j), centers[j] + delta);
    const Eigen::VectorXd lo = xi1_of(static_cast<int>(j), centers[j] - delta);
    if (out.size() == 0) out.resize(m, hi.size());
    out.row(j) = ((hi - lo) / (2.0 * delta)).transpose();
  }
  return out;
}

Eigen::VectorXd loo_propensity(const Eigen::MatrixXd& z_train,
                               const Eigen::VectorXd& s_train, double h,
                               double eps_p, SmoothCounters* counters) {
  const Eigen::Index m = z_train.rows();
  if (m < 2) throw std::invalid_argument("loo_propensity: need >= 2 rows");
  Eigen::VectorXd out(m);
  Eigen::VectorXd w;
  const double s_sum = s_train.sum();
  for (Eigen::Index i = 0; i < m; ++i) {
    product_weights(z_train, z_train.row(i), h, w);
    w[i] = 0.0;  // exclusion must be exact, not a cancelling subtraction
    const double den = w.sum();
    double p;
    if (den > 0.0) {
      p = w.dot(s_train) / den;
    } else {
      if (counters) counters->empty_neighborhood.fetch_add(1);
      p = (s_sum - s_train[i]) / static_cast<double>(m - 1);
    }
    const double clamped = std::min(std::max(p, eps_p), 1.0 - eps_p);
    if (clamped != p && counters) counters->propensity_clamp.fetch_add(1);
    out[i] = clamped;
  }
  return out;
}

FoldNuisance::FoldNuisance(Eigen::MatrixXd z_train, Eigen::VectorXd s_train,
                           Eigen::VectorXd y_train, Eigen::MatrixXd mu0_train,
                           Eigen::MatrixXd mu1_train, Bandwidths bw,
                           double eps_p, int held_out_fold,
                           SmoothCounters* counters)
    : z_train_(std::move(z_train)),
      s_train_(std::move(s_train)),
      y_train_(std::move(y_train)),
      mu0_train_(std::move(mu0_train)),
      mu1_train_(std::move(mu1_train)),
      bw_(bw),
      eps_p_(eps_p),
      held_out_fold_(held_out_fold),
      counters_(counters) {
  if (z_train_.rows() < 2) {
    throw std::invalid_argument("FoldNuisance: training fold too small");
  }
}

double FoldNuisance::clamp_propensity(double p) const {
  const double c = std::min(std::max(p, eps_p_), 1.0 - eps_p_);
  if (c != p && counters_) counters_->propensity_clamp.fetch_add(1);
  return c;
}

void FoldNuisance::fit_pass1() {
  loo_phat_ = loo_propensity(z_train_, s_train_, bw_.h1, eps_p_, counters_);
  xi2_train_ = xi2_targets(
      [this](int j, double p) {
        return xi1(mu0_train_.row(j).transpose(), mu1_train_.row(j).transpose(),
                   y_train_[j], p);
      },
      loo_phat_, bw_.delta);
  pass1_done_ = true;
}

double FoldNuisance::propensity(const Eigen::RowVectorXd& z) const {
  return clamp_propensity(nw_multi(z_train_, s_train_, z, bw_.h1, counters_));
}

CondMeans FoldNuisance::cond_means(double p) const {
  const Eigen::Index m = loo_phat_.size();
  const Eigen::Index q = mu0_train_.cols();
  const double inv_h = 1.0 / bw_.h2;
  Eigen::VectorXd acc0 = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd acc1 = Eigen::VectorXd::Zero(q);
  double accy = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double w = epanechnikov((loo_phat_[j] - p) * inv_h);
    if (w == 0.0) continue;
    den += w;
    acc0 += w * mu0_train_.row(j).transpose();
    acc1 += w * mu1_train_.row(j).transpose();
    accy += w * y_train_[j];
  }
  if (den <= 0.0) {
    if (counters_) counters_->empty_neighborhood.fetch_add(1);
    return {mu0_train_.colwise().mean().transpose(),
            mu1_train_.colwise().mean().transpose(), y_train_.mean()};
  }
  return {acc0 / den, acc1 / den, accy / den};
}

Eigen::VectorXd FoldNuisance::xi1(const Eigen::VectorXd& mu0x,
                                  const Eigen::VectorXd& mu1x, double y,
                                  double p) const {
  return xi1_eval(mu0x, mu1x, y, p, cond_means(p));
}

Eigen::VectorXd FoldNuisance::zeta(const Eigen::RowVectorXd& z) const {
  return nw_vector(z_train_, xi2_train_, z, bw_.h1, counters_);
}

void FoldNuisance::fit_zshift(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& zstar) {
  const Eigen::Index m = z_train_.rows();
  zstar_train_.resize(m, z_train_.cols());
  for (Eigen::Index j = 0; j < m; ++j) {
    zstar_train_.row(j) = zstar(z_train_.row(j).transpose()).transpose();
  }
  zstar_fn_ = zstar;
  zshift_done_ = true;
}

void FoldNuisance::fit_pass2(Eigen::VectorXd resid_train,
                             const Policy& policy) {
  if (resid_train.size() != z_train_.rows()) {
    throw std::invalid_argument("fit_pass2: residual length mismatch");
  }
  resid_ = std::move(resid_train);
  if (!is_zshift(policy)) {
    const Eigen::Index m = loo_phat_.size();
    pstar_train_.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      pstar_train_[j] =
          policy_pstar(policy, loo_phat_[j], z_train_.row(j).transpose());
    }
  }
  pass2_done_ = true;
}

double FoldNuisance::density_ratio_at_p(double p) const {
  const double m = static_cast<double>(loo_phat_.size());
  const double den = kde(loo_phat_, p, bw_.h2, m);
  if (den <= 0.0) {
    if (counters_) counters_->ratio_fallback.fetch_add(1);
    return 1.0;
  }
  const double num = kde(pstar_train_, p, bw_.h2, m);
  return std::pow(num / den, bw_.alpha);
}

double FoldNuisance::density_ratio(const Eigen::RowVectorXd& z) const {
  return density_ratio_at_p(propensity(z));
}

double FoldNuisance::g_u(double p) const {
  return nw_scalar(loo_phat_, resid_, p, bw_.h2, counters_);
}

double FoldNuisance::delta_u(double p) const {
  return central_difference([this](double q) { return g_u(q); }, p, bw_.delta);
}

double FoldNuisance::propensity_at_zstar(const Eigen::RowVectorXd& z) const {
  if (!zshift_done_) {
    throw std::logic_error("propensity_at_zstar requires a fitted z-shift");
  }
  return propensity(zstar_fn_(z.transpose()).transpose());
}

double FoldNuisance::z_density_ratio(const Eigen::RowVectorXd& z) const {
  const double m = static_cast<double>(z_train_.rows());
  Eigen::VectorXd w;
  product_weights(z_train_, z, bw_.h1, w);
  const double den = w.sum() / m;
  if (den <= 0.0) {
    if (counters_) counters_->ratio_fallback.fetch_add(1);
    return 1.0;
  }
  product_weights(zstar_train_, z, bw_.h1, w);
  const double num = w.sum() / m;
  return std::pow(num / den, bw_.alpha);
}

Eigen::VectorXd FoldNuisance::kappa(const Eigen::RowVectorXd& z) const {
  const Eigen::Index q = mu0_train_.cols();
  Eigen::MatrixXd stacked(z_train_.rows(), 2 * q);
  stacked << mu0_train_, mu1_train_;
  const Eigen::VectorXd den = nw_vector(z_train_, stacked, z, bw_.h1, counters_);
  const Eigen::VectorXd num =
      nw_vector(zstar_train_, stacked, z, bw_.h1, counters_);
  Eigen::VectorXd out(2 * q);
  for (Eigen::Index k = 0; k < 2 * q; ++k) {
    if (std::abs(den[k]) < 1e-10) {
      if (counters_) counters_->kappa_fallback.fetch_add(1);
      out[k] = 1.0;
    } else {
      out[k] = num[k] / den[k];
    }
  }
  return out;
}

NuisanceFns FoldNuisance::fns() const {
  NuisanceFns f;
  f.propensity = [this](const Eigen::RowVectorXd& z) { return propensity(z); };
  f.xi1 = [this](const Eigen::VectorXd& m0, const Eigen::VectorXd& m1,
                 double y, double p) { return xi1(m0, m1, y, p); };
  f.zeta = [this](const Eigen::RowVectorXd& z) { return zeta(z); };
  f.density_ratio = [this](const Eigen::RowVectorXd& z) {
    return density_ratio(z);
  };
  f.g_u = [this](double p) { return g_u(p); };
  f.delta_u = [this](double p) { return delta_u(p); };
  if (zshift_done_) {
    f.propensity_at_zstar = [this](const Eigen::RowVectorXd& z) {
      return propensity_at_zstar(z);
    };
    f.z_density_ratio = [this](const Eigen::RowVectorXd& z) {
      return z_density_ratio(z);
    };
    f.kappa = [this](const Eigen::RowVectorXd& z) { return kappa(z); };
  }
  return f;
}

}  // namespace prte
