#pragma once

#include <Eigen/Dense>
#include <functional>

#include "prte/kernel.hpp"
#include "prte/types.hpp"

namespace prte {

// Conditional means of (mu0(X), mu1(X), Y) given the propensity, evaluated
// at one point.
struct CondMeans {
  Eigen::VectorXd mu0, mu1;
  double y = 0.0;
};

// Residual outer-product moment xi1 evaluated from precomputed conditional
// means: v = ((1-p)(mu0x - m0); p(mu1x - m1)), r = y - my, laid out
// column-major as (vec(v v'), v r).
Eigen::VectorXd xi1_eval(const Eigen::VectorXd& mu0x,
                         const Eigen::VectorXd& mu1x, double y, double p,
                         const CondMeans& means);

// Difference-quotient targets for the zeta regression: row j is the central
// difference of p -> xi1_of(j, p) at centers[j].
Eigen::MatrixXd xi2_targets(
    const std::function<Eigen::VectorXd(int, double)>& xi1_of,
    const Eigen::VectorXd& centers, double delta);

// Function-object view of a fitted nuisance set; score evaluation is written
// against this so tests can substitute hand-set functions.
struct NuisanceFns {
  std::function<double(const Eigen::RowVectorXd&)> propensity;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                double, double)>
      xi1;  // (mu0x, mu1x, y, p)
  std::function<Eigen::VectorXd(const Eigen::RowVectorXd&)> zeta;
  std::function<double(const Eigen::RowVectorXd&)> density_ratio;  // shrunk
  std::function<double(double)> g_u;
  std::function<double(double)> delta_u;
  // z-shift extras
  std::function<double(const Eigen::RowVectorXd&)> propensity_at_zstar;
  std::function<double(const Eigen::RowVectorXd&)> z_density_ratio;
  std::function<Eigen::VectorXd(const Eigen::RowVectorXd&)> kappa;
};

// Nuisance functions fitted on one fold complement. Pass 1 covers the
// propensity, the conditional means, xi1 and zeta (and the z-shift objects,
// which need no residuals); pass 2 adds the density ratio and the
// residual-regression pair (g_{U|P}, Delta_{U|P}).
class FoldNuisance {
 public:
  FoldNuisance(Eigen::MatrixXd z_train, Eigen::VectorXd s_train,
               Eigen::VectorXd y_train, Eigen::MatrixXd mu0_train,
               Eigen::MatrixXd mu1_train, Bandwidths bw, double eps_p,
               int held_out_fold, SmoothCounters* counters);

  void fit_pass1();
  void fit_zshift(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>&
                      zstar);                       // pass 1, z-shift only
  void fit_pass2(Eigen::VectorXd resid_train,
                 const Policy& policy);             // residual-based objects

  // pass-1 evaluations
  double propensity(const Eigen::RowVectorXd& z) const;  // clamped
  CondMeans cond_means(double p) const;
  Eigen::VectorXd xi1(const Eigen::VectorXd& mu0x, const Eigen::VectorXd& mu1x,
                      double y, double p) const;
  Eigen::VectorXd zeta(const Eigen::RowVectorXd& z) const;

  // pass-2 evaluations
  double density_ratio_at_p(double p) const;  // rho-shrunk KDE ratio
  double density_ratio(const Eigen::RowVectorXd& z) const;
  double g_u(double p) const;
  double delta_u(double p) const;

  // z-shift evaluations
  double propensity_at_zstar(const Eigen::RowVectorXd& z) const;
  double z_density_ratio(const Eigen::RowVectorXd& z) const;
  Eigen::VectorXd kappa(const Eigen::RowVectorXd& z) const;  // diagonal

  NuisanceFns fns() const;

  const Eigen::VectorXd& loo_phat() const { return loo_phat_; }
  const Eigen::VectorXd& resid_train() const { return resid_; }
  int held_out_fold() const { return held_out_fold_; }
  Eigen::Index train_size() const { return z_train_.rows(); }
  int feature_dim() const { return static_cast<int>(mu0_train_.cols()); }

 private:
  Eigen::MatrixXd z_train_;
  Eigen::VectorXd s_train_, y_train_;
  Eigen::MatrixXd mu0_train_, mu1_train_;
  Bandwidths bw_;
  double eps_p_;
  int held_out_fold_;
  SmoothCounters* counters_;

  Eigen::VectorXd loo_phat_;   // leave-one-out fitted propensity per row
  Eigen::MatrixXd xi2_train_;  // zeta regression targets
  bool pass1_done_ = false;

  Eigen::VectorXd resid_;       // U_j at the first-pass beta
  Eigen::VectorXd pstar_train_; // policy image of loo_phat (p-shift)
  bool pass2_done_ = false;

  Eigen::MatrixXd zstar_train_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> zstar_fn_;
  bool zshift_done_ = false;

  double clamp_propensity(double p) const;
};

// Leave-one-out Nadaraya-Watson of s on z over the training rows; the
// returned vector is clamped to [eps_p, 1-eps_p].
Eigen::VectorXd loo_propensity(const Eigen::MatrixXd& z_train,
                               const Eigen::VectorXd& s_train, double h,
                               double eps_p, SmoothCounters* counters);

}  // namespace prte
