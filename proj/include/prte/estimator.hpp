#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "prte/nuisance.hpp"
#include "prte/rng.hpp"
#include "prte/score.hpp"
#include "prte/types.hpp"

namespace prte {

struct EstimationConfig {
  int L = 5;
  Bandwidths bw{};
  Policy policy = ProportionalShift{0.5};
  std::uint64_t seed = 0;
  double z_quantile = 1.959964;  // 95% two-sided
  double eps_p = 0.001;          // propensity clamp

  void validate() const {
    if (L < 2) throw std::invalid_argument("EstimationConfig: L must be >= 2");
    if (!(z_quantile > 0.0)) {
      throw std::invalid_argument("EstimationConfig: z_quantile must be > 0");
    }
    bw.validate();
    validate_policy(policy);
  }
};

struct Diagnostics {
  long empty_neighborhood = 0;
  long ratio_fallback = 0;
  long propensity_clamp = 0;
  long kappa_fallback = 0;
  double eq_residual = 0.0;  // sup-norm of the estimating equation at theta
};

struct EstimateResult {
  double prte_hat = 0.0;
  double se = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  ThetaEstimate theta;
  Diagnostics diagnostics;
};

// Random near-equal partition; fold sizes differ by at most one.
FoldPlan make_folds(int n, int L, Rng& rng);

// Cross-fitting engine: fits the per-fold nuisances in two passes, solves the
// estimating equation in closed form (every score row is affine in theta),
// and evaluates the sandwich variance. Kept as a class so the fitted state
// can be re-queried at arbitrary theta.
class CrossFitEngine {
 public:
  CrossFitEngine(const Dataset& data, const EstimationConfig& config);

  EstimateResult estimate();

  // Cross-fit mean score (1/L) sum_l |I_l|^{-1} sum_{i in I_l} m(W_i; theta)
  // at the fitted nuisances; requires estimate() to have run.
  Eigen::VectorXd mean_score(const ThetaEstimate& theta) const;

  const FoldPlan& folds() const { return plan_; }
  const std::vector<std::unique_ptr<FoldNuisance>>& fold_nuisances() const {
    return nuisances_;
  }
  // fold-weighted grand mean of the m32 component at the fitted nuisances
  const Eigen::VectorXd& grand_mean_m32() const { return gm_m32_; }

 private:
  const Dataset& data_;
  EstimationConfig config_;
  Eigen::MatrixXd mu0_, mu1_;
  FoldPlan plan_;
  std::vector<std::unique_ptr<FoldNuisance>> nuisances_;
  SmoothCounters counters_;

  // per-observation caches, filled fold by fold
  Eigen::VectorXd phat_;
  Eigen::MatrixXd m11_, m21_, m32_;
  Eigen::VectorXd m31_;
  // fold-weighted grand means
  Eigen::VectorXd gm_m11_, gm_m21_, gm_m32_;
  double gm_m31_ = 0.0;
  bool fitted_ = false;

  Observation observation(int i) const;
  Eigen::VectorXd fold_weighted_mean(const Eigen::MatrixXd& rows) const;
};

EstimateResult estimate(const Dataset& data, const EstimationConfig& config);

// Diagnostic evaluation of the cross-fit estimating equation at a given
// theta (fits the nuisances afresh from data and config).
Eigen::VectorXd estimating_equation_residual(const Dataset& data,
                                             const EstimationConfig& config,
                                             const ThetaEstimate& theta);

}  // namespace prte
