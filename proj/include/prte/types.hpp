#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace prte {

// Numerical failure during estimation (non-finite variance, quadrature
// breakdown, ...). Identification failures are a subtype so callers can
// tell a singular design from a generic numeric problem.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IdentificationError : NumericError {
  using NumericError::NumericError;
};
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smoothing bandwidths and the density-ratio shrinkage exponent.
// h1 acts on the instrument axes, h2 on the propensity axis, delta is the
// difference-quotient step, alpha the exponent of the shrinkage x^alpha.
struct Bandwidths {
  double h1 = 2.5;
  double h2 = 0.25;
  double delta = 0.01;
  double alpha = 0.25;

  void validate() const {
    if (!(h1 > 0.0) || !(h2 > 0.0) || !(delta > 0.0)) {
      throw std::invalid_argument("Bandwidths: h1, h2, delta must be > 0");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw std::invalid_argument("Bandwidths: alpha must lie in [0,1]");
    }
  }
};

// Mutable counters shared by the smoothing primitives; estimation keeps one
// instance per run and copies the totals into the result diagnostics.
struct SmoothCounters {
  std::atomic<long> empty_neighborhood{0};
  std::atomic<long> ratio_fallback{0};
  std::atomic<long> propensity_clamp{0};
  std::atomic<long> kappa_fallback{0};
};

using FeatureMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline FeatureMap identity_feature_map() {
  return [](const Eigen::VectorXd& x) { return x; };
}

// Observed sample (Y, S, X, Z) together with the known feature maps
// mu0, mu1 applied to X.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXd s;   // entries must be exactly 0 or 1
  Eigen::MatrixXd x;   // n x d_x
  Eigen::MatrixXd z;   // n x d_z
  FeatureMap mu0 = identity_feature_map();
  FeatureMap mu1 = identity_feature_map();

  Eigen::Index n() const { return y.size(); }

  void validate() const {
    const Eigen::Index m = y.size();
    if (m < 2) throw std::invalid_argument("Dataset: need n >= 2");
    if (s.size() != m || x.rows() != m || z.rows() != m) {
      throw std::invalid_argument("Dataset: column lengths disagree");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (s[i] != 0.0 && s[i] != 1.0) {
        throw std::invalid_argument("Dataset: s entries must be 0 or 1");
      }
    }
  }

  // Feature matrices mu0(x_i), mu1(x_i), one row per observation.
  Eigen::MatrixXd mu0_matrix() const { return apply_map(mu0); }
  Eigen::MatrixXd mu1_matrix() const { return apply_map(mu1); }

 private:
  Eigen::MatrixXd apply_map(const FeatureMap& f) const {
    const Eigen::Index m = x.rows();
    Eigen::VectorXd first = f(x.row(0).transpose());
    Eigen::MatrixXd out(m, first.size());
    out.row(0) = first.transpose();
    for (Eigen::Index i = 1; i < m; ++i) {
      out.row(i) = f(x.row(i).transpose()).transpose();
    }
    return out;
  }
};

// Counterfactual policy. Either a deterministic shift of the propensity
// (proportional or general) or a shift of the instrument distribution.
struct ProportionalShift {
  double a = 0.5;  // p -> p + a(1-p)
};
struct GeneralPShift {
  std::function<double(double, const Eigen::VectorXd&)> pstar;
  std::function<double(double, const Eigen::VectorXd&)> dpstar;
};
struct ZShift {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> zstar;
};
using Policy = std::variant<ProportionalShift, GeneralPShift, ZShift>;

inline bool is_zshift(const Policy& p) {
  return std::holds_alternative<ZShift>(p);
}

inline double policy_pstar(const Policy& pol, double p,
                           const Eigen::VectorXd& z) {
  if (const auto* ps = std::get_if<ProportionalShift>(&pol)) {
    return p + ps->a * (1.0 - p);
  }
  if (const auto* gp = std::get_if<GeneralPShift>(&pol)) {
    return gp->pstar(p, z);
  }
  throw std::invalid_argument("policy_pstar: not a propensity-shift policy");
}

inline double policy_dpstar(const Policy& pol, double p,
                            const Eigen::VectorXd& z) {
  if (const auto* ps = std::get_if<ProportionalShift>(&pol)) {
    (void)p;
    return 1.0 - ps->a;
  }
  if (const auto* gp = std::get_if<GeneralPShift>(&pol)) {
    return gp->dpstar(p, z);
  }
  throw std::invalid_argument("policy_dpstar: not a propensity-shift policy");
}

inline void validate_policy(const Policy& pol) {
  if (const auto* ps = std::get_if<ProportionalShift>(&pol)) {
    if (!(ps->a >= 0.0 && ps->a < 1.0)) {
      throw std::invalid_argument(
          "ProportionalShift: intensity a must lie in [0,1)");
    }
  }
  if (const auto* gp = std::get_if<GeneralPShift>(&pol)) {
    if (!gp->pstar || !gp->dpstar) {
      throw std::invalid_argument("GeneralPShift: pstar and dpstar required");
    }
  }
  if (const auto* zs = std::get_if<ZShift>(&pol)) {
    if (!zs->zstar) throw std::invalid_argument("ZShift: zstar required");
  }
}

// Checks that a GeneralPShift's dpstar is the p-derivative of its pstar by
// central differences on a p-grid; no-op for the other policy kinds.
inline void validate_policy_derivative(const Policy& pol,
                                       const Eigen::VectorXd& z,
                                       double tol = 1e-4) {
  if (!std::holds_alternative<GeneralPShift>(pol)) return;
  const double step = 1e-5;
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double fd =
        (policy_pstar(pol, p + step, z) - policy_pstar(pol, p - step, z)) /
        (2.0 * step);
    if (std::abs(fd - policy_dpstar(pol, p, z)) > tol) {
      throw std::invalid_argument(
          "GeneralPShift: dpstar does not differentiate pstar");
    }
  }
}

// Partition of {0..n-1} into L folds of near-equal size.
struct FoldPlan {
  std::vector<int> assignment;  // fold label per observation, in [0, L)
  int L = 0;

  std::vector<std::vector<int>> folds() const {
    std::vector<std::vector<int>> out(static_cast<size_t>(L));
    for (size_t i = 0; i < assignment.size(); ++i) {
      out[static_cast<size_t>(assignment[i])].push_back(static_cast<int>(i));
    }
    return out;
  }
  std::vector<int> complement(int fold) const {
    std::vector<int> out;
    out.reserve(assignment.size());
    for (size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != fold) out.push_back(static_cast<int>(i));
    }
    return out;
  }
};

}  // namespace prte
