#pragma once

#include <Eigen/Dense>

#include "prte/types.hpp"

namespace prte {

// Epanechnikov kernel 0.75(1-u^2) on |u|<=1; integrates to one.
inline double epanechnikov(double u) {
  const double a = std::abs(u);
  return a <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

// K_h(u) = K(u/h)/h; throws std::invalid_argument for h <= 0.
double scaled_kernel(double u, double h);

// Product-kernel weights over the rows of zs at the query point, one common
// bandwidth per coordinate. out is resized to zs.rows().
void product_weights(const Eigen::MatrixXd& zs, const Eigen::RowVectorXd& q,
                     double h, Eigen::VectorXd& out);

// Nadaraya-Watson regression with scalar targets on a single axis.
// An all-zero weight sum falls back to the unweighted target mean and bumps
// counters->empty_neighborhood.
double nw_scalar(const Eigen::VectorXd& xs, const Eigen::VectorXd& targets,
                 double q, double h, SmoothCounters* counters = nullptr);

// Product-kernel Nadaraya-Watson with scalar targets on multivariate points.
double nw_multi(const Eigen::MatrixXd& zs, const Eigen::VectorXd& targets,
                const Eigen::RowVectorXd& q, double h,
                SmoothCounters* counters = nullptr);

// Vector-valued Nadaraya-Watson: one weight vector per query applied to every
// target column (targets is n x m).
Eigen::VectorXd nw_vector(const Eigen::MatrixXd& zs,
                          const Eigen::MatrixXd& targets,
                          const Eigen::RowVectorXd& q, double h,
                          SmoothCounters* counters = nullptr);

// Kernel density estimate sum_j K_h(x_j - q) / normalizer. The normalizer is
// a parameter because the estimator divides two KDEs sharing it; the default
// choice elsewhere is the training-sample size.
double kde(const Eigen::VectorXd& xs, double q, double h, double normalizer);

// Central difference (f(p+delta) - f(p-delta)) / (2 delta); exact for
// quadratics. Works for scalar- and vector-valued f.
template <class F>
auto central_difference(F&& f, double p, double delta) {
  auto hi = f(p + delta);
  auto lo = f(p - delta);
  using R = decltype(hi);
  return R((hi - lo) / (2.0 * delta));
}

}  // namespace prte
