#include "prte/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace prte {

double scaled_kernel(double u, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("scaled_kernel: bandwidth must be > 0");
  }
  return epanechnikov(u / h) / h;
}

void product_weights(const Eigen::MatrixXd& zs, const Eigen::RowVectorXd& q,
                     double h, Eigen::VectorXd& out) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("product_weights: bandwidth must be > 0");
  }
  const Eigen::Index n = zs.rows(), d = zs.cols();
  out.resize(n);
  const double inv_h = 1.0 / h;
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      w *= epanechnikov((zs(i, k) - q[k]) * inv_h) * inv_h;
      if (w == 0.0) break;
    }
    out[i] = w;
  }
}

double nw_scalar(const Eigen::VectorXd& xs, const Eigen::VectorXd& targets,
                 double q, double h, SmoothCounters* counters) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("nw_scalar: bandwidth must be > 0");
  }
  if (xs.size() == 0) throw std::invalid_argument("nw_scalar: empty training");
  const double inv_h = 1.0 / h;
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double w = epanechnikov((xs[i] - q) * inv_h);
    num += w * targets[i];
    den += w;
  }
  if (den <= 0.0) {
    if (counters) counters->empty_neighborhood.fetch_add(1);
    return targets.mean();
  }
  return num / den;
}

double nw_multi(const Eigen::MatrixXd& zs, const Eigen::VectorXd& targets,
                const Eigen::RowVectorXd& q, double h,
                SmoothCounters* counters) {
  if (zs.rows() == 0) throw std::invalid_argument("nw_multi: empty training");
  Eigen::VectorXd w;
  product_weights(zs, q, h, w);
  const double den = w.sum();
  if (den <= 0.0) {
    if (counters) counters->empty_neighborhood.fetch_add(1);
    return targets.mean();
  }
  return w.dot(targets) / den;
}

Eigen::VectorXd nw_vector(const Eigen::MatrixXd& zs,
                          const Eigen::MatrixXd& targets,
                          const Eigen::RowVectorXd& q, double h,
                          SmoothCounters* counters) {
  if (zs.rows() == 0) throw std::invalid_argument("nw_vector: empty training");
  Eigen::VectorXd w;
  product_weights(zs, q, h, w);
  const double den = w.sum();
  if (den <= 0.0) {
    if (counters) counters->empty_neighborhood.fetch_add(1);
    return targets.colwise().mean().transpose();
  }
  return targets.transpose() * w / den;
}

double kde(const Eigen::VectorXd& xs, double q, double h, double normalizer) {
  if (!(h > 0.0)) throw std::invalid_argument("kde: bandwidth must be > 0");
  if (!(normalizer > 0.0)) {
    throw std::invalid_argument("kde: normalizer must be > 0");
  }
  if (xs.size() == 0) throw std::invalid_argument("kde: empty training");
  const double inv_h = 1.0 / h;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    acc += epanechnikov((xs[i] - q) * inv_h);
  }
  return acc * inv_h / normalizer;
}

}  // namespace prte
