#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "prte/estimator.hpp"
#include "prte/types.hpp"

namespace prte {

enum class PolicyKind { PShift, ZShiftTranslation };

struct MCConfig {
  int n = 500;
  int L = 5;
  int replications = 1000;
  double a = 0.5;                 // proportional shift intensity
  PolicyKind policy = PolicyKind::PShift;
  Eigen::Vector2d zshift_delta = Eigen::Vector2d::Zero();  // translation
  std::uint64_t seed = 20240501;
  Bandwidths bw{};
  int threads = 0;                // 0 = hardware concurrency
  double z_quantile = 1.959964;
  double true_prte_override = std::numeric_limits<double>::quiet_NaN();
  double max_failure_rate = 0.05;

  void validate() const {
    if (replications < 1) {
      throw std::invalid_argument("MCConfig: replications must be >= 1");
    }
    if (n < 2 * L) throw std::invalid_argument("MCConfig: need n >= 2L");
    if (policy == PolicyKind::PShift && !(a >= 0.0 && a < 1.0)) {
      throw std::invalid_argument("MCConfig: shift intensity a not in [0,1)");
    }
    bw.validate();
  }
};

struct MCReport {
  int n = 0, L = 0, replications = 0;
  double true_prte = 0.0;
  double mean = 0.0, bias = 0.0, rmse = 0.0, coverage = 0.0;
  long failures = 0;
  double wall_seconds = 0.0;
  std::vector<double> estimates, ses;  // per successful replication, ordered
};

// Runs the replication study: per replication r, a derived seed generates the
// sample and the fold split; estimates and coverage indicators are aggregated
// in replication order so the report does not depend on the thread count.
// Throws NumericError if more than max_failure_rate of replications fail.
MCReport run_replications(const MCConfig& config);

}  // namespace prte
