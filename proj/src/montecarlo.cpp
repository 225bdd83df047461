#include "prte/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "prte/dgp.hpp"

namespace prte {

namespace {

struct RepOutcome {
  bool ok = false;
  double est = 0.0, se = 0.0;
};

Policy make_policy(const MCConfig& cfg) {
  if (cfg.policy == PolicyKind::PShift) return ProportionalShift{cfg.a};
  const Eigen::Vector2d delta = cfg.zshift_delta;
  return ZShift{[delta](const Eigen::VectorXd& z) {
    return Eigen::VectorXd(z + delta);
  }};
}

double true_value(const MCConfig& cfg) {
  if (std::isfinite(cfg.true_prte_override)) return cfg.true_prte_override;
  if (cfg.policy == PolicyKind::PShift) return dgp::true_prte(cfg.a);
  return dgp::true_prte_zshift(0.3 * cfg.zshift_delta[0] +
                               0.1 * cfg.zshift_delta[1]);
}

}  // namespace

MCReport run_replications(const MCConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Policy policy = make_policy(config);
  const double truth = true_value(config);

  std::vector<RepOutcome> outcomes(static_cast<size_t>(config.replications));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= config.replications) break;
      RepOutcome& out = outcomes[static_cast<size_t>(r)];
      try {
        Rng data_rng(derive_seed(config.seed, 2 * static_cast<uint64_t>(r)));
        const Dataset data = dgp::generate_sample(config.n, data_rng);
        EstimationConfig ec;
        ec.L = config.L;
        ec.bw = config.bw;
        ec.policy = policy;
        ec.seed = derive_seed(config.seed, 2 * static_cast<uint64_t>(r) + 1);
        ec.z_quantile = config.z_quantile;
        const EstimateResult res = estimate(data, ec);
        out.ok = true;
        out.est = res.prte_hat;
        out.se = res.se;
      } catch (const NumericError&) {
        out.ok = false;
      }
    }
  };

  int nthreads = config.threads > 0
                     ? config.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  if (nthreads < 1) nthreads = 1;
  nthreads = std::min(nthreads, config.replications);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  MCReport rep;
  rep.n = config.n;
  rep.L = config.L;
  rep.replications = config.replications;
  rep.true_prte = truth;
  double sum = 0.0, sumsq_err = 0.0;
  long covered = 0;
  for (const RepOutcome& o : outcomes) {  // ordered fold over rep index
    if (!o.ok) {
      ++rep.failures;
      continue;
    }
    rep.estimates.push_back(o.est);
    rep.ses.push_back(o.se);
    sum += o.est;
    sumsq_err += (o.est - truth) * (o.est - truth);
    if (std::fabs(o.est - truth) <= config.z_quantile * o.se) ++covered;
  }
  const long ok_count = static_cast<long>(rep.estimates.size());
  if (rep.failures >
      static_cast<long>(config.max_failure_rate * config.replications)) {
    throw NumericError("run_replications: " + std::to_string(rep.failures) +
                       " of " + std::to_string(config.replications) +
                       " replications failed");
  }
  if (ok_count > 0) {
    rep.mean = sum / static_cast<double>(ok_count);
    rep.bias = rep.mean - truth;
    rep.rmse = std::sqrt(sumsq_err / static_cast<double>(ok_count));
    rep.coverage = static_cast<double>(covered) / static_cast<double>(ok_count);
  }
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return rep;
}

}  // namespace prte
