#include <doctest.h>

#include <cmath>

#include "prte/dgp.hpp"
#include "prte/montecarlo.hpp"

using namespace prte;

TEST_CASE("single replication report") {
  MCConfig cfg;
  cfg.n = 120;
  cfg.replications = 1;
  cfg.seed = 99;
  const MCReport rep = run_replications(cfg);
  REQUIRE(rep.estimates.size() == 1);
  CHECK(rep.mean == rep.estimates[0]);
  CHECK(rep.rmse == doctest::Approx(std::fabs(rep.bias)).epsilon(1e-12));
  CHECK(rep.bias == doctest::Approx(rep.mean - rep.true_prte).epsilon(1e-15));
  CHECK(rep.failures == 0);
}

TEST_CASE("report is identical across thread counts") {
  MCConfig cfg;
  cfg.n = 100;
  cfg.replications = 6;
  cfg.seed = 1234;
  cfg.threads = 1;
  const MCReport a = run_replications(cfg);
  cfg.threads = 2;
  const MCReport b = run_replications(cfg);
  REQUIRE(a.estimates.size() == b.estimates.size());
  for (size_t i = 0; i < a.estimates.size(); ++i) {
    CHECK(a.estimates[i] == b.estimates[i]);
    CHECK(a.ses[i] == b.ses[i]);
  }
  CHECK(a.rmse == b.rmse);
  CHECK(a.coverage == b.coverage);
}

TEST_CASE("rmse decomposes into bias and spread") {
  MCConfig cfg;
  cfg.n = 100;
  cfg.replications = 8;
  cfg.seed = 777;
  const MCReport rep = run_replications(cfg);
  double var = 0.0;
  for (double e : rep.estimates) var += (e - rep.mean) * (e - rep.mean);
  var /= static_cast<double>(rep.estimates.size());
  CHECK(rep.rmse * rep.rmse ==
        doctest::Approx(rep.bias * rep.bias + var).epsilon(1e-10));
  CHECK(rep.rmse * rep.rmse >= rep.bias * rep.bias);
}

TEST_CASE("z-shift translation study uses the matching truth") {
  MCConfig cfg;
  cfg.n = 100;
  cfg.replications = 2;
  cfg.policy = PolicyKind::ZShiftTranslation;
  cfg.zshift_delta << 1.0, 0.0;
  cfg.seed = 4242;
  const MCReport rep = run_replications(cfg);
  CHECK(rep.true_prte == doctest::Approx(dgp::true_prte_zshift(0.3)).epsilon(1e-12));
}
