#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "prte/kernel.hpp"
#include "prte/normal.hpp"
#include "prte/rng.hpp"

using namespace prte;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

TEST_CASE("epanechnikov values and shape") {
  CHECK(epanechnikov(0.0) == 0.75);
  CHECK(epanechnikov(1.0) == 0.0);
  CHECK(epanechnikov(2.0) == 0.0);
  for (double u = -1.5; u <= 1.5; u += 0.05) {
    CHECK(epanechnikov(u) == epanechnikov(-u));
    CHECK(epanechnikov(u) >= 0.0);
  }
  const double mass = adaptive_simpson(
      [](double u) { return epanechnikov(u); }, -1.0, 1.0, 1e-10);
  CHECK(std::fabs(mass - 1.0) < 1e-8);
}

TEST_CASE("scaled kernel") {
  CHECK(scaled_kernel(0.0, 2.0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(scaled_kernel(2.0, 2.0) == 0.0);
  CHECK(scaled_kernel(0.5, 0.25) == 0.0);
  CHECK_THROWS_AS(scaled_kernel(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scaled_kernel(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("nw regression basics") {
  VectorXd xs(1), ts(1);
  xs << 0.3;
  ts << 4.2;
  CHECK(nw_scalar(xs, ts, 0.35, 0.5) == doctest::Approx(4.2).epsilon(1e-15));

  VectorXd xs5(5), c5 = VectorXd::Constant(5, 7.5);
  xs5 << 0.1, 0.2, 0.3, 0.4, 0.5;
  CHECK(nw_scalar(xs5, c5, 0.3, 1.0) == doctest::Approx(7.5).epsilon(1e-14));
}

TEST_CASE("nw matches a direct double-loop oracle") {
  Rng rng(77);
  MatrixXd zs(5, 2);
  VectorXd ts(5);
  for (int i = 0; i < 5; ++i) {
    zs(i, 0) = rng.normal();
    zs(i, 1) = rng.normal();
    ts[i] = rng.normal();
  }
  RowVectorXd q(2);
  q << 0.2, -0.1;
  const double h = 4.0;  // covers all points
  // brute force with unnormalized weights; also checks invariance to the
  // uniform (1/h)^d factor inside the implementation
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 5; ++i) {
    double w = 1.0;
    for (int k = 0; k < 2; ++k) w *= epanechnikov((zs(i, k) - q[k]) / h);
    num += w * ts[i];
    den += w;
  }
  CHECK(nw_multi(zs, ts, q, h) == doctest::Approx(num / den).epsilon(1e-13));
}

TEST_CASE("nw with binary targets stays in [0,1]") {
  Rng rng(123);
  MatrixXd zs(40, 2);
  VectorXd ts(40);
  for (int i = 0; i < 40; ++i) {
    zs(i, 0) = rng.normal();
    zs(i, 1) = rng.normal();
    ts[i] = rng.uniform01() < 0.4 ? 1.0 : 0.0;
  }
  for (int rep = 0; rep < 50; ++rep) {
    RowVectorXd q(2);
    q << 2.5 * rng.normal(), 2.5 * rng.normal();
    SmoothCounters counters;
    const double v = nw_multi(zs, ts, q, 1.5, &counters);
    if (counters.empty_neighborhood.load() == 0) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("nw empty neighborhood falls back to the target mean") {
  VectorXd xs(3), ts(3);
  xs << 0.0, 0.1, 0.2;
  ts << 1.0, 2.0, 6.0;
  SmoothCounters counters;
  const double v = nw_scalar(xs, ts, 5.0, 0.25, &counters);
  CHECK(v == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(counters.empty_neighborhood.load() == 1);
}

TEST_CASE("vector nw applies one weight vector to all columns") {
  Rng rng(5);
  MatrixXd zs(12, 2), targets(12, 3);
  for (int i = 0; i < 12; ++i) {
    zs(i, 0) = rng.normal();
    zs(i, 1) = rng.normal();
    for (int k = 0; k < 3; ++k) targets(i, k) = rng.normal();
  }
  RowVectorXd q(2);
  q << 0.0, 0.0;
  const VectorXd v = nw_vector(zs, targets, q, 3.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(v[k] == doctest::Approx(nw_multi(zs, targets.col(k), q, 3.0))
                      .epsilon(1e-14));
  }
}

TEST_CASE("kde point mass and support") {
  VectorXd xs(1);
  xs << 0.4;
  CHECK(kde(xs, 0.4, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(kde(xs, 2.0, 1.0, 1.0) == 0.0);
}

TEST_CASE("kde matches a direct sum and scales with the normalizer") {
  Rng rng(99);
  VectorXd xs(10);
  for (int i = 0; i < 10; ++i) xs[i] = rng.uniform01();
  const double h = 0.25, q = 0.5;
  double direct = 0.0;
  for (int i = 0; i < 10; ++i) direct += scaled_kernel(xs[i] - q, h);
  CHECK(kde(xs, q, h, 10.0) == doctest::Approx(direct / 10.0).epsilon(1e-14));
  CHECK(kde(xs, q, h, 7.0) ==
        doctest::Approx(kde(xs, q, h, 1.0) / 7.0).epsilon(1e-14));
}

TEST_CASE("kde ratios are invariant to the shared normalizer") {
  Rng rng(321);
  VectorXd a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = rng.uniform01();
    b[i] = 0.5 + 0.5 * rng.uniform01();
  }
  const double q = 0.55, h = 0.25;
  const double r1 = kde(a, q, h, 30.0) / kde(b, q, h, 30.0);
  const double r2 = kde(a, q, h, 7.0) / kde(b, q, h, 7.0);
  const double r3 = kde(a, q, h, 1000.0) / kde(b, q, h, 1000.0);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-13));
  CHECK(r1 == doctest::Approx(r3).epsilon(1e-13));
}

TEST_CASE("central difference is exact for quadratics") {
  CHECK(central_difference([](double x) { return 3.0 * x + 1.0; }, 0.7, 0.05) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(central_difference([](double x) { return x * x; }, 2.0, 0.1) ==
        doctest::Approx(4.0).epsilon(1e-12));
  // cubic error is exactly delta^2
  const double d = central_difference([](double x) { return x * x * x; }, 1.0,
                                      0.01);
  CHECK(d == doctest::Approx(3.0001).epsilon(1e-12));
}

TEST_CASE("central difference on vector-valued functions") {
  auto f = [](double p) {
    VectorXd v(2);
    v << p * p, -2.0 * p;
    return v;
  };
  const VectorXd d = central_difference(f, 1.5, 0.01);
  CHECK(d[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(-2.0).epsilon(1e-12));
}
