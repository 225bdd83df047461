#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prte/normal.hpp"

using namespace prte;

TEST_CASE("normal cdf basics") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(norm_cdf(-8.0) == doctest::Approx(6.22096e-16).epsilon(1e-4));
}

TEST_CASE("quantile inverts cdf to high accuracy") {
  for (double p = 0.0005; p < 1.0; p += 0.0101) {
    const double x = norm_quantile(p);
    CHECK(std::fabs(norm_cdf(x) - p) < 1e-13);
  }
  // deep tails
  for (double p : {1e-10, 1e-7, 1.0 - 1e-7}) {
    CHECK(std::fabs(norm_cdf(norm_quantile(p)) - p) < 1e-12 * std::max(p, 1e-3));
  }
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-9));
  CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(norm_quantile(1.0), std::domain_error);
}

TEST_CASE("pdf integrates to one") {
  const double v = adaptive_simpson([](double x) { return norm_pdf(x); },
                                    -10.0, 10.0, 1e-12);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("adaptive simpson handles polynomials exactly") {
  const double v = adaptive_simpson([](double x) { return 3.0 * x * x; },
                                    0.0, 2.0, 1e-12);
  CHECK(v == doctest::Approx(8.0).epsilon(1e-12));
}
