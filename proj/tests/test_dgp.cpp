#include <doctest.h>

#include <cmath>

#include "prte/dgp.hpp"
#include "prte/kernel.hpp"
#include "prte/normal.hpp"

using namespace prte;
namespace dg = prte::dgp;

TEST_CASE("true propensity") {
  CHECK(dg::true_propensity(0.0, 0.0) ==
        doctest::Approx(norm_cdf(0.2)).epsilon(1e-15));
  CHECK(dg::true_propensity(-2.0 / 3.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dg::true_propensity(1e4, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("propensity score law") {
  CHECK(dg::true_fp(0.5).cdf == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(dg::true_fp(0.3).cdf + dg::true_fp(0.7).cdf ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(dg::true_fp(0.5).pdf ==
        doctest::Approx(std::sqrt(10.0) / 3.0).epsilon(1e-12));
  // pdf is the derivative of the cdf
  const double fd = (dg::true_fp(0.41).cdf - dg::true_fp(0.39).cdf) / 0.02;
  CHECK(dg::true_fp(0.4).pdf == doctest::Approx(fd).epsilon(1e-3));
  CHECK_THROWS_AS(dg::true_fp(0.0), std::domain_error);
  CHECK_THROWS_AS(dg::true_fp(1.0), std::domain_error);
}

TEST_CASE("pdf of P integrates to one") {
  // substitute p = Phi(s) so the open-interval endpoints are never touched
  const double mass = adaptive_simpson(
      [](double s) { return dg::true_fp(norm_cdf(s)).pdf * norm_pdf(s); },
      -8.0, 8.0, 1e-9);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("shifted propensity law") {
  const double a = 0.5;
  CHECK(dg::true_fpstar(0.3, a).cdf == 0.0);
  CHECK(dg::true_fpstar(0.3, a).pdf == 0.0);
  CHECK(dg::true_fpstar((1.0 + a) / 2.0, a).cdf ==
        doctest::Approx(0.5).epsilon(1e-13));
  for (double p : {0.1, 0.4, 0.77}) {
    CHECK(dg::true_fpstar(p, 0.0).cdf ==
          doctest::Approx(dg::true_fp(p).cdf).epsilon(1e-14));
    CHECK(dg::true_fpstar(p, 0.0).pdf ==
          doctest::Approx(dg::true_fp(p).pdf).epsilon(1e-14));
  }
  // mass of the shifted density over [a, 1] via q = a + (1-a) Phi(s)
  const double mass = adaptive_simpson(
      [&](double s) {
        const double q = a + (1.0 - a) * norm_cdf(s);
        return dg::true_fpstar(q, a).pdf * (1.0 - a) * norm_pdf(s);
      },
      -8.0, 8.0, 1e-9);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("marginal treatment effect closed form") {
  CHECK(dg::true_mte(-2.0, 2.0, 0.5) == doctest::Approx(0.220).epsilon(1e-13));
  CHECK(dg::true_mte(1.0, -0.5, 0.5) ==
        doctest::Approx(0.22 + 0.3 * 0.5).epsilon(1e-13));
  CHECK(dg::true_mte(0.0, 0.0, 0.8413447460685429) ==
        doctest::Approx(0.22 - 0.062).epsilon(1e-6));
}

TEST_CASE("error conditional means") {
  CHECK(dg::true_g_u_given_p(0.5) ==
        doctest::Approx(0.062 * norm_pdf(0.0)).epsilon(1e-13));
  CHECK(dg::true_delta_u_given_p(0.5) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(dg::true_delta_u_given_p(0.3) + dg::true_delta_u_given_p(0.7) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // derivative consistency to O(delta^2)
  const double fd = central_difference(
      [](double p) { return dg::true_g_u_given_p(p); }, 0.35, 1e-4);
  CHECK(dg::true_delta_u_given_p(0.35) == doctest::Approx(fd).epsilon(1e-6));
  // MTE identity: mte = mu'(b1-b0) + Delta_resid
  for (double p : {0.2, 0.5, 0.9}) {
    const double lhs = dg::true_mte(1.0, 2.0, p);
    const double rhs = (0.8 - 0.5) * 1.0 + (0.4 - 0.1) * 2.0 +
                       dg::true_resid_delta_given_p(p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("true PRTE by quadrature") {
  CHECK(dg::true_prte(0.0) == 0.0);
  CHECK(std::fabs(dg::true_prte(0.5) - 0.055) < 5e-4);  // 0.055 to 3 d.p.
  CHECK(dg::true_prte(0.5) == doctest::Approx(0.0546816701).epsilon(1e-6));
  CHECK(dg::true_prte(0.25) == doctest::Approx(0.0291639128).epsilon(1e-6));
  // increasing in the policy intensity
  double prev = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double v = dg::true_prte(0.09 * k);
    CHECK(v > prev);
    prev = v;
  }
  // theta3 equals the full PRTE here: the covariate term has mean zero
  CHECK(dg::true_theta3(0.5) ==
        doctest::Approx(dg::true_prte(0.5)).epsilon(1e-9));
}

TEST_CASE("sample moments at n=100000") {
  Rng rng(42);
  const Dataset d = dg::generate_sample(100000, rng);
  CHECK(std::fabs(d.x.col(0).mean() + 2.0) < 0.03);
  CHECK(std::fabs(d.x.col(1).mean() - 2.0) < 0.03);
  CHECK(std::fabs(d.s.mean() - 0.5) < 0.01);
  CHECK(std::fabs(d.z.col(0).mean() + 1.0) < 0.05);
}

TEST_CASE("generated data is deterministic in the seed") {
  Rng r1(7), r2(7);
  const Dataset a = dg::generate_sample(50, r1);
  const Dataset b = dg::generate_sample(50, r2);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero error loadings make the outcome deterministic given (s,x)") {
  dg::DgpParams par;
  par.l01 = par.l03 = par.l11 = par.l12 = 0.0;
  Rng rng(3);
  const Dataset d = dg::generate_sample(200, rng);
  (void)d;
  Rng rng2(3);
  const Dataset dz = dg::generate_sample(200, rng2, par);
  for (int i = 0; i < 200; ++i) {
    const double expect =
        dz.s[i] * (0.240 + 0.800 * dz.x(i, 0) + 0.400 * dz.x(i, 1)) +
        (1.0 - dz.s[i]) * (0.020 + 0.500 * dz.x(i, 0) + 0.100 * dz.x(i, 1));
    CHECK(dz.y[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("propensity law matches the simulated propensity distribution") {
  Rng rng(2718);
  const int n = 1000000;
  std::vector<double> ps(n);
  for (int i = 0; i < n; ++i) {
    const double z1 = -1.0 + 3.0 * rng.normal();
    const double z2 = 1.0 + 3.0 * rng.normal();
    ps[static_cast<size_t>(i)] = dg::true_propensity(z1, z2);
  }
  std::sort(ps.begin(), ps.end());
  double worst = 0.0;
  for (int k = 1; k <= 99; ++k) {
    const double p = 0.01 * k;
    const auto it = std::upper_bound(ps.begin(), ps.end(), p);
    const double emp = static_cast<double>(it - ps.begin()) / n;
    worst = std::max(worst, std::fabs(emp - dg::true_fp(p).cdf));
  }
  CHECK(worst < 0.002);
}

TEST_CASE("conditional error mean cross-checked by simulation") {
  Rng rng(31415);
  const int n = 1000000;
  dg::SampleLatents lat;
  const Dataset d = dg::generate_sample(n, rng, lat);
  for (double p : {0.3, 0.5, 0.7}) {
    double acc = 0.0;
    long cnt = 0;
    for (int i = 0; i < n; ++i) {
      const double pi = dg::true_propensity(d.z(i, 0), d.z(i, 1));
      if (std::fabs(pi - p) < 0.01) {
        acc += lat.u[i];
        ++cnt;
      }
    }
    REQUIRE(cnt > 1000);
    CHECK(std::fabs(acc / cnt - dg::true_g_u_given_p(p)) < 0.003);
  }
}

TEST_CASE("true PRTE quadrature agrees with Monte Carlo integration") {
  // independent oracle: draw P ~ f_P, average Delta_resid(P) (F_P - F_P*)/f_P
  Rng rng(5557);
  const int n = 1000000;
  const double a = 0.25;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = norm_cdf(std::sqrt(0.9) * rng.normal());
    const auto fp = dg::true_fp(p);
    acc += dg::true_resid_delta_given_p(p) *
           (fp.cdf - dg::true_fpstar(p, a).cdf) / fp.pdf;
  }
  CHECK(std::fabs(acc / n - dg::true_prte(a)) < 2e-3);
}
