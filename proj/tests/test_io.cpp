#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prte/dgp.hpp"
#include "prte/io.hpp"

using namespace prte;

namespace {

std::string temp_path(const char* tag) {
  return std::string("/tmp/prte_io_test_") + tag + ".csv";
}

}  // namespace

TEST_CASE("ingest a well-formed three-row file") {
  std::istringstream in(
      "y,s,x1,x2,z1,z2\n"
      "1.5,1,0.1,0.2,0.3,0.4\n"
      "2.5,0,0.5,0.6,0.7,0.8\n"
      "3.5,1,0.9,1.0,1.1,1.2\n");
  const Dataset d = io::ingest_csv(in, "test");
  CHECK(d.n() == 3);
  CHECK(d.y[1] == 2.5);
  CHECK(d.s[2] == 1.0);
  CHECK(d.x(0, 1) == 0.2);
  CHECK(d.z(2, 0) == 1.1);
}

TEST_CASE("ingest rejects malformed input with line numbers") {
  SUBCASE("non-binary s") {
    std::istringstream in("y,s,x1,z1\n1.0,2,0.1,0.2\n2.0,1,0.3,0.4\n");
    CHECK_THROWS_WITH_AS(io::ingest_csv(in, "t"),
                         doctest::Contains("line 2"), IngestError);
  }
  SUBCASE("missing column") {
    std::istringstream in("y,x1,z1\n1.0,0.1,0.2\n");
    CHECK_THROWS_WITH_AS(io::ingest_csv(in, "t"),
                         doctest::Contains("missing column 's'"), IngestError);
  }
  SUBCASE("non-numeric field") {
    std::istringstream in("y,s,x1,z1\n1.0,1,abc,0.2\n2.0,0,0.3,0.4\n");
    CHECK_THROWS_WITH_AS(io::ingest_csv(in, "t"),
                         doctest::Contains("line 2"), IngestError);
  }
  SUBCASE("ragged row") {
    std::istringstream in("y,s,x1,z1\n1.0,1,0.1,0.2\n2.0,0,0.3\n");
    CHECK_THROWS_WITH_AS(io::ingest_csv(in, "t"),
                         doctest::Contains("line 3"), IngestError);
  }
  SUBCASE("unknown column") {
    std::istringstream in("y,s,w1,z1\n1.0,1,0.1,0.2\n");
    CHECK_THROWS_AS(io::ingest_csv(in, "t"), IngestError);
  }
}

TEST_CASE("dataset round-trips through CSV with bit-exact estimates") {
  Rng rng(808);
  const Dataset d = dgp::generate_sample(80, rng);
  const std::string path = temp_path("roundtrip");
  io::emit_dataset_csv(d, path);
  const Dataset back = io::ingest_csv(path);
  REQUIRE(back.n() == d.n());
  CHECK((back.y - d.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.x - d.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.z - d.z).cwiseAbs().maxCoeff() == 0.0);

  EstimationConfig cfg;
  cfg.seed = 3;
  const EstimateResult a = estimate(d, cfg);
  const EstimateResult b = estimate(back, cfg);
  CHECK(a.prte_hat == b.prte_hat);
  CHECK(a.se == b.se);
  std::remove(path.c_str());
}

TEST_CASE("json emission round-trips and matches in-memory values") {
  Rng rng(909);
  const Dataset d = dgp::generate_sample(60, rng);
  EstimationConfig cfg;
  cfg.seed = 5;
  const EstimateResult res = estimate(d, cfg);
  std::ostringstream out;
  io::emit_json(res, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["prte_hat"].get<double>() == res.prte_hat);
  CHECK(j["se"].get<double>() == res.se);
  CHECK(j["ci_lo"].get<double>() == res.ci_lo);
  CHECK(j["theta1"].size() == 20);
  CHECK(j["theta2"].size() == 4);
  CHECK(j["theta3"].get<double>() == res.theta.theta3);
  // reserialization preserves the value
  const auto j2 = nlohmann::json::parse(j.dump());
  CHECK(j2 == j);
}

TEST_CASE("mc report emits the summary csv") {
  MCReport rep;
  rep.n = 500;
  rep.L = 5;
  rep.replications = 3;
  rep.true_prte = 0.055;
  rep.mean = 0.056;
  rep.bias = 0.001;
  rep.rmse = 0.062;
  rep.coverage = 0.944;
  std::ostringstream out;
  io::emit_csv(rep, out);
  const std::string text = out.str();
  CHECK(text.rfind("n,L,true,mean,bias,rmse,coverage\n", 0) == 0);
  CHECK(text.find("500,5,") != std::string::npos);
}
