#include "tailtest/harness/campaign.hpp"
#include "tailtest/harness/csv.hpp"
#include "tailtest/harness/report.hpp"

#include <doctest.h>

#include <sstream>

using namespace tailtest;
using namespace tailtest::harness;

TEST_CASE("csv with and without header") {
  std::istringstream with("a,b\n1,2\n3.5,-4e-1\n\n");
  const CsvTable t = read_csv(with);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.data.rows() == 2);
  CHECK(t.data(1, 1) == doctest::Approx(-0.4));
  std::istringstream without("1\n2\n3\n");
  const CsvTable u = read_csv(without);
  CHECK(u.header.empty());
  CHECK(u.data.rows() == 3);
  CHECK(u.data.cols() == 1);
}

TEST_CASE("csv quoted fields") {
  std::istringstream in("\"x, first\",\"y \"\"q\"\"\"\n\"1.5\",2\n");
  const CsvTable t = read_csv(in);
  CHECK(t.header[0] == "x, first");
  CHECK(t.header[1] == "y \"q\"");
  CHECK(t.data(0, 0) == 1.5);
}

TEST_CASE("malformed csv reports the line") {
  std::istringstream ragged("1,2\n3,4\n5\n");
  try {
    (void)read_csv(ragged);
    FAIL("expected an error");
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream text("x\n1\nfoo\n");
  try {
    (void)read_csv(text);
    FAIL("expected an error");
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream quote("1,\"2\n");
  CHECK_THROWS_AS((void)read_csv(quote), CsvError);
  std::istringstream empty("a,b\n");
  CHECK_THROWS_AS((void)read_csv(empty), CsvError);
}

TEST_CASE("csv round trip") {
  Sample x(2, 2);
  x << 0.1, -2.0 / 3.0, 1e-300, 7.0;
  std::stringstream buffer;
  write_csv(buffer, x, {"p", "q"});
  const CsvTable t = read_csv(buffer);
  CHECK((t.data - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("campaign config parsing") {
  std::istringstream in(
      "# table cell\n"
      "k = 2\nn = 500\nreps = 10\nnu0 = 5\nalternatives = 3, 4\n"
      "sigma = 5,3,3,2\nmethods = mecov, mot, lr\nalpha = 0.05\nside = greater\nseed = 7\n");
  const SimCampaign c = parse_campaign(in);
  CHECK(c.k == 2);
  CHECK(c.alternatives == std::vector<double>{3.0, 4.0});
  CHECK(c.sigma(0, 1) == 3.0);
  CHECK(c.methods.size() == 3);
  CHECK(c.side == Side::Greater);
  CHECK(c.seed == 7);
}

TEST_CASE("invalid campaign configs") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_campaign(in);
  };
  CHECK_THROWS_AS((void)parse("colour = red\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("k = two\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("reps = 0\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("methods = ols\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("k = 2\nsigma = 1,2,3\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("k = 2\nsigma = 1,2,2,1\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("alternatives = -1\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("nu0 = 2\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("k = 2\nmethods = medmad\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("k = 3\nk = 4\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("just text\n"), ConfigError);
}

TEST_CASE("single replication smoke run has one row per method and alternative") {
  SimCampaign c;
  c.k = 2;
  c.n = 100;
  c.reps = 1;
  c.alternatives = {3.0, 5.0, 9.0};
  c.methods = {"mecov", "mot", "mcd", "lr"};
  const CampaignResult r = run_campaign(c);
  REQUIRE(r.cells.size() == 12);
  for (const auto& cell : r.cells) {
    CHECK(cell.reps + cell.failures == 1);
    CHECK(cell.frequency >= 0.0);
    CHECK(cell.frequency <= 1.0);
  }
  CHECK(r.cells[0].method == "mecov");
  CHECK(r.cells[3].method == "mot");
}

TEST_CASE("campaign output does not depend on the thread count") {
  SimCampaign c;
  c.k = 2;
  c.n = 120;
  c.reps = 40;
  c.alternatives = {4.0, 6.0};
  c.methods = {"mecov", "mcd"};
  c.threads = 1;
  const CampaignResult one = run_campaign(c);
  c.threads = 4;
  const CampaignResult four = run_campaign(c);
  CHECK(to_json(one).dump() == to_json(four).dump());
  std::ostringstream a;
  std::ostringstream b;
  write_campaign_csv(a, one);
  write_campaign_csv(b, four);
  CHECK(a.str() == b.str());
  for (const auto& cell : one.cells) {
    CHECK(cell.se == doctest::Approx(std::sqrt(cell.frequency * (1 - cell.frequency) / cell.reps)));
  }
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("json reports carry the schema version") {
  TestReport r;
  r.statistic = 1.5;
  r.estimator = "mot";
  const auto j = to_json(r);
  CHECK(j["schema"] == 1);
  CHECK(j["estimator"] == "mot");
  CHECK_FALSE(j.contains("predicted_power"));
  ConfidenceInterval ci;
  ci.empty = true;
  CHECK(to_json(ci)["lo"].is_null());
}
