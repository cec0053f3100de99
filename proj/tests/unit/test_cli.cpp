#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gibbstree/cli.hpp"

using namespace gibbstree;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gibbstree");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("classify") {
  auto r = run_cli({"classify", "--q", "3", "--k", "2", "--alpha", "0", "--thetaP", "4"});
  REQUIRE(r.code == cli::kOk);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["case1"]["count"] == 3);
  CHECK(doc["case1"]["case"] == "case1");

  r = run_cli({"classify", "--q", "3", "--k", "2", "--a", "5", "--equal-couplings"});
  REQUIRE(r.code == cli::kOk);
  doc = nlohmann::json::parse(r.out);
  CHECK(doc["case2"]["count"] == 8);
  CHECK(doc["case2"]["validated_count"] == 3);
  CHECK(doc["weights"]["a"].get<double>() == doctest::Approx(5.0));

  const auto inline_params = R"({"q":3,"k":2,"alpha":0,"beta":1,"J_I":0,"J_P":1.6094379124341003})";
  r = run_cli({"classify", "--params", inline_params});
  REQUIRE(r.code == cli::kOk);
  CHECK(nlohmann::json::parse(r.out)["case1"]["count"] == 3);
}

TEST_CASE("csv output") {
  auto r = run_cli({"classify", "--q", "3", "--k", "2", "--a", "5", "--equal-couplings", "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.rfind("case,count,exact_count,validated_count,regime,boundary_uncertain\n", 0) == 0);
  CHECK(r.out.find("\ncase2,8,8,3,") != std::string::npos);

  r = run_cli({"thresholds", "--target", "quartic", "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.rfind("at,below,at_count,above\n", 0) == 0);
  CHECK(r.out.find("\n2.01") != std::string::npos);
  CHECK(r.out.find(",2,,4\n") != std::string::npos);

  r = run_cli({"thresholds", "--target", "case2", "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[1][2] == 3);
  CHECK(rows[5][3] == 8);

  CHECK(run_cli({"verify", "--q", "3", "--k", "2", "--alpha", "0", "--thetaP", "5", "--format", "csv"}).code ==
        cli::kInvalidInput);
  CHECK(run_cli({"sweep", "--q", "3", "--k", "2", "--alpha", "0", "--lo", "1", "--hi", "2", "--format", "json"})
            .code == cli::kInvalidInput);
}

TEST_CASE("invalid input exits 2") {
  CHECK(run_cli({"classify", "--q", "2", "--k", "2", "--alpha", "0", "--thetaP", "4"}).code == cli::kInvalidInput);
  CHECK(run_cli({"classify", "--q", "3", "--thetaP", "4", "--JP", "1"}).code == cli::kInvalidInput);
  CHECK(run_cli({"classify", "--bogus"}).code == cli::kInvalidInput);
  CHECK(run_cli({}).code == cli::kInvalidInput);
  CHECK(run_cli({"sweep", "--q", "3", "--k", "2", "--alpha", "0", "--lo", "2", "--hi", "2"}).code ==
        cli::kInvalidInput);
  CHECK(run_cli({"sweep", "--q", "3", "--k", "2", "--alpha", "0", "--lo", "3", "--hi", "2"}).code ==
        cli::kInvalidInput);
  CHECK(run_cli({"classify", "--params", "{\"q\": 3"}).code == cli::kInvalidInput);
}

TEST_CASE("sweep") {
  SUBCASE("Case 2 over a") {
    auto r = run_cli({"sweep", "--q", "3", "--k", "2", "--param", "a", "--lo", "1.1", "--hi", "6", "--steps", "100"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.rfind("param,count,validated_count\n", 0) == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 100);
    CHECK(rows.front()[1] == 2);
    CHECK(rows.back()[1] == 8);
    for (const auto& row : rows) {
      const int c = static_cast<int>(row[1]);
      CHECK((c == 2 || c == 3 || c == 4 || c == 5 || c == 6 || c == 8));
      if (row[0] > 2.2 && row[0] < 3.8) {
        CHECK(c == 4);
      }
    }
    // Agreement with classify at a shared grid point.
    const auto& mid = rows[40];
    auto one = run_cli({"classify", "--q", "3", "--k", "2", "--a", std::to_string(mid[0]), "--equal-couplings"});
    CHECK(nlohmann::json::parse(one.out)["case2"]["count"].get<int>() == static_cast<int>(mid[1]));
  }

  SUBCASE("Case 1 over thetaP") {
    auto r = run_cli({"sweep", "--q", "3", "--k", "2", "--alpha", "0", "--lo", "1", "--hi", "6", "--steps", "51"});
    REQUIRE(r.code == cli::kOk);
    for (const auto& row : parse_csv(r.out)) {
      CHECK(static_cast<int>(row[1]) == (row[0] < 3.8284271247461901 ? 1 : 3));
    }
  }

  SUBCASE("thread count does not change the output") {
    cli::RunConfig config;
    config.params.q = 3;
    config.params.k = 2;
    config.params.alpha = 0.3;
    config.lo = 1.0;
    config.hi = 12.0;
    config.steps = 37;
    config.threads = 1;
    const auto serial = cli::cmd_sweep(config);
    config.threads = 4;
    CHECK(cli::cmd_sweep(config) == serial);
  }
}

TEST_CASE("thresholds") {
  auto r = run_cli({"thresholds", "--target", "quartic", "--lo", "1.1", "--hi", "10", "--tol", "1e-3"});
  REQUIRE(r.code == cli::kOk);
  auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["thresholds"].size() == 2);
  CHECK(std::abs(doc["thresholds"][0]["at"].get<double>() - 2.010) < 0.01);
  CHECK(std::abs(doc["thresholds"][1]["at"].get<double>() - 4.921) < 0.01);

  r = run_cli({"thresholds", "--target", "case2"});
  REQUIRE(r.code == cli::kOk);
  CHECK(nlohmann::json::parse(r.out)["thresholds"].size() == 6);

  r = run_cli({"thresholds", "--target", "case1", "--q", "3", "--k", "2", "--alpha", "0.5", "--lo", "1", "--hi",
               "30"});
  REQUIRE(r.code == cli::kOk);
  doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["thresholds"].size() == 1);
  CHECK(std::abs(doc["thresholds"][0]["at"].get<double>() - 14.657) < 1e-3);
}

TEST_CASE("verify") {
  auto r = run_cli({"verify", "--q", "3", "--k", "2", "--alpha", "0", "--thetaP", "5", "--depth", "2"});
  CHECK(r.code == cli::kOk);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"].size() == 3);
  CHECK(doc["max_deviation"].get<double>() <= 1e-10);

  r = run_cli({"verify", "--q", "3", "--k", "2", "--alpha", "0", "--thetaP", "5", "--perturb", "1.01"});
  CHECK(r.code == cli::kVerifyFailed);
  CHECK(nlohmann::json::parse(r.out)["max_deviation"].get<double>() > 1e-4);

  r = run_cli({"verify", "--q", "3", "--k", "3", "--alpha", "0", "--thetaP", "5", "--depth", "4", "--mode",
               "naive"});
  CHECK(r.code == cli::kResourceGuard);
}

TEST_CASE("sample-poly") {
  auto max_of = [](const std::string& csv) {
    double m = -1e300;
    for (const auto& row : parse_csv(csv)) {
      m = std::max(m, row[1]);
    }
    return m;
  };
  auto changes = [](const std::string& csv) {
    int c = 0;
    double prev = 0.0;
    for (const auto& row : parse_csv(csv)) {
      if (prev != 0.0 && row[1] != 0.0 && (prev < 0) != (row[1] < 0)) {
        ++c;
      }
      if (row[1] != 0.0) {
        prev = row[1];
      }
    }
    return c;
  };
  auto r = run_cli({"sample-poly", "--a", "1.5", "--lo", "0", "--hi", "3", "--steps", "30001"});
  REQUIRE(r.code == cli::kOk);
  CHECK(max_of(r.out) < 0.0);
  CHECK(max_of(r.out) == doctest::Approx(-66.0988929580834).epsilon(1e-6));

  r = run_cli({"sample-poly", "--a", "1.5", "--lo", "0", "--hi", "3", "--steps", "30001", "--form", "as_printed"});
  CHECK(max_of(r.out) == doctest::Approx(-61.0363929580834).epsilon(1e-6));

  r = run_cli({"sample-poly", "--a", "3", "--lo", "0", "--hi", "20", "--steps", "20001"});
  CHECK(changes(r.out) == 2);
  r = run_cli({"sample-poly", "--a", "5", "--lo", "0", "--hi", "75", "--steps", "750001"});
  CHECK(changes(r.out) == 4);
}

TEST_CASE("the installed binary maps exit codes") {
  const std::string bin = GIBBSTREE_CLI_PATH;
  CHECK(std::system((bin + " classify --q 3 --k 2 --alpha 0 --thetaP 4 > /dev/null").c_str()) == 0);
  const int bad = std::system((bin + " classify --q 2 --k 2 --alpha 0 --thetaP 4 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == cli::kInvalidInput);
}
