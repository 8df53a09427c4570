#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "altbd/io.hpp"
#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = altbd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

constexpr const char* kOnes = R"json({"topology": {"kind": "one-sided"},
  "rates": {"lambda": 1, "mu": 1, "delta": 1, "beta": 1, "kappa": 1, "nu": 1}})json";

TEST(Cli, DamStationaryJson) {
  const auto r = run({"stationary", "--preset", "dam", "--param", "lambda=1,theta=3,beta=1,delta=1", "--nmax", "60",
                      "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& row : j.at("probabilities")) {
    if (row.at("n") == 0 && row.at("phase") == "d") {
      EXPECT_NEAR(row.at("probability").get<double>(), 0.25, 1e-12);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, StationaryCsvIsOrdered) {
  const auto r = run({"stationary", "--preset", "telegraph", "--nmax", "3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  // Balanced telegraph is not ergodic: unnormalized weights are written.
  const auto rows = altbd::parse_state_csv(r.out);
  ASSERT_EQ(rows.size(), 14u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_TRUE(rows[i - 1].n < rows[i].n || (rows[i - 1].n == rows[i].n && rows[i - 1].phase < rows[i].phase));
  }
  EXPECT_NE(r.err.find("unnormalized"), std::string::npos);
}

TEST(Cli, ErgodicityExitCodes) {
  EXPECT_EQ(run({"ergodicity", "--preset", "telegraph-stabilized", "--param", "eta=1", "--window", "16,4096"}).code, 0);
  EXPECT_EQ(run({"ergodicity", "--preset", "telegraph"}).code, 3);
  EXPECT_EQ(run({"ergodicity", "--preset", "dam", "--param", "lambda=2"}).code, 3);
}

TEST(Cli, RegularityExitCodes) {
  EXPECT_EQ(run({"regularity", "--preset", "ones"}).code, 0);
  const auto model = write_temp("altbd_explosive.json", R"json({"topology": {"kind": "one-sided"},
    "rates": {"lambda": "2^n", "mu": 1, "delta": 1, "beta": 1, "kappa": 1, "nu": 1}})json");
  EXPECT_EQ(run({"regularity", "--model", model.string()}).code, 3);
  const auto csv = run({"regularity", "--preset", "ones", "--steps", "3", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "n,y_b,y_d,D,E");
}

TEST(Cli, Verify) {
  const auto model = write_temp("altbd_ones.json", kOnes);
  const auto r = run({"verify", "--model", model.string(), "--nmax", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(r.out.rfind("residual ", 0), 0u);
  EXPECT_LT(std::stod(r.out.substr(9)), 1e-8);
}

TEST(Cli, SimulateDeterministicAndCompare) {
  const std::vector<std::string> args = {"simulate", "--preset", "dam", "--seed", "5", "--events", "20000",
                                         "--replications", "3", "--compare-analytic"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_TRUE(j[0].contains("tv"));
}

TEST(Cli, Presets) {
  const auto list = run({"preset-list"});
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.out.find("telegraph-stabilized"), std::string::npos);
  const auto show = run({"preset-show", "dam", "--param", "theta=4"});
  ASSERT_EQ(show.code, 0) << show.err;
  EXPECT_EQ(nlohmann::json::parse(show.out).at("params").at("theta"), "4");
}

TEST(Cli, Errors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"stationary", "--preset", "dam"}).code, 1);
  EXPECT_EQ(run({"stationary", "--preset", "dam", "--model", "x.json", "--nmax", "3"}).code, 1);
  EXPECT_EQ(run({"ergodicity", "--preset", "nope"}).code, 2);
  const auto bad = write_temp("altbd_bad.json", R"json({"topology": {"kind": "one-sided"},
    "rates": {"lambda": "n +", "mu": 1, "delta": 1, "beta": 1, "kappa": 1, "nu": 1}})json");
  const auto r = run({"ergodicity", "--model", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("offset"), std::string::npos);
  EXPECT_EQ(run({"stationary", "--preset", "telegraph-stabilized", "--param", "r=1", "--nmax", "5"}).code, 2);
}

TEST(Cli, OutFile) {
  const auto path = std::filesystem::temp_directory_path() / "altbd_out.csv";
  std::filesystem::remove(path);
  const auto r = run({"stationary", "--preset", "dam", "--nmax", "5", "--format", "csv", "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "n,phase,probability");
}

}  // namespace
