#include <liberty/cli.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "liberty");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = liberty::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Cli, CumulantsTable) {
  Result r = run({"cumulants", "--n", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("22 : -2(2+e^{-2t})\n"), std::string::npos) << r.out;
  EXPECT_EQ(lines(r.out).size(), 5u);
  Result j = run({"cumulants", "--n", "3", "--json"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["coefficients"].size(), 3u);
}

TEST(Cli, Obstruction) {
  Result r = run({"obstruction"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "24*e^{-3t}*(1-e^{-t})^2\n");
  Result d = run({"obstruction", "--details"});
  EXPECT_NE(d.out.find("c52 : -10(1+2e^{-2t})"), std::string::npos) << d.out;
  Result j = run({"obstruction", "--json"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["text"], "24*e^{-3t}*(1-e^{-t})^2");
}

TEST(Cli, DensityFullSupportAtFour) {
  Result r = run({"density", "--t", "4", "--grid", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], "theta,rho");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double rho = std::stod(rows[i].substr(rows[i].find(',') + 1));
    EXPECT_GT(rho, 0.0) << rows[i];
  }
  Result j = run({"density", "--t", "1", "--grid", "4", "--json"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["samples"].size(), 4u);
  EXPECT_EQ(run({"density", "--t", "inf", "--grid", "2"}).code, 0);
}

TEST(Cli, ConvolveDensitiesAndMoments) {
  Result add = run({"convolve", "--kind", "add", "--t", "0.5", "--grid", "10"});
  ASSERT_EQ(add.code, 0) << add.err;
  EXPECT_EQ(lines(add.out).front(), "x,eta");
  EXPECT_EQ(lines(add.out).size(), 11u);
  Result mult = run({"convolve", "--kind", "mult", "--t", "0.5", "--grid", "6", "--json"});
  ASSERT_EQ(mult.code, 0) << mult.err;
  EXPECT_EQ(nlohmann::json::parse(mult.out)["samples"].size(), 6u);
  Result m = run({"convolve", "--kind", "add", "--t", "0", "--mu", "0,1,0,1", "--nu", "0,1,0,1"});
  ASSERT_EQ(m.code, 0) << m.err;
  auto rows = lines(m.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[2].substr(0, 4), "2,2,");
  EXPECT_EQ(rows[4].substr(0, 4), "4,8,");
}

TEST(Cli, Moments) {
  Result r = run({"moments", "--word", "a1 b1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1 : tau(a1) tau(b1)\n");
  Result v = run({"moments", "--word", "a1 b1 a2 b2", "--t", "inf"});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(lines(v.out).front(), "monomial,coefficient");
  Result j = run({"moments", "--word", "a1 b1", "--json"});
  EXPECT_TRUE(nlohmann::json::parse(j.out).contains("moment"));
}

TEST(Cli, Simulate) {
  Result r = run({"simulate", "--n", "8", "--t", "0.2", "--samples", "4", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).front(), "statistic,mean,stderr");
  EXPECT_EQ(r.out, run({"simulate", "--n", "8", "--t", "0.2", "--samples", "4", "--seed", "3"}).out);
  Result s = run({"simulate", "--n", "4", "--t", "0", "--samples", "2", "--spectra"});
  EXPECT_EQ(lines(s.out).size(), 9u);
}

TEST(Cli, FlagErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"cumulants", "--n", "7"}).code, 2);
  EXPECT_EQ(run({"density"}).code, 2);
  EXPECT_EQ(run({"density", "--t", "-1"}).code, 2);
  EXPECT_EQ(run({"density", "--t", "abc"}).code, 2);
  EXPECT_EQ(run({"moments", "--word", "c1"}).code, 2);
  EXPECT_EQ(run({"convolve", "--t", "1", "--mu", "0,1"}).code, 2);
  EXPECT_EQ(run({"convolve", "--t", "1", "--mu", "0,1", "--nu", "0,1", "--k-max", "9"}).code, 2);
  EXPECT_EQ(run({"simulate", "--t", "inf"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  Result help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("density"), std::string::npos);
}

#ifdef LIBERTY_CLI_PATH
TEST(Cli, BinaryExitCodes) {
  auto status = [](const std::string& args) {
    std::string cmd = std::string(LIBERTY_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int s = std::system(cmd.c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status("obstruction"), 0);
  EXPECT_EQ(status("cumulants --n 9"), 2);
}
#endif
