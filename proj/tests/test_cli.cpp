#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nestedeq/io.hpp"

namespace {

const std::string kCli = NESTEDEQ_CLI;
const std::string kData = NESTEDEQ_DATA;

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nestedeq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = kCli + " " + args + " > " + path("stdout") + " 2> " + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string out() const { return slurp(path("stdout")); }
  std::string err() const { return slurp(path("stderr")); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SolveCertifiesMatchingPennies) {
  ASSERT_EQ(run("solve --game " + kData + "/matching_pennies.json --epsilon 0.05"), 0) << err();
  const auto report = nestedeq::io::Json::parse(out());
  EXPECT_EQ(report["certified"], true);
  EXPECT_NEAR(report["profile"]["strategies"]["row"]["all"]["H"].get<double>(), 0.5, 1e-6);
}

TEST_F(Cli, SolveWritesReportFile) {
  ASSERT_EQ(run("solve --game " + kData + "/informed_uninformed.json --epsilon 0.05 --out " + path("r.json")), 0)
      << err();
  EXPECT_TRUE(out().empty());
  const auto report = nestedeq::io::read_json(path("r.json"));
  EXPECT_EQ(report["mode"], "finite");
  EXPECT_EQ(report["transfer"]["holds"], true);
}

TEST_F(Cli, SolveIsByteIdenticalAcrossRuns) {
  const std::string args = "solve --game " + kData + "/coordination_types.json --epsilon 0.05 --seed 7 --out ";
  ASSERT_EQ(run(args + path("a.json")), 0) << err();
  ASSERT_EQ(run(args + path("b.json")), 0) << err();
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, CsvFormat) {
  ASSERT_EQ(run("solve --game " + kData + "/informed_uninformed.json --epsilon 0.05 --format csv"), 0) << err();
  const std::string csv = out();
  EXPECT_EQ(csv.rfind("player,atom,mass,regret,best_action\n", 0), 0u);
  EXPECT_NE(csv.find("uninformed,blind,1.0,"), std::string::npos) << csv;
  EXPECT_EQ(run("solve --game " + kData + "/informed_uninformed.json --epsilon 0.05 --format xml"), 1);
}

TEST_F(Cli, VerifyRoundTripsSolveReport) {
  const std::string game = kData + "/informed_uninformed.json";
  ASSERT_EQ(run("solve --game " + game + " --epsilon 0.05 --out " + path("r.json")), 0) << err();
  ASSERT_EQ(run("verify --game " + game + " --profile " + path("r.json") + " --epsilon 0.05 --out " + path("v.json")),
            0)
      << err();
  const auto solve = nestedeq::io::read_json(path("r.json"));
  const auto verify = nestedeq::io::read_json(path("v.json"));
  EXPECT_EQ(verify["regret"].dump(), solve["regret"].dump());
  EXPECT_EQ(verify["certified"], true);
}

TEST_F(Cli, VerifyReportsDominatedProfile) {
  EXPECT_EQ(run("verify --game " + kData + "/informed_uninformed.json --profile " + kData +
                "/dominated_profile.json --epsilon 0.05"),
            2);
  const auto report = nestedeq::io::Json::parse(out());
  EXPECT_EQ(report["certified"], false);
  EXPECT_NEAR(report["regret"]["max_bayesian"].get<double>(), 0.5, 1e-12);
  EXPECT_NE(err().find("player informed gains 0.5 on atom 'sees-b'"), std::string::npos) << err();
}

TEST_F(Cli, InvalidInputsExitOne) {
  EXPECT_EQ(run("solve --game " + kData + "/not_nested.json --epsilon 0.05"), 1);
  EXPECT_NE(err().find("information not nested"), std::string::npos) << err();
  EXPECT_EQ(run("verify --game " + kData + "/informed_uninformed.json --profile " + kData +
                "/mismatched_profile.json --epsilon 0.05"),
            1);
  EXPECT_EQ(run("solve --game " + kData + "/matching_pennies.json --epsilon -1"), 1);
  EXPECT_EQ(run("solve --game " + kData + "/matching_pennies.json --epsilon 0.1 --delta zero"), 1);
  EXPECT_EQ(run("solve --epsilon 0.1"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("verify --game " + kData + "/quadratic_location.json --profile " + kData +
                "/dominated_profile.json --epsilon 0.1"),
            1);
}

TEST_F(Cli, MissingFilesExitThree) {
  EXPECT_EQ(run("solve --game " + kData + "/absent.json --epsilon 0.05"), 3);
  EXPECT_EQ(run("solve --game " + kData + "/matching_pennies.json --epsilon 0.05 --out /nonexistent/dir/r.json"), 3);
}

TEST_F(Cli, HierarchyCommand) {
  ASSERT_EQ(run("hierarchy --game " + kData + "/informed_uninformed.json --delta 0.5"), 0) << err();
  const auto report = nestedeq::io::Json::parse(out());
  EXPECT_EQ(report["hierarchy"]["pass"], true);
  EXPECT_EQ(report["hierarchy"]["levels"][0]["resolution"], 4);
  EXPECT_EQ(report["hierarchy"]["levels"][1]["coarse_atoms"], 1);
}

TEST_F(Cli, ContinuousSolve) {
  ASSERT_EQ(run("solve --game " + kData + "/quadratic_location.json --epsilon 0.1"), 0) << err();
  const auto report = nestedeq::io::Json::parse(out());
  EXPECT_EQ(report["probe"]["pass"], true);
}

TEST_F(Cli, ExplicitDeltaAndSolverTarget) {
  ASSERT_EQ(run("solve --game " + kData + "/informed_uninformed.json --epsilon 0.05 --delta 0.001 --solver-regret 1e-4"),
            0)
      << err();
  const auto report = nestedeq::io::Json::parse(out());
  EXPECT_EQ(report["config"]["delta"], 0.001);
  EXPECT_EQ(report["config"]["delta_source"], "given");
  EXPECT_EQ(report["config"]["solver_target"], 1e-4);
}
