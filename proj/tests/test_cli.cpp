#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "legalie/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("legalie_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the real binary; `env` is prepended to the command line.
  Result run(const std::string& args, const std::string& env = "") const {
    std::string cmd = env + " " + std::string(LEGALIE_CLI_PATH) + " " + args + " > " + path("stdout") + " 2> " +
                      path("stderr");
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(path("stdout")), slurp(path("stderr"))};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("eval --no-such-flag").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  ASSERT_EQ(run("gen-corpus --out " + path("c.jsonl") + " --per-task 5").code, 0);
  auto r = run("calibrate --gold " + path("c.jsonl") + " --pred " + path("c.jsonl") + " --target-recall 1.5");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, DomainErrorsExitOne) {
  std::ofstream(path("bad.jsonl")) << "{not json}\n";
  auto r = run("eval --gold " + path("bad.jsonl") + " --pred " + path("bad.jsonl"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST_F(Cli, EvalIdenticalFilesIsPerfect) {
  ASSERT_EQ(run("gen-corpus --out " + path("c.jsonl") + " --per-task 10").code, 0);
  auto r = run("eval --gold " + path("c.jsonl") + " --pred " + path("c.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out).at("avg").get<double>(), 1.0);
  auto t = run("eval --format table --gold " + path("c.jsonl") + " --pred " + path("c.jsonl"));
  EXPECT_NE(t.out.find("100.0"), std::string::npos);
}

TEST_F(Cli, RuleExtractThenEvalIsPerfect) {
  ASSERT_EQ(run("gen-corpus --out " + path("c.jsonl") + " --per-task 25").code, 0);
  ASSERT_EQ(run("extract --engine rule --corpus " + path("c.jsonl") + " --out " + path("p.jsonl")).code, 0);
  auto r = run("eval --gold " + path("c.jsonl") + " --pred " + path("p.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out).at("avg").get<double>(), 1.0);
}

TEST_F(Cli, SeedEnvironmentOverride) {
  ASSERT_EQ(run("gen-corpus --out " + path("a.jsonl") + " --per-task 3").code, 0);
  ASSERT_EQ(run("gen-corpus --out " + path("b.jsonl") + " --per-task 3 --seed 7").code, 0);
  ASSERT_EQ(run("gen-corpus --out " + path("c.jsonl") + " --per-task 3", "LEGALIE_SEED=99").code, 0);
  ASSERT_EQ(run("gen-corpus --out " + path("d.jsonl") + " --per-task 3 --seed 99").code, 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_EQ(slurp(path("c.jsonl")), slurp(path("d.jsonl")));
  EXPECT_NE(slurp(path("a.jsonl")), slurp(path("c.jsonl")));
  EXPECT_EQ(run("gen-corpus --out " + path("e.jsonl"), "LEGALIE_SEED=abc").code, 2);
}

TEST_F(Cli, SplitCalibrateGateAnalyzeReport) {
  ASSERT_EQ(run("gen-corpus --preset analysis --drunk-driving 120 --fraud 120 --out " + path("c.jsonl")).code, 0);
  ASSERT_EQ(run("split --corpus " + path("c.jsonl") + " --out-dir " + path("s") + " --train 20 --test 40").code, 0);
  for (const char* f : {"train.jsonl", "valid.jsonl", "test.jsonl"}) EXPECT_TRUE(fs::exists(dir_ / "s" / f));

  ASSERT_EQ(run("extract --corpus " + path("c.jsonl") + " --out " + path("p.jsonl")).code, 0);
  auto cal = run("calibrate --gold " + path("c.jsonl") + " --pred " + path("p.jsonl") +
                 " --target-recall 0.81 --out " + path("gate.json"));
  ASSERT_EQ(cal.code, 0) << cal.err;
  auto gate = run("gate --pred " + path("p.jsonl") + " --gate " + path("gate.json") + " --out " + path("kept.jsonl"));
  ASSERT_EQ(gate.code, 0) << gate.err;

  auto an = run("analyze --task fraud --corpus " + path("c.jsonl") + " --pred " + path("kept.jsonl") + " --out " +
                path("fr"));
  ASSERT_EQ(an.code, 0) << an.err;
  for (const char* f : {"bucket_ratios.csv", "regressions.csv", "months_vs_loss.svg", "analysis.json"})
    EXPECT_TRUE(fs::exists(dir_ / "fr" / f)) << f;
  auto rep = run("report --analysis " + path("fr/analysis.json"));
  EXPECT_EQ(rep.code, 0) << rep.err;
  EXPECT_FALSE(rep.out.empty());

  auto dd = run("analyze --task drunk_driving --corpus " + path("c.jsonl") + " --out " + path("dd"));
  ASSERT_EQ(dd.code, 0) << dd.err;
  EXPECT_EQ(slurp(dir_ / "dd" / "yearly_means.csv").rfind("year_range,prior_record,mean_months,n\n", 0), 0u);
  EXPECT_EQ(run("analyze --task civil --corpus " + path("c.jsonl") + " --out " + path("x")).code, 2);
}

TEST_F(Cli, TrainAndModelExtractTiny) {
  ASSERT_EQ(run("gen-corpus --out " + path("c.jsonl") + " --per-task 2").code, 0);
  auto tr = run("train --train " + path("c.jsonl") + " --out " + path("m.json") +
                " --epochs 1 --d-model 16 --heads 2 --d-ff 32 --layers 1 --prompt-len 4");
  ASSERT_EQ(tr.code, 0) << tr.err;
  EXPECT_EQ(nlohmann::json::parse(tr.out).at("loss").size(), 1u);
  auto pt = run("train --mode prompt --init " + path("m.json") + " --train " + path("c.jsonl") + " --out " +
                path("p.json") + " --epochs 1");
  ASSERT_EQ(pt.code, 0) << pt.err;
  auto ex = run("extract --engine model --ckpt " + path("p.json") + " --corpus " + path("c.jsonl") + " --out " +
                path("pred.jsonl") + " --jobs 2");
  ASSERT_EQ(ex.code, 0) << ex.err;
  auto ev = run("eval --gold " + path("c.jsonl") + " --pred " + path("pred.jsonl"));
  EXPECT_EQ(ev.code, 0) << ev.err;
  EXPECT_EQ(run("extract --engine model --corpus " + path("c.jsonl")).code, 2);
}

TEST(CliInProcess, WritesToGivenStreams) {
  std::ostringstream out, err;
  const char* argv[] = {"legalie", "--help"};
  EXPECT_EQ(legalie::cli::run_cli(2, argv, out, err), 0);
  EXPECT_NE(out.str().find("gen-corpus"), std::string::npos);
}
