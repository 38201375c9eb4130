// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace synclift {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kTiny = {"--set", "model.hidden_width=16",  "--set", "model.reprojection_width=16",
                                        "--set", "model.critic_width=8",   "--set", "train.batch_size=8",
                                        "--set", "train.epochs=1"};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("synclift_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args, bool tiny = false) {
    if (tiny) args.insert(args.end(), kTiny.begin(), kTiny.end());
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  void make_data(const std::string& name, int count, int seed = 1) {
    ASSERT_EQ(run({"synth", "--count", std::to_string(count), "--seed", std::to_string(seed), "--out", path(name)}), 0)
        << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SynthIsReproducible) {
  make_data("a.jsonl", 10, 4);
  make_data("b.jsonl", 10, 4);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  make_data("c.jsonl", 10, 5);
  EXPECT_NE(slurp(path("a.jsonl")), slurp(path("c.jsonl")));
  const auto header = nlohmann::json::parse(slurp(path("a.jsonl")).substr(0, slurp(path("a.jsonl")).find('\n')));
  EXPECT_EQ(header["provenance"]["command"], "synth");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_NE(err_.str().find("error"), std::string::npos);
  EXPECT_EQ(run({"synth"}), 2);  // no --out
  EXPECT_EQ(run({"synth", "--out", path("x.jsonl"), "--set", "train.nope=1"}), 2);
  EXPECT_EQ(run({"train", "--data", path("missing.jsonl"), "--out", path("run")}), 2);
}

TEST_F(CliTest, KcsOutputIsSymmetric) {
  make_data("d.jsonl", 3);
  for (const std::string what : {"kcs", "wkcs", "weights", "distances"}) {
    ASSERT_EQ(run({"kcs", "--data", path("d.jsonl"), "--index", "2", "--what", what}), 0) << err_.str();
    std::istringstream in(out_.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# config ", 0), 0u);
    std::vector<std::vector<double>> m;
    while (std::getline(in, line)) {
      std::vector<double> row;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
      m.push_back(row);
    }
    ASSERT_EQ(m.size(), 16u) << what;
    for (std::size_t i = 0; i < 16; ++i) {
      ASSERT_EQ(m[i].size(), 16u);
      for (std::size_t j = 0; j < 16; ++j) EXPECT_DOUBLE_EQ(m[i][j], m[j][i]) << what;
    }
  }
}

TEST_F(CliTest, TrainLiftEvalPipeline) {
  make_data("train.jsonl", 40, 1);
  make_data("val.jsonl", 8, 2);
  ASSERT_EQ(run({"train", "--data", path("train.jsonl"), "--val", path("val.jsonl"), "--out", path("run")}, true), 0)
      << err_.str();
  EXPECT_NE(out_.str().find("trained:"), std::string::npos);
  for (const char* f : {"final.ckpt", "losses.csv", "report.json", "config.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  const std::string ckpt = path("run/final.ckpt");

  ASSERT_EQ(run({"lift", "--data", path("val.jsonl"), "--checkpoint", ckpt, "--out", path("l1.jsonl")}, true), 0)
      << err_.str();
  ASSERT_EQ(run({"lift", "--data", path("val.jsonl"), "--checkpoint", ckpt, "--out", path("l2.jsonl")}, true), 0);
  EXPECT_EQ(slurp(path("l1.jsonl")), slurp(path("l2.jsonl")));

  ASSERT_EQ(run({"eval", "--data", path("val.jsonl"), "--checkpoint", ckpt, "--out", path("e1.json")}, true), 0)
      << err_.str();
  ASSERT_EQ(run({"eval", "--data", path("val.jsonl"), "--pred", path("l1.jsonl"), "--out", path("e2.json")}, true), 0)
      << err_.str();
  const auto a = nlohmann::json::parse(slurp(path("e1.json")))["reports"][0]["overall"];
  const auto b = nlohmann::json::parse(slurp(path("e2.json")))["reports"][0]["overall"];
  for (const char* k : {"mpjpe_p1", "mpjpe_p2", "z_error", "pck"}) {
    EXPECT_NEAR(a[k].get<double>(), b[k].get<double>(), 1e-9 * (1 + std::abs(a[k].get<double>()))) << k;
  }
  EXPECT_EQ(run({"eval", "--data", path("val.jsonl"), "--checkpoint", ckpt, "--pred", path("l1.jsonl")}), 2);
}

TEST_F(CliTest, NoiseBenchPrintsOneRowPerSigma) {
  make_data("nb.jsonl", 40);
  ASSERT_EQ(run({"noise-bench", "--data", path("nb.jsonl"), "--sigmas", "5,10,15,20"}, true), 0) << err_.str();
  std::istringstream in(out_.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 5u) << out_.str();
  EXPECT_EQ(lines[0].rfind("label,noise_sigma", 0), 0u);
  EXPECT_EQ(lines[1].rfind("noisy-train-noisy-test,5,ALL,", 0), 0u);
  EXPECT_EQ(lines[4].rfind("noisy-train-noisy-test,20,ALL,", 0), 0u);
}

}  // namespace
}  // namespace synclift
