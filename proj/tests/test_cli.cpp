/*
 * Copyright 2026 The RFIB Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rfib/cli.hpp"
#include "rfib/io.hpp"

namespace rfib {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rfib");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rfib_cli_" + std::string(::testing::UnitTest::GetInstance()
                                          ->current_test_info()
                                          ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }
  std::string write(const std::string& name, const std::string& body) const {
    std::ofstream(dir_ / name) << body;
    return path(name);
  }

  // Small synthetic problem that trains in well under a second.
  static json small_config(double alpha, double b1, double b2,
                           std::size_t d = 3) {
    return json{
        {"data",
         {{"synthetic",
           {{"p", 4},
            {"n_per_cell", {{40, 20}, {20, 0}}},
            {"test_per_cell", 25},
            {"seed", 3}}}}},
        {"model", {{"alpha", alpha}, {"beta1", b1}, {"beta2", b2}, {"d", d}}},
        {"train", {{"max_epochs", 2}, {"patience", 2}, {"seed", 11}}}};
  }

  fs::path dir_;
};

TEST_F(Cli, DivergenceValue) {
  auto r = run_cli({"divergence", "--mu", "0", "--var", "1", "--gamma2", "1",
                    "--alpha", "0.5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "renyi_div 0\n");

  r = run_cli({"divergence", "--mu", "0.3,-1", "--var", "0.5,2", "--alpha",
               "0.7", "--oracle"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string name;
  double value = 0, oracle = 0, diff = 1;
  lines >> name >> value >> name >> oracle >> name >> diff;
  EXPECT_EQ(name, "abs_diff");
  EXPECT_LT(diff, 1e-6);
  EXPECT_GT(value, 0.0);
}

TEST_F(Cli, DivergenceValidityViolation) {
  const auto r = run_cli({"divergence", "--mu", "0", "--var", "3", "--gamma2",
                          "1", "--alpha", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("= 2\n"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"divergence", "--mu", "0"}).code, 2);
  EXPECT_EQ(run_cli({"nonsense"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"divergence", "--mu", "0", "--var", "1,2", "--alpha",
                     "0.5"})
                .code,
            2);
}

TEST_F(Cli, GenDataDefaultsAndDeterminism) {
  auto r = run_cli({"gen-data", "--out-dir", path("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("(y=1,s=1)=0"), std::string::npos) << r.out;
  const std::string train = read_file(path("a/train.csv"));
  const std::string test = read_file(path("a/test.csv"));
  EXPECT_EQ(count_lines(train), 4001u);
  EXPECT_EQ(count_lines(test), 1001u);
  ASSERT_EQ(run_cli({"gen-data", "--out-dir", path("b")}).code, 0);
  EXPECT_EQ(read_file(path("b/train.csv")), train);
  EXPECT_EQ(read_file(path("b/test.csv")), test);
  ASSERT_EQ(run_cli({"gen-data", "--out-dir", path("c"), "--seed", "4"}).code,
            0);
  EXPECT_NE(read_file(path("c/train.csv")), train);
}

TEST_F(Cli, GenDataRejectsUnknownKey) {
  const auto spec = write("spec.json", R"({"p": 4, "noise_std": 1.0})");
  const auto r = run_cli({"gen-data", "--spec", spec, "--out-dir", path("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("noise_std"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"gen-data", "--spec", path("missing.json")}).code, 3);
}

TEST_F(Cli, ConfigRejectsUnknownKeys) {
  json cfg = small_config(0.5, 1, 1);
  cfg["model"]["betta1"] = 3;
  auto r = run_cli({"train", "--config", write("c.json", cfg.dump()),
                    "--out-dir", path("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("betta1"), std::string::npos) << r.err;

  cfg = small_config(0.5, 1, 1);
  cfg["model"]["beta2"] = -1;
  r = run_cli({"train", "--config", write("c2.json", cfg.dump())});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run_cli({"train", "--config", write("c3.json", "{ nope")}).code,
            2);
}

TEST_F(Cli, TrainTagsMethodsAndWritesArtifacts) {
  const std::vector<std::tuple<double, double, double, std::string>> cases = {
      {1.0, 5.0, 0.0, "IB"}, {1.0, 0.0, 5.0, "CFB"}, {0.5, 5.0, 5.0, "RFIB"}};
  for (const auto& [alpha, b1, b2, tag] : cases) {
    const std::string out = path(tag);
    const auto r = run_cli({"train", "--config",
                            write(tag + ".json", small_config(alpha, b1, b2).dump()),
                            "--out-dir", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const json m = json::parse(read_file(out + "/metrics.json"));
    EXPECT_EQ(m.at("format"), "rfib-metrics-v1");
    EXPECT_EQ(m.at("method"), tag);
    EXPECT_TRUE(m.at("metrics").at("cai_05").is_null());
    const double acc = m.at("metrics").at("acc").get<double>();
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 100.0);
    const std::string log = read_file(out + "/train_log.csv");
    EXPECT_EQ(log.substr(0, log.find('\n')),
              "epoch,train_loss,val_loss,compression,utility_loglik,"
              "conditional_loglik");
    EXPECT_EQ(json::parse(read_file(out + "/checkpoint.json")).at("format"),
              "rfib-ckpt-v1");
  }
}

TEST_F(Cli, TrainIsDeterministicAndSeedOverrides) {
  const auto cfg = write("c.json", small_config(0.5, 3, 3).dump());
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--out-dir", path("a")}).code, 0);
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--out-dir", path("b")}).code, 0);
  EXPECT_EQ(read_file(path("a/metrics.json")), read_file(path("b/metrics.json")));
  EXPECT_EQ(read_file(path("a/checkpoint.json")),
            read_file(path("b/checkpoint.json")));
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--out-dir", path("c"),
                     "--seed", "99"})
                .code,
            0);
  EXPECT_NE(read_file(path("a/checkpoint.json")),
            read_file(path("c/checkpoint.json")));
  const json m = json::parse(read_file(path("c/metrics.json")));
  EXPECT_EQ(m.at("train").at("seed"), 99);
}

TEST_F(Cli, OutDirFromEnvironment) {
  const auto cfg = write("c.json", small_config(1.0, 2, 0).dump());
  ::setenv("RFIB_OUT_DIR", path("env").c_str(), 1);
  const auto r = run_cli({"train", "--config", cfg});
  ::unsetenv("RFIB_OUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("env/metrics.json")));
}

TEST_F(Cli, TrainFromCsvData) {
  ASSERT_EQ(run_cli({"gen-data", "--spec",
                     write("spec.json", R"({"p": 4, "n_per_cell": [[30, 20],
                        [20, 0]], "test_per_cell": 10})"),
                     "--out-dir", path("data")})
                .code,
            0);
  json cfg = small_config(0.5, 2, 2);
  cfg["data"] = {{"train_csv", "data/train.csv"}, {"test_csv", "data/test.csv"}};
  const auto r = run_cli({"train", "--config", write("c.json", cfg.dump()),
                          "--out-dir", path("o")});
  EXPECT_EQ(r.code, 0) << r.err;
  const json m = json::parse(read_file(path("o/metrics.json")));
  EXPECT_NE(m.at("data").get<std::string>().find("train.csv"),
            std::string::npos);

  // A test set without the (1,1) cell cannot be scored for equalized odds.
  cfg["data"]["test_csv"] = "data/train.csv";
  const auto missing = run_cli({"train", "--config",
                                write("c2.json", cfg.dump()), "--out-dir",
                                path("o2")});
  EXPECT_EQ(missing.code, 5) << missing.err;
}

TEST_F(Cli, SweepRowsAndSinglePointAgreement) {
  json cfg = small_config(1.0, 4, 0);
  cfg["sweep"] = {{"alphas", {0.0, 0.5, 1.0}}, {"beta1s", {4}}, {"beta2s", {2}}};
  auto r = run_cli({"sweep", "--config", write("s.json", cfg.dump()),
                    "--out-dir", path("s"), "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string table = read_file(path("s/sweep.csv"));
  EXPECT_EQ(count_lines(table), 4u);
  EXPECT_TRUE(fs::exists(path("s/checkpoints/point_0.ckpt.json")));

  cfg["sweep"] = {{"alphas", {0.5}}, {"beta1s", {4}}, {"beta2s", {2}}};
  ASSERT_EQ(run_cli({"sweep", "--config", write("one.json", cfg.dump()),
                     "--out-dir", path("one")})
                .code,
            0);
  json single = small_config(0.5, 4, 2);
  ASSERT_EQ(run_cli({"train", "--config", write("t.json", single.dump()),
                     "--out-dir", path("t")})
                .code,
            0);
  const json m = json::parse(read_file(path("t/metrics.json")));
  std::istringstream rows(read_file(path("one/sweep.csv")));
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  std::vector<std::string> fields;
  std::stringstream ss(row);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  ASSERT_GE(fields.size(), 16u);
  EXPECT_EQ(std::stod(fields[10]), m.at("metrics").at("acc").get<double>());
  EXPECT_EQ(std::stod(fields[14]), m.at("metrics").at("dp_gap").get<double>());
  EXPECT_EQ(std::stod(fields[15]),
            m.at("metrics").at("eqodds_gap").get<double>());
  EXPECT_EQ(read_file(path("one/checkpoints/point_0.ckpt.json")),
            read_file(path("t/checkpoint.json")));
}

TEST_F(Cli, SweepWithEveryPointFailing) {
  json cfg = small_config(1.0, 1, 0);
  cfg["model"]["gamma2"] = 0.01;
  cfg["sweep"] = {{"alphas", {3.0, 4.0}}, {"beta1s", {1}}, {"beta2s", {1}}};
  const auto r = run_cli({"sweep", "--config", write("s.json", cfg.dump()),
                          "--out-dir", path("s")});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(count_lines(read_file(path("s/sweep.csv"))), 3u);
}

TEST_F(Cli, EmbedShapeAndDeterminism) {
  const auto cfg = write("c.json", small_config(0.5, 2, 2, 32).dump());
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--out-dir", path("m")}).code,
            0);
  std::string data = "x0,x1,x2,x3,y,s\n";
  for (int i = 0; i < 100; ++i) {
    data += std::to_string(0.01 * i) + ",1,-1," + std::to_string(i % 7) + "," +
            std::to_string(i % 2) + "," + std::to_string((i / 2) % 2) + "\n";
  }
  const auto data_path = write("d.csv", data);
  ASSERT_EQ(run_cli({"embed", "--checkpoint", path("m/checkpoint.json"),
                     "--data", data_path, "--out", path("e1.csv")})
                .code,
            0);
  ASSERT_EQ(run_cli({"embed", "--checkpoint", path("m/checkpoint.json"),
                     "--data", data_path, "--out", path("e2.csv")})
                .code,
            0);
  const std::string e1 = read_file(path("e1.csv"));
  EXPECT_EQ(e1, read_file(path("e2.csv")));
  EXPECT_EQ(count_lines(e1), 101u);
  std::istringstream lines(e1);
  std::string line;
  while (std::getline(lines, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 33);
  }

  const auto wide = write("w.csv", "a,b,y,s\n1,2,0,1\n");
  EXPECT_EQ(run_cli({"embed", "--checkpoint", path("m/checkpoint.json"),
                     "--data", wide, "--out", path("e3.csv")})
                .code,
            3);
  EXPECT_EQ(run_cli({"embed", "--checkpoint", write("bad.json", "{}"),
                     "--data", data_path, "--out", path("e4.csv")})
                .code,
            3);
}

TEST_F(Cli, AuditPredictionFile) {
  const auto preds = write("p.csv",
                           "y_hat,y,s\n1,1,0\n1,1,0\n1,0,0\n0,0,0\n"
                           "1,1,1\n0,1,1\n1,0,1\n0,0,1\n");
  auto r = run_cli({"audit", "--predictions", preds, "--baseline-acc", "50",
                    "--baseline-gap", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("records"), 8);
  EXPECT_DOUBLE_EQ(j.at("metrics").at("acc").get<double>(), 62.5);
  EXPECT_DOUBLE_EQ(j.at("metrics").at("dp_gap").get<double>(), 25.0);
  EXPECT_DOUBLE_EQ(j.at("metrics").at("cai_05").get<double>(),
                   0.5 * (30.0 - 25.0) + 0.5 * (62.5 - 50.0));
  r = run_cli({"audit", "--predictions", write("q.csv", "y_hat,y,s\n1,1,0\n")});
  EXPECT_EQ(r.code, 5);
  r = run_cli({"audit", "--predictions", write("n.csv", "y_hat,y,s\n1,3,0\n")});
  EXPECT_EQ(r.code, 3);
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string cmd = std::string(RFIB_CLI_PATH) +
                          " divergence --mu 0 --var 3 --alpha 2 > " +
                          path("o.txt") + " 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(read_file(path("o.txt")).find("bound"), std::string::npos);
}

}  // namespace
}  // namespace rfib
