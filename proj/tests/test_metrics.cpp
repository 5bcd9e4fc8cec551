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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "rfib/error.hpp"
#include "rfib/metrics.hpp"

namespace rfib {
namespace {

using Records = std::vector<PredictionRecord>;

// 3/4 correct for s=0, 2/4 for s=1; positive rates 0.75 and 0.5.
Records eight_records() {
  return {{1, 1, 0}, {1, 1, 0}, {1, 0, 0}, {0, 0, 0},
          {1, 1, 1}, {0, 1, 1}, {1, 0, 1}, {0, 0, 1}};
}

// Positive rates 0.2 vs 0.4 at y=0 and 0.9 vs 0.5 at y=1.
Records eqodds_records() {
  Records r;
  auto add = [&r](int y, int s, int positives, int total) {
    for (int i = 0; i < total; ++i) r.push_back({i < positives ? 1 : 0, y, s});
  };
  add(0, 0, 1, 5);   // 0.2
  add(0, 1, 2, 5);   // 0.4
  add(1, 0, 9, 10);  // 0.9
  add(1, 1, 1, 2);   // 0.5
  return r;
}

Records swap_groups(Records r) {
  for (auto& rec : r) rec.s = 1 - rec.s;
  return r;
}

TEST(Accuracy, AllCorrect) {
  const Records r = {{1, 1, 0}, {0, 0, 0}, {1, 1, 1}, {0, 0, 1}};
  const auto a = accuracy_metrics(r);
  EXPECT_EQ(a.acc, 1.0);
  EXPECT_EQ(a.acc_gap, 0.0);
  EXPECT_EQ(a.acc_min, 1.0);
}

TEST(Accuracy, OneGroupWrong) {
  const Records r = {{1, 1, 0}, {0, 0, 0}, {0, 1, 1}, {1, 0, 1}};
  const auto a = accuracy_metrics(r);
  EXPECT_EQ(a.acc, 0.5);
  EXPECT_EQ(a.acc_gap, 1.0);
  EXPECT_EQ(a.acc_min, 0.0);
  EXPECT_EQ(a.acc_min_group, 1);
}

TEST(Accuracy, HandSet) {
  const auto a = accuracy_metrics(eight_records());
  EXPECT_DOUBLE_EQ(a.acc, 0.625);
  EXPECT_DOUBLE_EQ(a.acc_gap, 0.25);
  EXPECT_DOUBLE_EQ(a.acc_min, 0.5);
  EXPECT_EQ(a.acc_min_group, 1);
  EXPECT_EQ(accuracy_metrics(swap_groups(eight_records())).acc_min_group, 0);
}

TEST(DemographicParity, Cases) {
  EXPECT_DOUBLE_EQ(dp_gap(eight_records()), 0.25);
  const Records equal = {{1, 0, 0}, {0, 1, 0}, {1, 1, 1}, {0, 0, 1}};
  EXPECT_EQ(dp_gap(equal), 0.0);
  const Records split = {{1, 0, 0}, {1, 1, 0}, {0, 1, 1}, {0, 0, 1}};
  EXPECT_EQ(dp_gap(split), 1.0);
}

TEST(EqualizedOdds, Cases) {
  EXPECT_NEAR(eqodds_gap(eqodds_records()), 0.4, 1e-15);
  const Records perfect = {{1, 1, 0}, {0, 0, 0}, {1, 1, 1}, {0, 0, 1}};
  EXPECT_EQ(eqodds_gap(perfect), 0.0);
  const Records follows_s = {{0, 1, 0}, {0, 0, 0}, {1, 1, 1}, {1, 0, 1}};
  EXPECT_EQ(eqodds_gap(follows_s), 1.0);
}

TEST(Metrics, MissingGroupsAreErrors) {
  const Records only0 = {{1, 1, 0}, {0, 0, 0}};
  EXPECT_THROW(accuracy_metrics(only0), MissingSubgroup);
  EXPECT_THROW(dp_gap(only0), MissingSubgroup);
  try {
    accuracy_metrics(only0);
  } catch (const MissingSubgroup& e) {
    EXPECT_EQ(e.s(), 1);
  }
  const Records no_y1_s1 = {{1, 1, 0}, {0, 0, 0}, {0, 0, 1}};
  try {
    eqodds_gap(no_y1_s1);
    FAIL() << "expected MissingSubgroupCell";
  } catch (const MissingSubgroupCell& e) {
    EXPECT_NE(std::string(e.what()).find("y=1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(validate_records(Records{{2, 0, 0}}), ConfigError);
}

TEST(Metrics, SymmetricUnderGroupSwap) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    Records r;
    for (int i = 0; i < 40; ++i) {
      r.push_back({coin(rng) ? 1 : 0, coin(rng) ? 1 : 0, i % 4 < 2 ? 0 : 1});
      r.back().y = i % 2;
    }
    const Records w = swap_groups(r);
    EXPECT_DOUBLE_EQ(accuracy_metrics(r).acc_gap, accuracy_metrics(w).acc_gap);
    EXPECT_DOUBLE_EQ(dp_gap(r), dp_gap(w));
    EXPECT_DOUBLE_EQ(eqodds_gap(r), eqodds_gap(w));
  }
}

TEST(Metrics, PermutationAndDuplicationInvariance) {
  Records r = eqodds_records();
  const auto base = compute_metrics(r, std::nullopt);
  std::mt19937_64 rng(1);
  std::shuffle(r.begin(), r.end(), rng);
  Records twice = r;
  twice.insert(twice.end(), r.begin(), r.end());
  for (const Records& v : {r, twice}) {
    const auto m = compute_metrics(v, std::nullopt);
    EXPECT_DOUBLE_EQ(m.acc, base.acc);
    EXPECT_DOUBLE_EQ(m.acc_gap, base.acc_gap);
    EXPECT_DOUBLE_EQ(m.dp_gap, base.dp_gap);
    EXPECT_DOUBLE_EQ(m.eqodds_gap, base.eqodds_gap);
  }
  EXPECT_GE(base.eqodds_gap, 0.4 - 1e-15);
  EXPECT_LE(base.acc_min, base.acc);
  EXPECT_FALSE(base.cai_05.has_value());
}

// Independent counter used as the small-instance oracle.
struct Brute {
  double n[2] = {0, 0}, correct[2] = {0, 0}, pos[2] = {0, 0};
  double cell_n[2][2] = {{0, 0}, {0, 0}}, cell_pos[2][2] = {{0, 0}, {0, 0}};
  explicit Brute(const Records& r) {
    for (const auto& x : r) {
      n[x.s] += 1;
      correct[x.s] += x.y_hat == x.y;
      pos[x.s] += x.y_hat;
      cell_n[x.y][x.s] += 1;
      cell_pos[x.y][x.s] += x.y_hat;
    }
  }
};

TEST(Metrics, ExhaustiveFourRecordMultisets) {
  std::vector<PredictionRecord> patterns;
  for (int yh = 0; yh < 2; ++yh)
    for (int y = 0; y < 2; ++y)
      for (int s = 0; s < 2; ++s) patterns.push_back({yh, y, s});
  int multisets = 0, with_groups = 0, with_cells = 0;
  for (int a = 0; a < 8; ++a)
    for (int b = a; b < 8; ++b)
      for (int c = b; c < 8; ++c)
        for (int d = c; d < 8; ++d) {
          ++multisets;
          const Records r = {patterns[a], patterns[b], patterns[c],
                             patterns[d]};
          const Brute o(r);
          if (o.n[0] == 0 || o.n[1] == 0) {
            EXPECT_THROW(accuracy_metrics(r), MissingSubgroup);
            EXPECT_THROW(dp_gap(r), MissingSubgroup);
            continue;
          }
          ++with_groups;
          const auto acc = accuracy_metrics(r);
          const double a0 = o.correct[0] / o.n[0], a1 = o.correct[1] / o.n[1];
          EXPECT_DOUBLE_EQ(acc.acc, (o.correct[0] + o.correct[1]) / 4.0);
          EXPECT_DOUBLE_EQ(acc.acc_gap, std::abs(a0 - a1));
          EXPECT_DOUBLE_EQ(acc.acc_min, std::min(a0, a1));
          EXPECT_DOUBLE_EQ(dp_gap(r),
                           std::abs(o.pos[0] / o.n[0] - o.pos[1] / o.n[1]));
          bool cells = true;
          for (int y = 0; y < 2; ++y)
            for (int s = 0; s < 2; ++s) cells = cells && o.cell_n[y][s] > 0;
          if (!cells) {
            EXPECT_THROW(eqodds_gap(r), MissingSubgroupCell);
            continue;
          }
          ++with_cells;
          double expect = 0.0;
          for (int y = 0; y < 2; ++y) {
            expect = std::max(expect,
                              std::abs(o.cell_pos[y][0] / o.cell_n[y][0] -
                                       o.cell_pos[y][1] / o.cell_n[y][1]));
          }
          EXPECT_DOUBLE_EQ(eqodds_gap(r), expect);
        }
  EXPECT_EQ(multisets, 330);
  EXPECT_GT(with_groups, 0);
  EXPECT_GT(with_cells, 0);
}

TEST(Cai, TabulatedValues) {
  const BaselineSummary base{73.37, 8.08};
  const DebiasedSummary rfib{79.42, 0.50};
  EXPECT_NEAR(cai(0.5, base, rfib), 6.815, 1e-12);
  EXPECT_NEAR(cai(0.75, base, rfib), 7.1975, 1e-12);
  EXPECT_NEAR(cai(0.5, base, rfib), 6.81, 0.02);
  EXPECT_NEAR(cai(0.75, base, rfib), 7.19, 0.02);
  EXPECT_EQ(cai(0.3, base, DebiasedSummary{73.37, 8.08}), 0.0);
}

TEST(Cai, LinearInLambdaAndAntisymmetric) {
  const BaselineSummary b{70.0, 6.0};
  const DebiasedSummary d{72.5, 2.0};
  const double c0 = cai(0.0, b, d), c1 = cai(1.0, b, d);
  for (double l : {0.1, 0.35, 0.8}) {
    EXPECT_NEAR(cai(l, b, d), (1 - l) * c0 + l * c1, 1e-12);
    EXPECT_NEAR(cai(l, BaselineSummary{72.5, 2.0}, DebiasedSummary{70.0, 6.0}),
                -cai(l, b, d), 1e-12);
  }
  EXPECT_THROW(cai(-0.1, b, d), LambdaOutOfRange);
  EXPECT_THROW(cai(1.5, b, d), LambdaOutOfRange);
}

TEST(Cai, ReportUsesPercentInputs) {
  const Records full = eqodds_records();
  const auto m = compute_metrics(full, BaselineSummary{50.0, 10.0});
  ASSERT_TRUE(m.cai_05.has_value());
  EXPECT_NEAR(*m.cai_05,
              0.5 * (10.0 - 100.0 * m.acc_gap) + 0.5 * (100.0 * m.acc - 50.0),
              1e-12);
  ASSERT_TRUE(m.cai_075.has_value());
}

TEST(Ita, Values) {
  EXPECT_EQ(ita(50.0, 10.0), 0.0);
  EXPECT_NEAR(ita(70.0, 10.0), 63.4349488229220, 1e-12);
  EXPECT_NEAR(ita(70.0, 10.0), std::atan(2.0) * 180.0 / std::numbers::pi,
              1e-12);
  EXPECT_DOUBLE_EQ(ita(60.0, 0.0), 90.0);
  EXPECT_DOUBLE_EQ(ita(40.0, 0.0), -90.0);
  EXPECT_THROW(ita(50.0, 0.0), UndefinedIta);
  EXPECT_THROW(ita(std::nan(""), 1.0), ConfigError);
}

TEST(Ita, Thresholds) {
  EXPECT_EQ(dark_skin_flag(28.0, kCelebaDarkSkinIta), 1);
  EXPECT_EQ(dark_skin_flag(28.01, kCelebaDarkSkinIta), 0);
  EXPECT_EQ(dark_skin_flag(19.0, kEyepacsDarkSkinIta), 1);
  EXPECT_EQ(dark_skin_flag(20.0, kEyepacsDarkSkinIta), 0);
}

class PredictionCsv : public ::testing::Test {
 protected:
  std::filesystem::path write(const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() /
                   ("rfib_pred_" + std::to_string(counter_++) + ".csv");
    std::ofstream(p) << body;
    paths_.push_back(p);
    return p;
  }
  void TearDown() override {
    for (const auto& p : paths_) std::filesystem::remove(p);
  }
  int counter_ = 0;
  std::vector<std::filesystem::path> paths_;
};

TEST_F(PredictionCsv, ReadsColumnsInAnyOrder) {
  const auto r = load_predictions_csv(write("s,y,y_hat\n0,1,1\n1,0,1\n").string());
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].y_hat, 1);
  EXPECT_EQ(r[0].y, 1);
  EXPECT_EQ(r[0].s, 0);
  EXPECT_EQ(r[1].s, 1);
}

TEST_F(PredictionCsv, ReportsBadRows) {
  try {
    load_predictions_csv(write("y_hat,y,s\n0,1,1\n1,2,0\n").string());
    FAIL() << "expected NonBinaryLabel";
  } catch (const NonBinaryLabel& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_predictions_csv(write("a,b\n0,1\n").string()), ParseError);
  EXPECT_THROW(load_predictions_csv(write("y_hat,y,s\n0,1\n").string()),
               ParseError);
  EXPECT_THROW(load_predictions_csv("/nonexistent/rfib.csv"), IoError);
}

}  // namespace
}  // namespace rfib
