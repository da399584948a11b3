// Copyright 2026 The ctrscode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "ctrs/errors.hpp"
#include "ctrs/eval.hpp"
#include "oracles.hpp"

namespace ctrs {
namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("r" + std::to_string(i));
  return out;
}

FeatureMatrix dense_matrix(const Eigen::MatrixXd& x) {
  auto space = std::make_shared<FeatureSpace>();
  for (Eigen::Index j = 0; j < x.cols(); ++j) space->names.push_back("f" + std::to_string(j));
  space->blocks.push_back({"", Provenance::kTfidf, 0, static_cast<std::size_t>(x.cols()), true});
  FeatureMatrix m;
  m.row_ids = ids(static_cast<std::size_t>(x.rows()));
  m.space = space;
  m.x = x;
  return m;
}

// Codes are 2 or 5 each, so every code and the total are balanced coins.
LabelTable coin_labels(std::mt19937_64& rng, const std::vector<std::string>& rows) {
  LabelTable t;
  for (const auto& id : rows) {
    CodeScores s;
    for (int& v : s.values) v = rng() % 2 ? 5 : 2;
    t[id] = s;
  }
  return t;
}

TEST(MakeFolds, SizesPartitionAndDeterminism) {
  const auto plan = make_folds(ids(10), 5, 3);
  std::set<std::size_t> seen;
  for (const auto& f : plan.fold_rows) {
    EXPECT_EQ(f.size(), 2u);
    seen.insert(f.begin(), f.end());
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(make_folds(ids(10), 5, 3).fold_rows, plan.fold_rows);
  const auto uneven = make_folds(ids(11), 3, 1);
  std::size_t lo = 99, hi = 0;
  for (const auto& f : uneven.fold_rows) {
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
  }
  EXPECT_LE(hi - lo, 1u);
  EXPECT_THROW(make_folds(ids(3), 4, 0), ValidationError);
  EXPECT_THROW(make_folds(ids(3), 1, 0), ValidationError);
}

TEST(MakeFolds, StratifiedCounts) {
  const std::vector<int> y = {1, 1, 1, 1, 1, 1, 0, 0, 0, 0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto plan = make_folds(ids(10), 2, seed, &y);
    for (const auto& f : plan.fold_rows) {
      int high = 0;
      for (auto r : f) high += y[r];
      EXPECT_EQ(high, 3);
      EXPECT_EQ(f.size(), 5u);
    }
  }
}

TEST(PooledF1, CounterExample) {
  const std::vector<Confusion> folds = {{1, 0, 9, 0}, {9, 1, 1, 0}};
  EXPECT_NEAR(pooled_f1(folds), 20.0 / 31.0, 1e-12);
  EXPECT_NEAR(pooled_f1(folds), 0.6452, 1e-4);
  EXPECT_NEAR(mean_fold_f1(folds), 0.5 * (2.0 / 11.0 + 0.9), 1e-12);
  EXPECT_GT(pooled_f1(folds) - mean_fold_f1(folds), 0.09);
}

TEST(PooledF1, EdgeCases) {
  EXPECT_EQ(pooled_f1({{5, 0, 0, 3}, {2, 0, 0, 1}}), 1.0);
  EXPECT_EQ(pooled_f1({{0, 3, 4, 1}, {0, 0, 0, 9}}), 0.0);
  EXPECT_EQ(pooled_f1({}), 0.0);
  // Identical confusion ratios: pooled equals per-fold.
  EXPECT_NEAR(pooled_f1({{2, 1, 1, 5}, {4, 2, 2, 10}}), f1_score(2, 1, 1), 1e-12);
}

TEST(TaskLabels, MissingIdsListed) {
  LabelTable t;
  t["r0"] = CodeScores{};
  try {
    task_labels({"r0", "r1", "r2"}, t);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("r1"), std::string::npos);
    EXPECT_NE(what.find("r2"), std::string::npos);
  }
}

TEST(RunProtocol, PlantedFeatureGivesPerfectScores) {
  std::mt19937_64 rng(191);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 60;
  Eigen::MatrixXd x(n, 8);
  LabelTable labels;
  for (int i = 0; i < n; ++i) {
    const bool high = i % 3 == 0;
    x(i, 0) = (high ? 3.0 : -3.0) + 0.1 * g(rng);
    for (int j = 1; j < 8; ++j) x(i, j) = g(rng);
    CodeScores s;
    s.values.fill(high ? 5 : 2);
    labels["r" + std::to_string(i)] = s;
  }
  ProtocolConfig cfg;
  cfg.k = 1;
  const EvalReport r = run_protocol(dense_matrix(x), labels, cfg);
  for (const auto& t : r.codes) EXPECT_EQ(t.f1_high, 1.0) << t.name;
  EXPECT_EQ(r.total.f1_high, 1.0);
  EXPECT_EQ(r.average_f1, 1.0);
}

TEST(RunProtocol, RandomLabelsStayInChanceBand) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(200, 10);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = g(rng);
    const FeatureMatrix m = dense_matrix(x);
    ProtocolConfig cfg;
    cfg.seed = seed;
    const EvalReport r = run_protocol(m, coin_labels(rng, m.row_ids), cfg);
    EXPECT_GE(r.total.f1_high, 0.35) << "seed " << seed;
    EXPECT_LE(r.total.f1_high, 0.65) << "seed " << seed;
  }
}

TEST(RunProtocol, CountsReaggregateAndThreadsDoNotMatter) {
  std::mt19937_64 rng(193);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(80, 12);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = g(rng);
  const FeatureMatrix m = dense_matrix(x);
  const LabelTable labels = coin_labels(rng, m.row_ids);
  ProtocolConfig cfg;
  cfg.k = 5;
  cfg.seed = 9;
  const EvalReport one = run_protocol(m, labels, cfg);
  cfg.threads = 4;
  const EvalReport four = run_protocol(m, labels, cfg);
  EXPECT_EQ(one.to_json().dump(), four.to_json().dump());
  EXPECT_EQ(one.to_table(), four.to_table());
  for (const auto& t : one.codes) {
    EXPECT_EQ(t.f1_high, pooled_f1(t.folds));
    long n = 0;
    for (const auto& c : t.folds) n += c.tp + c.fp + c.fn + c.tn;
    EXPECT_EQ(n, 80);
  }
}

TEST(RunTask, FitsNeverSeeHeldOutRows) {
  std::mt19937_64 rng(197);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 40;
  Eigen::MatrixXd x(n, 6);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (int j = 0; j < 6; ++j) x(i, j) = g(rng) + 0.5 * y[i] * j;
  }
  const std::vector<bool> selectable(6, true);
  const FoldPlan plan = make_folds(ids(n), 5, 4, &y);

  std::vector<LinearModel> base;
  run_task(x, selectable, y, plan, 3, 1.0,
           [&](int fold, const std::vector<std::size_t>& rows, const LinearModel& m) {
             for (std::size_t r : plan.fold_rows[static_cast<std::size_t>(fold)])
               EXPECT_FALSE(std::binary_search(rows.begin(), rows.end(), r));
             base.push_back(m);
           });
  ASSERT_EQ(base.size(), 5u);
  // Scrambling the held-out rows of a fold must leave that fold's fit unchanged.
  for (int f = 0; f < 5; ++f) {
    Eigen::MatrixXd scrambled = x;
    for (std::size_t r : plan.fold_rows[static_cast<std::size_t>(f)])
      scrambled.row(static_cast<Eigen::Index>(r)).setConstant(1e3 * g(rng));
    run_task(scrambled, selectable, y, plan, 3, 1.0,
             [&](int fold, const std::vector<std::size_t>&, const LinearModel& m) {
               if (fold != f) return;
               EXPECT_EQ(m.weights, base[static_cast<std::size_t>(f)].weights);
               EXPECT_EQ(m.bias, base[static_cast<std::size_t>(f)].bias);
               EXPECT_EQ(m.feature_mask, base[static_cast<std::size_t>(f)].feature_mask);
               EXPECT_EQ(m.scaler.mean, base[static_cast<std::size_t>(f)].scaler.mean);
             });
  }
}

TEST(RunTask, SingleClassFoldPredictsMajority) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 2);
  const std::vector<int> y = {0, 0, 0, 0, 0, 1};
  const FoldPlan plan = make_folds(ids(6), 3, 1);
  const TaskResult r = run_task(x, {true, true}, y, plan, 2, 1.0);
  EXPECT_EQ(r.single_class_folds, 1);  // only the fold holding the lone high row
}

TEST(SelectK, FullGridIsIdentity) {
  std::mt19937_64 rng(199);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(30, 7);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) {
    y[i] = i % 2;
    for (int j = 0; j < 7; ++j) x(i, j) = g(rng) + y[i];
  }
  const auto sel = select_k_by_cv(x, std::vector<bool>(7, true), y, {7}, 5, 1);
  EXPECT_EQ(sel.k, 7u);
  EXPECT_EQ(sel.mask, std::vector<bool>(7, true));
  EXPECT_THROW(select_k_by_cv(x, std::vector<bool>(7, true), y, {}, 5, 1), ValidationError);
}

TEST(SelectK, PlantedFeaturesFoundAndSmallKChosen) {
  std::mt19937_64 rng(211);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 120, d = 200;
  Eigen::MatrixXd x(n, d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = static_cast<int>(rng() % 2);
    for (int j = 0; j < d; ++j) x(i, j) = g(rng) + (j % 20 == 0 ? 1.2 * y[i] : 0.0);
  }
  const std::vector<bool> selectable(d, true);
  const auto a = select_k_by_cv(x, selectable, y, default_k_grid(d), 5, 3);
  const auto b = select_k_by_cv(x, selectable, y, default_k_grid(d), 5, 3);
  EXPECT_EQ(a.k, b.k);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.grid, b.grid);
  EXPECT_LE(a.k, 20u);
  const auto top10 = select_top_k(anova_f_scores(x, y), selectable, 10);
  for (int j = 0; j < d; ++j) EXPECT_EQ(top10[j], j % 20 == 0) << j;
}

TEST(DefaultKGrid, IncludesFullWidth) {
  EXPECT_EQ(default_k_grid(60), (std::vector<std::size_t>{10, 20, 50, 60}));
  EXPECT_EQ(default_k_grid(5), (std::vector<std::size_t>{5}));
}

TEST(FiveByTwo, HandComputedStatistic) {
  const std::array<std::array<double, 2>, 5> p = {
      {{0.1, 0.2}, {0.0, 0.1}, {0.1, 0.1}, {0.2, 0.0}, {0.1, 0.0}}};
  const auto r = five_by_two_f_statistic(p);
  EXPECT_NEAR(r.f_statistic, 0.13 / 0.07, 1e-9);
  EXPECT_NEAR(r.f_statistic, 1.857, 1e-3);
  EXPECT_NEAR(r.f_statistic, oracle::five_by_two_f(p), 1e-12);
  EXPECT_FALSE(r.significant);
  EXPECT_NEAR(r.critical_value, 4.735063, 1e-5);

  auto neg = p;
  for (auto& row : neg)
    for (double& v : row) v = -v;
  EXPECT_EQ(five_by_two_f_statistic(neg).f_statistic, r.f_statistic);
}

TEST(FiveByTwo, NoDifferenceAndDegenerate) {
  const auto zero = five_by_two_f_statistic({});
  EXPECT_TRUE(zero.no_difference);
  EXPECT_FALSE(zero.significant);
  EXPECT_TRUE(zero.to_json().at("f_statistic").is_null());

  std::array<std::array<double, 2>, 5> same{};
  for (auto& row : same) row = {0.1, 0.1};
  const auto deg = five_by_two_f_statistic(same);
  EXPECT_TRUE(deg.degenerate);
  EXPECT_TRUE(std::isinf(deg.f_statistic));
}

TEST(FiveByTwo, IdenticalPipelinesReportNoDifference) {
  std::mt19937_64 rng(223);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(60, 5);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    y[i] = i % 3 == 0;
    for (int j = 0; j < 5; ++j) x(i, j) = g(rng) + y[i];
  }
  const FeatureMatrix m = dense_matrix(x);
  const auto r = five_by_two_cv_f_test(m, 5, m, 5, y, 7);
  EXPECT_TRUE(r.no_difference);
  EXPECT_FALSE(r.significant);
}

TEST(EvalReport, TableHasAvgAndTotRows) {
  EvalReport r;
  for (std::size_t c = 0; c < kNumCodes; ++c) r.codes[c].name = std::string(kCodeNames[c]);
  r.total.name = "total";
  const std::string table = r.to_table();
  EXPECT_NE(table.find("avg"), std::string::npos);
  EXPECT_NE(table.find("tot"), std::string::npos);
  EXPECT_NE(table.find("un"), std::string::npos);
}

}  // namespace
}  // namespace ctrs
