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

#include "ctrs/classify.hpp"
#include "ctrs/errors.hpp"
#include "oracles.hpp"

namespace ctrs {
namespace {

struct Problem {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

Problem random_problem(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Problem p;
  p.x.resize(n, d);
  p.y.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    p.y[static_cast<std::size_t>(i)] = i < 2 ? i : static_cast<int>(rng() % 3 == 0);
    for (int j = 0; j < d; ++j)
      p.x(i, j) = g(rng) + (p.y[static_cast<std::size_t>(i)] ? 0.6 : -0.2);
  }
  return p;
}

std::vector<int> signs(const std::vector<int>& y) {
  std::vector<int> s;
  for (int v : y) s.push_back(v ? 1 : -1);
  return s;
}

std::vector<double> costs(const std::vector<int>& y, double c, const ClassWeights& w) {
  std::vector<double> out;
  for (int v : y) out.push_back(c * w(v));
  return out;
}

TEST(ClassWeights, Examples) {
  const ClassWeights bal = class_weights({0, 1, 0, 1});
  EXPECT_DOUBLE_EQ(bal.low, 1.0);
  EXPECT_DOUBLE_EQ(bal.high, 1.0);

  std::vector<int> y(134, 0);
  y.resize(225, 1);
  const ClassWeights w = class_weights(y);
  EXPECT_NEAR(w.low, 0.8396, 5e-5);
  EXPECT_NEAR(w.high, 1.2363, 5e-5);
  EXPECT_NEAR(134 * w.low + 91 * w.high, 225.0, 1e-9);

  std::vector<int> twice = y;
  twice.insert(twice.end(), y.begin(), y.end());
  const ClassWeights w2 = class_weights(twice);
  EXPECT_DOUBLE_EQ(w2.low, w.low);
  EXPECT_DOUBLE_EQ(w2.high, w.high);

  EXPECT_THROW(class_weights({1, 1, 1}), ValidationError);
}

TEST(Svm, SymmetricSeparablePair) {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  SvmOptions opt;
  opt.c = 1e3;
  const LinearModel m = train_svm(x, {0, 1}, {1.0, 1.0}, opt);
  EXPECT_NEAR(m.bias, 0.0, 1e-9);
  EXPECT_NEAR(m.weights[0], 1.0, 1e-9);
  EXPECT_EQ(predict(m, Eigen::VectorXd::Constant(1, -1.0)), 0);
  EXPECT_EQ(predict(m, Eigen::VectorXd::Constant(1, 1.0)), 1);
}

TEST(Svm, ObjectiveMatchesDualOracle) {
  std::mt19937_64 rng(163);
  for (int rep = 0; rep < 50; ++rep) {
    const Problem p = random_problem(rng, 20, 5);
    const ClassWeights w = class_weights(p.y);
    SvmOptions opt;
    opt.c = std::pow(10.0, static_cast<double>(rng() % 3) - 1.0);
    const LinearModel m = train_svm(p.x, p.y, w, opt);
    const auto ref = oracle::svm_dual_fista(p.x, signs(p.y), costs(p.y, opt.c, w), 200000);
    ASSERT_LT(ref.primal - ref.dual, 1e-7 * std::max(1.0, ref.primal));
    const double obj = svm_objective(m.weights, m.bias, p.x, p.y, opt.c, w);
    EXPECT_LT(std::abs(obj - ref.primal) / ref.primal, 1e-4);
    EXPECT_NEAR(obj, m.primal_objective, 1e-9 * std::max(1.0, obj));
  }
}

TEST(Svm, NoWorseThanZero) {
  std::mt19937_64 rng(167);
  for (int rep = 0; rep < 30; ++rep) {
    const Problem p = random_problem(rng, 25, 4);
    const ClassWeights w = class_weights(p.y);
    const LinearModel m = train_svm(p.x, p.y, w);
    EXPECT_LE(svm_objective(m.weights, m.bias, p.x, p.y, 1.0, w),
              svm_objective(std::vector<double>(4, 0.0), 0.0, p.x, p.y, 1.0, w) + 1e-12);
  }
}

TEST(Svm, DeterministicAndRoundTrips) {
  std::mt19937_64 rng(173);
  const Problem p = random_problem(rng, 30, 6);
  const ClassWeights w = class_weights(p.y);
  const LinearModel a = train_svm(p.x, p.y, w);
  const LinearModel b = train_svm(p.x, p.y, w);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  LinearModel c = a;
  c.feature_mask.assign(6, true);
  c.scaler = fit_scaler(p.x);
  EXPECT_EQ(LinearModel::from_json(c.to_json()).to_json().dump(), c.to_json().dump());
}

TEST(Svm, NonFiniteFeaturesRejected) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  x(0, 0) = std::nan("");
  EXPECT_THROW(train_svm(x, {0, 1}, {1, 1}), NumericalError);
}

TEST(Predict, TieBreakAndDimension) {
  LinearModel m;
  m.weights = {0.5, -1.0};
  m.bias = 0.25;
  EXPECT_EQ(predict(m, Eigen::VectorXd::Zero(2)), 1);
  m.bias = 0.0;
  EXPECT_EQ(predict(m, Eigen::VectorXd::Zero(2)), 0);
  EXPECT_THROW(predict(m, Eigen::VectorXd::Zero(3)), ValidationError);
}

TEST(Predict, InvariantUnderPositiveScaling) {
  std::mt19937_64 rng(179);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    LinearModel m;
    m.weights = {g(rng), g(rng), g(rng)};
    m.bias = g(rng);
    LinearModel scaled = m;
    const double k = std::exp(g(rng));
    for (double& v : scaled.weights) v *= k;
    scaled.bias *= k;
    const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(3, [&] { return g(rng); });
    EXPECT_EQ(predict(m, x), predict(scaled, x));
  }
}

TEST(SvmObjective, WeightsEqualMinorityDuplication) {
  // 6 low vs 2 high: weights 8/12 and 8/4; duplicating the highs three
  // times with unit weights, then halving, gives the same objective.
  std::mt19937_64 rng(181);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(8, 2);
  for (int i = 0; i < 8; ++i) x.row(i) << g(rng), g(rng);
  const std::vector<int> y = {0, 0, 0, 0, 0, 0, 1, 1};
  const ClassWeights w = class_weights(y);
  Eigen::MatrixXd dup(12, 2);
  std::vector<int> ydup;
  for (int i = 0; i < 6; ++i) {
    dup.row(i) = x.row(i);
    ydup.push_back(0);
  }
  for (int r = 0; r < 3; ++r)
    for (int i = 6; i < 8; ++i) {
      dup.row(static_cast<Eigen::Index>(ydup.size())) = x.row(i);
      ydup.push_back(1);
    }
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<double> wv = {g(rng), g(rng)};
    const double b = g(rng);
    // Balanced duplicate set has N' = 12, so unit weights scale by 12/8
    // relative to the class weights of the original set.
    const double original = svm_objective(wv, b, x, y, 1.0, w) - 0.5 * (wv[0] * wv[0] + wv[1] * wv[1]);
    const double balanced = svm_objective(wv, b, dup, ydup, 1.0, {1.0, 1.0}) -
                            0.5 * (wv[0] * wv[0] + wv[1] * wv[1]);
    EXPECT_NEAR(original, balanced * (8.0 / 12.0), 1e-9);
  }
}

TEST(SelectColumns, KeepsMaskedColumnsInOrder) {
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  Eigen::MatrixXd expect(2, 2);
  expect << 1, 3, 4, 6;
  EXPECT_EQ(select_columns(x, {true, false, true}), expect);
  EXPECT_THROW(select_columns(x, {true}), ValidationError);
}

}  // namespace
}  // namespace ctrs
