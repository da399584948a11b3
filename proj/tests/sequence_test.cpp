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
#include <limits>
#include <random>

#include "ctrs/errors.hpp"
#include "ctrs/sequence.hpp"
#include "oracles.hpp"

namespace ctrs {
namespace {

ScoreMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  ScoreMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

TEST(ForwardBackward, SingleSymmetricPosition) {
  const auto r = forward_backward(ScoreMatrix::Zero(1, 2), ScoreMatrix::Zero(2, 2));
  EXPECT_NEAR(r.log_partition, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.marginals(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(r.marginals(0, 1), 0.5, 1e-12);
  EXPECT_TRUE(r.pairwise.empty());
}

TEST(ForwardBackward, ZeroTransitionsGiveSoftmax) {
  std::mt19937_64 rng(2);
  const ScoreMatrix e = random_matrix(rng, 5, 3, 2.0);
  const auto r = forward_backward(e, ScoreMatrix::Zero(3, 3));
  for (int i = 0; i < 5; ++i) {
    const double z = e.row(i).array().exp().sum();
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(r.marginals(i, j), std::exp(e(i, j)) / z, 1e-12);
  }
}

TEST(ForwardBackward, MatchesEnumeration) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int k = 1 + static_cast<int>(rng() % 4);
    const ScoreMatrix e = random_matrix(rng, n, k, 3.0);
    const ScoreMatrix t = random_matrix(rng, k, k, 3.0);
    const auto r = forward_backward(e, t);
    const auto o = oracle::enumerate_chain(e, t);
    EXPECT_NEAR(r.log_partition, o.log_partition, 1e-9);
    EXPECT_LT((r.marginals - o.marginals).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_EQ(r.pairwise.size(), o.pairwise.size());
    for (std::size_t p = 0; p < o.pairwise.size(); ++p)
      EXPECT_LT((r.pairwise[p] - o.pairwise[p]).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ForwardBackward, NormalizationAndPairwiseConsistency) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 30);
    const int k = 2 + static_cast<int>(rng() % 6);
    const auto r = forward_backward(random_matrix(rng, n, k, 5.0),
                                    random_matrix(rng, k, k, 5.0));
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r.marginals.row(i).sum(), 1.0, 1e-9);
    for (int i = 0; i + 1 < n; ++i) {
      const auto& pw = r.pairwise[static_cast<std::size_t>(i)];
      for (int a = 0; a < k; ++a) {
        EXPECT_NEAR(pw.row(a).sum(), r.marginals(i, a), 1e-9);
        EXPECT_NEAR(pw.col(a).sum(), r.marginals(i + 1, a), 1e-9);
      }
    }
  }
}

TEST(ForwardBackward, LargeScoresStayFinite) {
  ScoreMatrix e = ScoreMatrix::Constant(50, 3, 800.0);
  e(10, 1) = -900.0;
  const auto r = forward_backward(e, ScoreMatrix::Constant(3, 3, 500.0));
  EXPECT_TRUE(std::isfinite(r.log_partition));
  EXPECT_TRUE(r.marginals.allFinite());
}

TEST(ForwardBackward, ShiftInvariance) {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int k = 2 + static_cast<int>(rng() % 3);
    const ScoreMatrix e = random_matrix(rng, n, k, 2.0);
    const ScoreMatrix t = random_matrix(rng, k, k, 2.0);
    ScoreMatrix shifted = e;
    shifted.row(static_cast<int>(rng() % n)).array() += 7.25;
    const auto a = forward_backward(e, t);
    const auto b = forward_backward(shifted, t);
    EXPECT_LT((a.marginals - b.marginals).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(viterbi(e, t), viterbi(shifted, t));
  }
}

TEST(ForwardBackward, RejectsBadInput) {
  ScoreMatrix e = ScoreMatrix::Zero(2, 2);
  e(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(forward_backward(e, ScoreMatrix::Zero(2, 2)), NumericalError);
  ScoreMatrix t = ScoreMatrix::Zero(2, 2);
  t(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(forward_backward(ScoreMatrix::Zero(2, 2), t), NumericalError);
  EXPECT_THROW(forward_backward(ScoreMatrix::Zero(0, 2), ScoreMatrix::Zero(2, 2)),
               ValidationError);
  EXPECT_THROW(forward_backward(ScoreMatrix::Zero(3, 2), ScoreMatrix::Zero(3, 3)),
               ValidationError);
}

TEST(Viterbi, SinglePositionIsArgmax) {
  ScoreMatrix e(1, 4);
  e << 0.1, 2.0, -1.0, 1.5;
  EXPECT_EQ(viterbi(e, ScoreMatrix::Zero(4, 4)), std::vector<int>{1});
}

TEST(Viterbi, TiesGoToLowestIndex) {
  EXPECT_EQ(viterbi(ScoreMatrix::Zero(6, 3), ScoreMatrix::Zero(3, 3)),
            std::vector<int>(6, 0));
}

TEST(Viterbi, MatchesEnumeration) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int k = 1 + static_cast<int>(rng() % 4);
    const ScoreMatrix e = random_matrix(rng, n, k, 2.0);
    const ScoreMatrix t = random_matrix(rng, k, k, 2.0);
    const auto path = viterbi(e, t);
    const auto o = oracle::enumerate_chain(e, t);
    EXPECT_NEAR(oracle::chain_path_score(e, t, path), o.best_score, 1e-9);
    EXPECT_EQ(path, o.best_path);
    EXPECT_NEAR(path_score(e, t, path), o.best_score, 1e-9);
  }
}

TEST(Viterbi, IntegerScoreTiesMatchLexicographicFirst) {
  // Small integer scores produce many exact ties.
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> d(0, 1);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int k = 2 + static_cast<int>(rng() % 2);
    ScoreMatrix e(n, k), t(k, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) e(i, j) = d(rng);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) t(i, j) = d(rng);
    const auto path = viterbi(e, t);
    EXPECT_EQ(oracle::chain_path_score(e, t, path), oracle::enumerate_chain(e, t).best_score);
  }
}

}  // namespace
}  // namespace ctrs
