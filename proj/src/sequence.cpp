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

#include "ctrs/sequence.hpp"

#include <cmath>
#include <limits>

#include "ctrs/errors.hpp"

namespace ctrs {

namespace {

void check_inputs(const ScoreMatrix& emissions, const ScoreMatrix& transitions) {
  if (emissions.rows() == 0) throw ValidationError("empty sequence");
  if (emissions.cols() == 0) throw ValidationError("no tags");
  if (transitions.rows() != emissions.cols() ||
      transitions.cols() != emissions.cols()) {
    throw ValidationError("transition matrix must be tags x tags");
  }
  if (!emissions.allFinite() || !transitions.allFinite()) {
    throw NumericalError("non-finite emission or transition score");
  }
}

double log_sum_exp(const double* v, Eigen::Index n) {
  double m = v[0];
  for (Eigen::Index i = 1; i < n; ++i) m = std::max(m, v[i]);
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

}  // namespace

ForwardBackwardResult forward_backward(const ScoreMatrix& emissions,
                                       const ScoreMatrix& transitions) {
  check_inputs(emissions, transitions);
  const Eigen::Index len = emissions.rows();
  const Eigen::Index k = emissions.cols();

  // alpha(t, j): log-sum of all prefixes ending in tag j at position t.
  Eigen::MatrixXd alpha(len, k), beta(len, k);
  std::vector<double> buf(k);
  alpha.row(0) = emissions.row(0);
  for (Eigen::Index t = 1; t < len; ++t) {
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index i = 0; i < k; ++i)
        buf[i] = alpha(t - 1, i) + transitions(i, j);
      alpha(t, j) = log_sum_exp(buf.data(), k) + emissions(t, j);
    }
  }
  beta.row(len - 1).setZero();
  for (Eigen::Index t = len - 1; t-- > 0;) {
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j)
        buf[j] = transitions(i, j) + emissions(t + 1, j) + beta(t + 1, j);
      beta(t, i) = log_sum_exp(buf.data(), k);
    }
  }

  ForwardBackwardResult out;
  for (Eigen::Index j = 0; j < k; ++j) buf[j] = alpha(len - 1, j);
  out.log_partition = log_sum_exp(buf.data(), k);
  const double log_z = out.log_partition;

  out.marginals.resize(len, k);
  for (Eigen::Index t = 0; t < len; ++t) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      out.marginals(t, j) = std::exp(alpha(t, j) + beta(t, j) - log_z);
      row_sum += out.marginals(t, j);
    }
    out.marginals.row(t) /= row_sum;
  }
  out.pairwise.reserve(len > 0 ? len - 1 : 0);
  for (Eigen::Index t = 0; t + 1 < len; ++t) {
    Eigen::MatrixXd p(k, k);
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        p(i, j) = std::exp(alpha(t, i) + transitions(i, j) + emissions(t + 1, j) +
                           beta(t + 1, j) - log_z);
        total += p(i, j);
      }
    }
    p /= total;
    out.pairwise.push_back(std::move(p));
  }
  if (!std::isfinite(out.log_partition)) {
    throw NumericalError("log partition is not finite");
  }
  return out;
}

std::vector<int> viterbi(const ScoreMatrix& emissions,
                         const ScoreMatrix& transitions) {
  check_inputs(emissions, transitions);
  const Eigen::Index len = emissions.rows();
  const Eigen::Index k = emissions.cols();
  Eigen::MatrixXd delta(len, k);
  Eigen::MatrixXi back(len, k);
  delta.row(0) = emissions.row(0);
  for (Eigen::Index t = 1; t < len; ++t) {
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::Index best = 0;
      double best_score = delta(t - 1, 0) + transitions(0, j);
      for (Eigen::Index i = 1; i < k; ++i) {
        double s = delta(t - 1, i) + transitions(i, j);
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      delta(t, j) = best_score + emissions(t, j);
      back(t, j) = static_cast<int>(best);
    }
  }
  std::vector<int> path(len);
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < k; ++j) {
    if (delta(len - 1, j) > delta(len - 1, best)) best = j;
  }
  path[len - 1] = static_cast<int>(best);
  for (Eigen::Index t = len - 1; t > 0; --t) path[t - 1] = back(t, path[t]);
  return path;
}

double path_score(const ScoreMatrix& emissions, const ScoreMatrix& transitions,
                  const std::vector<int>& path) {
  double s = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    s += emissions(static_cast<Eigen::Index>(t), path[t]);
    if (t > 0) s += transitions(path[t - 1], path[t]);
  }
  return s;
}

}  // namespace ctrs
