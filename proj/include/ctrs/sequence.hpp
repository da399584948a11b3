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

#ifndef CTRS_SEQUENCE_HPP_
#define CTRS_SEQUENCE_HPP_

#include <Eigen/Core>
#include <vector>

namespace ctrs {

// Dense score tables for a linear chain. Emissions are (length x tags);
// transitions are (tags x tags), indexed [from, to].
using ScoreMatrix = Eigen::MatrixXd;

struct ForwardBackwardResult {
  double log_partition = 0.0;
  // (length x tags); each row sums to one.
  Eigen::MatrixXd marginals;
  // pairwise[t](i, j) = P(tag_t = i, tag_{t+1} = j); length - 1 entries.
  std::vector<Eigen::MatrixXd> pairwise;
};

// Log-space forward-backward. Throws NumericalError on non-finite input and
// ValidationError on shape problems or an empty sequence.
ForwardBackwardResult forward_backward(const ScoreMatrix& emissions,
                                       const ScoreMatrix& transitions);

// Highest-scoring tag path. Ties go to the lowest tag index, both when
// choosing the final tag and at every backpointer.
std::vector<int> viterbi(const ScoreMatrix& emissions,
                         const ScoreMatrix& transitions);

// Unnormalized score of one path.
double path_score(const ScoreMatrix& emissions, const ScoreMatrix& transitions,
                  const std::vector<int>& path);

}  // namespace ctrs

#endif  // CTRS_SEQUENCE_HPP_
