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

#ifndef CTRS_CRF_HPP_
#define CTRS_CRF_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctrs/artifact.hpp"
#include "ctrs/optimize.hpp"
#include "ctrs/sequence.hpp"
#include "ctrs/tagset.hpp"

namespace ctrs {

// One active feature at a position.
struct Observation {
  int feature = 0;
  double value = 1.0;
};
using Position = std::vector<Observation>;

struct LabeledSequence {
  std::vector<Position> positions;
  std::vector<int> tags;
};

// Sorted, de-duplicated feature vocabulary with O(1) lookup.
class FeatureIndex {
 public:
  FeatureIndex() = default;
  explicit FeatureIndex(std::vector<std::string> names);  // sorts + dedups

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  int find(const std::string& name) const;  // -1 when absent

  // Unknown feature strings are dropped.
  Position encode(const std::vector<std::string>& features) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

struct TrainReport {
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::string stop_reason;
  std::vector<double> trace;
  std::vector<std::string> warnings;

  Json to_json() const;
};

// Linear-chain CRF: per-(feature, tag) emission weights and a tags x tags
// transition matrix, stored in one flat parameter vector
//   [emission (feature-major, F*K) | transition (from-major, K*K)].
class ChainCrf {
 public:
  ChainCrf(TagSet tags, FeatureIndex features);

  const TagSet& tags() const { return tags_; }
  const FeatureIndex& features() const { return features_; }
  std::size_t num_tags() const { return tags_.size(); }
  std::size_t num_features() const { return features_.size(); }
  std::size_t num_params() const;

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  double emission_weight(std::size_t feature, std::size_t tag) const;
  double transition(std::size_t from, std::size_t to) const;

  ScoreMatrix emission_scores(const std::vector<Position>& positions) const;
  ScoreMatrix transition_matrix() const;
  std::vector<int> decode(const std::vector<Position>& positions) const;

  double l2 = 0.0;
  std::uint64_t seed = 0;
  TrainReport report;

  Json to_json() const;
  // Throws MissingArtifactError when the embedded tag set differs from
  // `expected`.
  static ChainCrf from_json(const Json& doc, const TagSet& expected);

 private:
  TagSet tags_;
  FeatureIndex features_;
  std::vector<double> params_;
};

struct LogLikGrad {
  double loglik = 0.0;     // sum of conditional log-likelihoods, unregularized
  double objective = 0.0;  // loglik - (l2 / 2) * ||params||^2
  std::vector<double> gradient;  // d objective / d params
};

// Observed minus expected feature counts, minus l2 * params.
LogLikGrad crf_loglik_grad(const ChainCrf& model, const LabeledSequence& sequence,
                           double l2);
LogLikGrad crf_loglik_grad(const ChainCrf& model,
                           std::span<const LabeledSequence> data, double l2);

// Maximizes the L2-regularized conditional log-likelihood. Weights start at
// zero; the seed is recorded but training is a deterministic batch method.
ChainCrf train_chain_crf(const TagSet& tags, FeatureIndex features,
                         std::span<const LabeledSequence> data, double l2,
                         std::uint64_t seed, const MinimizeOptions& options = {});

}  // namespace ctrs

#endif  // CTRS_CRF_HPP_
