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

#ifndef CTRS_FEATURES_HPP_
#define CTRS_FEATURES_HPP_

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctrs/artifact.hpp"
#include "ctrs/corpus.hpp"
#include "ctrs/tagger.hpp"
#include "ctrs/tagset.hpp"

namespace ctrs {

inline constexpr double kDefaultMaxDf = 0.95;
inline constexpr double kDefaultMinDf = 0.05;

enum class Provenance { kTfidf, kTagCounts, kAugmentedTfidf, kConcat };
std::string_view provenance_name(Provenance p);

// Contiguous column range inside a space. Tag-count blocks are marked
// non-selectable and always survive K-best selection.
struct FeatureBlock {
  std::string prefix;
  Provenance provenance = Provenance::kTfidf;
  std::size_t offset = 0;
  std::size_t size = 0;
  bool selectable = true;
};

struct FeatureSpace {
  std::vector<std::string> names;
  std::vector<int> df;        // document frequency; empty for tag blocks
  std::vector<double> idf;    // empty for tag blocks
  std::size_t num_documents = 0;
  double max_df = kDefaultMaxDf;
  double min_df = kDefaultMinDf;
  Provenance provenance = Provenance::kTfidf;
  std::string corpus_id;
  std::vector<FeatureBlock> blocks;

  std::size_t dim() const { return names.size(); }
  std::string id() const;  // content fingerprint
  std::vector<bool> selectable_mask() const;

  Json to_json() const;
  static FeatureSpace from_json(const Json& doc);
};
using SpacePtr = std::shared_ptr<const FeatureSpace>;

// (index, value) pairs sorted by index.
struct SparseFeatureVector {
  std::vector<std::size_t> indices;
  std::vector<double> values;
  SpacePtr space;

  std::size_t dim() const { return space ? space->dim() : 0; }
  double l2_norm() const;
};

// Fingerprint of a set of session ids; spaces fitted on the same corpus share
// it.
std::string corpus_fingerprint(const std::vector<std::string>& session_ids);

// Vocabulary = terms with min_df <= df/N <= max_df (both inclusive);
// idf = ln((1 + N) / (1 + df)) + 1. Throws ValidationError if nothing survives.
SpacePtr fit_tfidf(const std::vector<std::vector<std::string>>& documents,
                   double max_df = kDefaultMaxDf, double min_df = kDefaultMinDf,
                   Provenance provenance = Provenance::kTfidf,
                   std::string corpus_id = {});

// Raw counts times idf, then L2-normalized. Out-of-vocabulary terms ignored.
SparseFeatureVector transform_tfidf(const std::vector<std::string>& document,
                                    const SpacePtr& space);

// How the word proportions are normalized.
enum class WordNorm { kTherapistWords, kSessionWords };

// [utterance proportions x 7 | word proportions x 7], in tag-set order.
struct TagFeatureBlock {
  Scheme scheme = Scheme::kMiCode;
  std::array<double, 14> values{};
  bool no_utterances = false;  // set when the block had nothing to count
};

// `word_total` overrides the denominator of the word proportions (used for
// session-total normalization); by default the words of `tagged` are used.
TagFeatureBlock tag_count_features(const std::vector<TaggedUtterance>& tagged,
                                   Scheme scheme,
                                   std::optional<std::size_t> word_total = {});

SpacePtr tag_block_space(Scheme scheme, std::string corpus_id = {});
SparseFeatureVector to_sparse(const TagFeatureBlock& block, const SpacePtr& space);

// Lowercased token stream of the utterances, in order.
std::vector<std::string> plain_tokens(const std::vector<TaggedUtterance>& tagged);
// "word|TAG" for every token. Throws ValidationError on an untagged utterance.
std::vector<std::string> augment_tokens(const std::vector<TaggedUtterance>& tagged,
                                        Scheme scheme);

// Space of `a` followed by `b`, names prefixed by provenance. Throws
// ValidationError if the two spaces were fitted on different corpora.
SpacePtr concat_spaces(const SpacePtr& a, const SpacePtr& b);
SparseFeatureVector fuse_concat(const SparseFeatureVector& a,
                                const SparseFeatureVector& b,
                                const SpacePtr& fused_space = nullptr);

// One-way ANOVA F statistic for each column against binary labels (0/1).
// Constant columns score 0; zero within-class variance with distinct class
// means scores +infinity. Throws ValidationError if only one class occurs.
std::vector<double> anova_f_scores(const Eigen::MatrixXd& x,
                                   const std::vector<int>& y);

// Keeps the k selectable columns with the highest F (ties to the lower
// index) plus every non-selectable column. k is clamped to the number of
// selectable columns.
std::vector<bool> select_top_k(const std::vector<double>& f_scores,
                               const std::vector<bool>& selectable, std::size_t k);

struct ScalerStats {
  std::vector<double> mean;
  std::vector<double> std;  // population std; exactly 0 for constant columns

  Json to_json() const;
  static ScalerStats from_json(const Json& doc);
};

ScalerStats fit_scaler(const Eigen::MatrixXd& x_train);
// Constant columns map to 0. Throws ValidationError on a dimension mismatch.
Eigen::MatrixXd apply_scaler(const Eigen::MatrixXd& x, const ScalerStats& stats);

// The seven feature sets compared in the experiments.
enum class FeatureSet {
  kTfidf,
  kDa,
  kMc,
  kTfidfPlusDa,
  kTfidfPlusMc,
  kDaTfidf,
  kMcTfidf
};
inline constexpr std::array<FeatureSet, 7> kAllFeatureSets = {
    FeatureSet::kTfidf,      FeatureSet::kDa,      FeatureSet::kMc,
    FeatureSet::kTfidfPlusDa, FeatureSet::kTfidfPlusMc, FeatureSet::kDaTfidf,
    FeatureSet::kMcTfidf};
std::string_view feature_set_name(FeatureSet set);
FeatureSet parse_feature_set(std::string_view name);
// Which tag schemes the set needs on the corpus.
bool needs_scheme(FeatureSet set, Scheme scheme);

struct FeaturizeOptions {
  double max_df = kDefaultMaxDf;
  double min_df = kDefaultMinDf;
  WordNorm word_norm = WordNorm::kTherapistWords;
};

// Dense session-by-feature matrix for one feature set. Rows follow the
// session order; only therapist utterances contribute.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  SpacePtr space;
  Eigen::MatrixXd x;
  std::vector<std::string> warnings;
  std::optional<FeatureSet> feature_set;  // set by featurize, kept in the file
};

FeatureMatrix featurize(const std::vector<Session>& sessions, FeatureSet set,
                        const FeaturizeOptions& options = {});

// Sparse triplet text file plus a sibling "<path>.space.json".
void write_feature_matrix(const std::filesystem::path& path,
                          const FeatureMatrix& m);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);
std::filesystem::path space_path_for(const std::filesystem::path& matrix_path);

}  // namespace ctrs

#endif  // CTRS_FEATURES_HPP_
