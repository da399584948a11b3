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

#ifndef CTRS_PIPELINE_HPP_
#define CTRS_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctrs/artifact.hpp"
#include "ctrs/corpus.hpp"
#include "ctrs/eval.hpp"
#include "ctrs/features.hpp"
#include "ctrs/segmenter.hpp"
#include "ctrs/tagger.hpp"

namespace ctrs {

struct PipelineConfig {
  double pause_threshold = kDefaultPauseThreshold;
  FeatureSet feature_set = FeatureSet::kTfidf;
  double max_df = kDefaultMaxDf;
  double min_df = kDefaultMinDf;
  std::vector<std::size_t> k_grid;  // empty: default_k_grid
  double c = 1.0;
  int folds = 5;
  std::uint64_t seed = 0;
  bool segmentation = true;
  int threads = 1;
  WordNorm word_norm = WordNorm::kTherapistWords;

  Json to_json() const;
  // Unknown keys are rejected; absent keys keep their defaults.
  static PipelineConfig from_json(const Json& doc);
  FeaturizeOptions featurize_options() const;
};

// Throws ValidationError on out-of-range values.
void validate_pipeline_config(const PipelineConfig& config);

struct PipelineModels {
  std::shared_ptr<const BoundaryModel> segmenter;
  std::shared_ptr<const UtteranceTagger> da_tagger;
  std::shared_ptr<const UtteranceTagger> mc_tagger;
};

// Re-segments every session: pause split, then the boundary model unless
// `model` is null. Session-parallel; output independent of `threads`.
void segment_corpus(std::vector<Session>& sessions, const BoundaryModel* model,
                    double pause_threshold, int threads);
void tag_corpus(std::vector<Session>& sessions, Scheme scheme,
                const UtteranceTagger& tagger, int threads);

struct Evaluation {
  EvalReport report;
  KSelection k_selection;
  std::vector<std::string> warnings;

  // Artifact document: envelope, K grid and the report. Carries no
  // segmentation setting, so the tf-idf report is the same either way.
  Json to_json() const;
};

// K selection by CV on the total, then the full protocol at that K.
Evaluation evaluate_matrix(const FeatureMatrix& m, const LabelTable& labels,
                           const PipelineConfig& config);

// Runs segment (unless disabled) -> tag -> featurize -> evaluate. Throws
// MissingArtifactError naming a model the feature set needs but is absent.
Evaluation run_end_to_end(const PipelineConfig& config, std::vector<Session> sessions,
                          const LabelTable& labels, const PipelineModels& models);

// Clamps each K to the selectable width and removes duplicates.
std::vector<std::size_t> effective_k_grid(const std::vector<std::size_t>& grid,
                                          std::size_t selectable_dim);

}  // namespace ctrs

#endif  // CTRS_PIPELINE_HPP_
