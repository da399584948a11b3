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

#include "ctrs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ctrs/errors.hpp"
#include "ctrs/parallel.hpp"

namespace ctrs {

namespace {

std::string_view word_norm_name(WordNorm n) {
  return n == WordNorm::kTherapistWords ? "therapist" : "session";
}

WordNorm parse_word_norm(const std::string& s) {
  if (s == "therapist") return WordNorm::kTherapistWords;
  if (s == "session") return WordNorm::kSessionWords;
  throw ValidationError("word_norm must be 'therapist' or 'session', got '" + s + "'");
}

}  // namespace

Json PipelineConfig::to_json() const {
  Json grid = Json::array();
  for (std::size_t k : k_grid) grid.push_back(k);
  return Json{{"pause_threshold", pause_threshold},
              {"feature_set", std::string(feature_set_name(feature_set))},
              {"max_df", max_df},
              {"min_df", min_df},
              {"k_grid", std::move(grid)},
              {"C", c},
              {"folds", folds},
              {"seed", seed},
              {"segmentation", segmentation},
              {"threads", threads},
              {"word_norm", std::string(word_norm_name(word_norm))}};
}

PipelineConfig PipelineConfig::from_json(const Json& doc) {
  static const std::set<std::string> kKeys = {
      "pause_threshold", "feature_set", "max_df", "min_df", "k_grid",   "C",
      "folds",           "seed",        "segmentation",     "threads", "word_norm"};
  if (!doc.is_object()) throw ValidationError("pipeline config must be a JSON object");
  PipelineConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (!kKeys.count(key)) throw ValidationError("unknown config key '" + key + "'");
    }
    c.pause_threshold = doc.value("pause_threshold", c.pause_threshold);
    if (doc.contains("feature_set"))
      c.feature_set = parse_feature_set(doc["feature_set"].get<std::string>());
    c.max_df = doc.value("max_df", c.max_df);
    c.min_df = doc.value("min_df", c.min_df);
    if (doc.contains("k_grid")) c.k_grid = doc["k_grid"].get<std::vector<std::size_t>>();
    c.c = doc.value("C", c.c);
    c.folds = doc.value("folds", c.folds);
    c.seed = doc.value("seed", c.seed);
    c.segmentation = doc.value("segmentation", c.segmentation);
    c.threads = doc.value("threads", c.threads);
    if (doc.contains("word_norm"))
      c.word_norm = parse_word_norm(doc["word_norm"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("pipeline config: ") + e.what());
  }
  validate_pipeline_config(c);
  return c;
}

FeaturizeOptions PipelineConfig::featurize_options() const {
  return FeaturizeOptions{max_df, min_df, word_norm};
}

void validate_pipeline_config(const PipelineConfig& c) {
  if (!(c.pause_threshold > 0.0) || !std::isfinite(c.pause_threshold))
    throw ValidationError("pause threshold must be positive");
  if (!(c.min_df >= 0.0 && c.min_df <= c.max_df && c.max_df <= 1.0))
    throw ValidationError("need 0 <= min_df <= max_df <= 1");
  if (!(c.c > 0.0) || !std::isfinite(c.c)) throw ValidationError("C must be positive");
  if (c.folds < 2) throw ValidationError("folds must be at least 2");
  if (c.threads < 1) throw ValidationError("threads must be at least 1");
  if (std::find(c.k_grid.begin(), c.k_grid.end(), 0u) != c.k_grid.end())
    throw ValidationError("K values must be positive");
}

void segment_corpus(std::vector<Session>& sessions, const BoundaryModel* model,
                    double pause_threshold, int threads) {
  parallel_for(sessions.size(), threads, [&](std::size_t i) {
    segment_session(sessions[i], model, pause_threshold);
  });
}

void tag_corpus(std::vector<Session>& sessions, Scheme scheme,
                const UtteranceTagger& tagger, int threads) {
  parallel_for(sessions.size(), threads,
               [&](std::size_t i) { tag_session(sessions[i], scheme, tagger); });
}

std::vector<std::size_t> effective_k_grid(const std::vector<std::size_t>& grid,
                                          std::size_t selectable_dim) {
  if (grid.empty()) return default_k_grid(selectable_dim);
  std::set<std::size_t> out;
  for (std::size_t k : grid) out.insert(std::min(k, selectable_dim));
  return {out.begin(), out.end()};
}

Json Evaluation::to_json() const {
  Json doc = artifact_envelope("eval_report", report.seed);
  Json grid = Json::array();
  for (const auto& [k, f1] : k_selection.grid)
    grid.push_back(Json{{"k", k}, {"total_f1", f1}});
  doc["k_selection"] = Json{{"k", k_selection.k}, {"grid", std::move(grid)}};
  doc["report"] = report.to_json();
  doc["warnings"] = warnings;
  return doc;
}

Evaluation evaluate_matrix(const FeatureMatrix& m, const LabelTable& labels,
                           const PipelineConfig& config) {
  validate_pipeline_config(config);
  const TaskLabels y = task_labels(m.row_ids, labels);
  const std::vector<bool> selectable = m.space->selectable_mask();
  const auto n_selectable =
      static_cast<std::size_t>(std::count(selectable.begin(), selectable.end(), true));

  Evaluation out;
  out.warnings = m.warnings;
  out.k_selection = select_k_by_cv(m.x, selectable, y[kTotalTask],
                                   effective_k_grid(config.k_grid, n_selectable),
                                   config.folds, config.seed, config.c);
  ProtocolConfig protocol;
  protocol.k = out.k_selection.k;
  protocol.c = config.c;
  protocol.folds = config.folds;
  protocol.seed = config.seed;
  protocol.threads = config.threads;
  out.report = run_protocol(m, labels, protocol);
  out.report.feature_set = std::string(feature_set_name(config.feature_set));
  for (const auto& t : out.report.codes) {
    if (t.single_class_folds > 0) {
      out.warnings.push_back("code " + t.name + ": " +
                             std::to_string(t.single_class_folds) +
                             " fold(s) trained on one class; predicted the majority");
    }
  }
  return out;
}

Evaluation run_end_to_end(const PipelineConfig& config, std::vector<Session> sessions,
                          const LabelTable& labels, const PipelineModels& models) {
  validate_pipeline_config(config);
  const bool need_da = needs_scheme(config.feature_set, Scheme::kDialogAct);
  const bool need_mc = needs_scheme(config.feature_set, Scheme::kMiCode);
  if (need_da && !models.da_tagger)
    throw MissingArtifactError("feature set needs a DA tagger model");
  if (need_mc && !models.mc_tagger)
    throw MissingArtifactError("feature set needs an MC tagger model");
  if ((need_da || need_mc) && config.segmentation && !models.segmenter)
    throw MissingArtifactError("segmentation is on but no segmenter model was given");

  segment_corpus(sessions, config.segmentation ? models.segmenter.get() : nullptr,
                 config.pause_threshold, config.threads);
  if (need_da) tag_corpus(sessions, Scheme::kDialogAct, *models.da_tagger, config.threads);
  if (need_mc) tag_corpus(sessions, Scheme::kMiCode, *models.mc_tagger, config.threads);
  const FeatureMatrix m =
      featurize(sessions, config.feature_set, config.featurize_options());
  return evaluate_matrix(m, labels, config);
}

}  // namespace ctrs
