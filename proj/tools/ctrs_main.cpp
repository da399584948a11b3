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

// Command-line front end: every pipeline stage as a file-to-file subcommand.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ctrs/artifact.hpp"
#include "ctrs/classify.hpp"
#include "ctrs/corpus.hpp"
#include "ctrs/errors.hpp"
#include "ctrs/eval.hpp"
#include "ctrs/features.hpp"
#include "ctrs/parallel.hpp"
#include "ctrs/pipeline.hpp"
#include "ctrs/segmenter.hpp"
#include "ctrs/synth.hpp"
#include "ctrs/tagger.hpp"
#include "ctrs/text.hpp"

namespace fs = std::filesystem;
using namespace ctrs;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string config;
};

// Pipeline settings: config file first, then explicit global flags.
PipelineConfig load_pipeline_config(const Globals& g) {
  PipelineConfig c;
  if (!g.config.empty()) c = PipelineConfig::from_json(read_json_file(g.config));
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  validate_pipeline_config(c);
  return c;
}

LabelTable load_labels(const std::string& path, const std::vector<Session>* sessions) {
  if (!path.empty()) return parse_label_table(fs::path(path));
  if (sessions) {
    require_scores(*sessions);
    return labels_from_sessions(*sessions);
  }
  throw ValidationError("--labels is required");
}

void write_corpus_artifact(const fs::path& path, const std::vector<Session>& sessions,
                           std::uint64_t seed) {
  const Json header = artifact_envelope("corpus", seed);
  write_corpus(path, sessions, &header);
}

std::unique_ptr<UtteranceTagger> read_tagger(const std::string& path, Scheme scheme) {
  return load_tagger(read_json_file(path), scheme);
}

fs::path table_path_for(const fs::path& report) {
  fs::path p = report;
  return p.replace_extension(".txt");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

void write_evaluation(const fs::path& out, const Evaluation& ev) {
  write_json_file(out, ev.to_json());
  write_text(table_path_for(out), ev.report.to_table());
  std::cout << ev.report.to_table();
  for (const auto& w : ev.warnings) std::cerr << "warning: " << w << '\n';
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Session-level CTRS code prediction from timestamped transcripts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Globals g;
  app.add_option("--seed", g.seed, "Root seed recorded in every artifact");
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--config", g.config, "JSON config file (synth or pipeline settings)");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  std::string synth_out;
  std::optional<int> synth_sessions;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--sessions", synth_sessions, "Override the session count");

  // train-segmenter
  auto* tseg = app.add_subcommand("train-segmenter", "Train the utterance boundary model");
  std::string tseg_in, tseg_out;
  double tseg_l2 = 1.0;
  tseg->add_option("--in", tseg_in, "Punctuated text, one passage per line")->required();
  tseg->add_option("--out", tseg_out, "Model file")->required();
  tseg->add_option("--l2", tseg_l2, "L2 penalty")->check(CLI::PositiveNumber);

  // train-tagger
  auto* ttag = app.add_subcommand("train-tagger", "Train a DA or MC utterance tagger");
  std::string ttag_scheme, ttag_in, ttag_out;
  double ttag_l2 = 1.0;
  ttag->add_option("--scheme", ttag_scheme, "da or mc")->required();
  ttag->add_option("--in", ttag_in, "Gold segmented, tagged corpus")->required();
  ttag->add_option("--out", ttag_out, "Model file")->required();
  ttag->add_option("--l2", ttag_l2, "L2 penalty")->check(CLI::PositiveNumber);

  // segment
  auto* seg = app.add_subcommand("segment", "Pause-split and segment turns");
  std::string seg_in, seg_out, seg_model;
  std::optional<double> seg_pause;
  seg->add_option("--in", seg_in, "Corpus")->required();
  seg->add_option("--out", seg_out, "Segmented corpus")->required();
  seg->add_option("--model", seg_model,
                  "Boundary model; without it each pause fragment is one utterance");
  seg->add_option("--pause", seg_pause, "Pause threshold in seconds");

  // tag
  auto* tag = app.add_subcommand("tag", "Tag utterances with DA or MC labels");
  std::string tag_scheme, tag_model, tag_in, tag_out;
  tag->add_option("--scheme", tag_scheme, "da or mc")->required();
  tag->add_option("--model", tag_model, "Tagger model")->required();
  tag->add_option("--in", tag_in, "Segmented corpus")->required();
  tag->add_option("--out", tag_out, "Tagged corpus")->required();

  // featurize
  auto* feat = app.add_subcommand("featurize", "Build a session feature matrix");
  std::string feat_set, feat_in, feat_out;
  std::optional<double> feat_max_df, feat_min_df;
  feat->add_option("--set", feat_set, "Feature set name")->required();
  feat->add_option("--in", feat_in, "Tagged corpus")->required();
  feat->add_option("--out", feat_out, "Matrix file (space goes to <out>.space.json)")
      ->required();
  feat->add_option("--max-df", feat_max_df, "Upper document-frequency bound");
  feat->add_option("--min-df", feat_min_df, "Lower document-frequency bound");

  // train
  auto* train = app.add_subcommand("train", "Fit one session classifier on all rows");
  std::string train_code = "total", train_matrix, train_labels, train_out;
  std::optional<std::size_t> train_k;
  std::optional<double> train_c;
  train->add_option("--code", train_code, "CTRS code (ag..un) or total");
  train->add_option("--features", train_matrix, "Matrix file")->required();
  train->add_option("--labels", train_labels, "Label CSV")->required();
  train->add_option("--out", train_out, "Model file")->required();
  train->add_option("--k", train_k, "Selected features (default: chosen by CV)");
  train->add_option("--C", train_c, "SVM C")->check(CLI::PositiveNumber);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate all codes and the total");
  std::string ev_matrix, ev_in, ev_set, ev_labels, ev_out;
  std::optional<int> ev_folds;
  evaluate->add_option("--matrix", ev_matrix, "Matrix file from featurize");
  evaluate->add_option("--in", ev_in, "Tagged corpus (featurized on the fly)");
  evaluate->add_option("--features", ev_set, "Feature set name (with --in)");
  evaluate->add_option("--labels", ev_labels, "Label CSV (default: scores in the corpus)");
  evaluate->add_option("--folds", ev_folds, "Number of folds");
  evaluate->add_option("--report", ev_out, "Report file (.json; table beside it)")
      ->required();

  // compare
  auto* compare = app.add_subcommand("compare", "5x2cv F test between two feature sets");
  std::string cmp_a, cmp_b, cmp_labels, cmp_out;
  compare->add_option("--a", cmp_a, "Matrix file A")->required();
  compare->add_option("--b", cmp_b, "Matrix file B")->required();
  compare->add_option("--labels", cmp_labels, "Label CSV")->required();
  compare->add_option("--out", cmp_out, "Result file")->required();

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "segment -> tag -> featurize -> evaluate");
  std::string pipe_in, pipe_labels, pipe_seg, pipe_da, pipe_mc, pipe_out, pipe_set;
  bool pipe_no_seg = false;
  pipe->add_option("--in", pipe_in, "Raw corpus")->required();
  pipe->add_option("--labels", pipe_labels, "Label CSV (default: scores in the corpus)");
  pipe->add_option("--segmenter", pipe_seg, "Boundary model");
  pipe->add_option("--da-tagger", pipe_da, "DA tagger model");
  pipe->add_option("--mc-tagger", pipe_mc, "MC tagger model");
  pipe->add_option("--features", pipe_set, "Feature set (overrides the config)");
  pipe->add_flag("--no-segmentation", pipe_no_seg, "Treat pause fragments as utterances");
  pipe->add_option("--report", pipe_out, "Report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      SynthConfig cfg = default_synth_config();
      if (!g.config.empty()) {
        Json doc = read_json_file(g.config);
        cfg = SynthConfig::from_json(doc.contains("config") ? doc["config"] : doc);
      }
      if (g.seed) cfg.seed = *g.seed;
      if (synth_sessions) cfg.n_sessions = *synth_sessions;
      validate_synth_config(cfg);
      write_synth_outputs(synth_out, cfg, generate_corpus(cfg));
    } else if (*tseg) {
      std::vector<BoundarySequence> data;
      for (const auto& line : read_lines(tseg_in))
        data.push_back(make_boundary_training_data(std::string_view(line)));
      const BoundaryModel model = train_boundary_model(data, tseg_l2, g.seed.value_or(0));
      for (const auto& w : model.crf().report.warnings) std::cerr << "warning: " << w << '\n';
      write_json_file(tseg_out, model.to_json());
    } else if (*ttag) {
      const Scheme scheme = parse_scheme(ttag_scheme);
      const auto tagger =
          train_tagger(parse_corpus(fs::path(ttag_in)), scheme, ttag_l2, g.seed.value_or(0));
      write_json_file(ttag_out, tagger->to_json());
    } else if (*seg) {
      const PipelineConfig cfg = load_pipeline_config(g);
      auto sessions = parse_corpus(fs::path(seg_in));
      std::optional<BoundaryModel> model;
      if (!seg_model.empty()) model = BoundaryModel::from_json(read_json_file(seg_model));
      segment_corpus(sessions, model ? &*model : nullptr,
                     seg_pause.value_or(cfg.pause_threshold), cfg.threads);
      write_corpus_artifact(seg_out, sessions, cfg.seed);
    } else if (*tag) {
      const PipelineConfig cfg = load_pipeline_config(g);
      const Scheme scheme = parse_scheme(tag_scheme);
      auto sessions = parse_corpus(fs::path(tag_in));
      tag_corpus(sessions, scheme, *read_tagger(tag_model, scheme), cfg.threads);
      write_corpus_artifact(tag_out, sessions, cfg.seed);
    } else if (*feat) {
      PipelineConfig cfg = load_pipeline_config(g);
      if (feat_max_df) cfg.max_df = *feat_max_df;
      if (feat_min_df) cfg.min_df = *feat_min_df;
      validate_pipeline_config(cfg);
      const FeatureMatrix m = featurize(parse_corpus(fs::path(feat_in)),
                                        parse_feature_set(feat_set), cfg.featurize_options());
      for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
      write_feature_matrix(feat_out, m);
    } else if (*train) {
      PipelineConfig cfg = load_pipeline_config(g);
      if (train_c) cfg.c = *train_c;
      const FeatureMatrix m = read_feature_matrix(train_matrix);
      const TaskLabels y = task_labels(m.row_ids, parse_label_table(fs::path(train_labels)));
      const std::size_t task =
          train_code == "total" ? kTotalTask : code_index(train_code);
      const auto selectable = m.space->selectable_mask();
      const auto n_sel = static_cast<std::size_t>(
          std::count(selectable.begin(), selectable.end(), true));
      std::size_t k = 0;
      if (train_k) {
        if (*train_k > n_sel) {
          throw ValidationError("--k exceeds the " + std::to_string(n_sel) +
                                " selectable features");
        }
        k = *train_k;
      } else {
        k = select_k_by_cv(m.x, selectable, y[kTotalTask],
                           effective_k_grid(cfg.k_grid, n_sel), cfg.folds, cfg.seed, cfg.c)
                .k;
      }
      std::vector<std::size_t> rows(m.row_ids.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      LinearModel model = fit_fold_model(m.x, selectable, y[task], rows, k, cfg.c,
                                         derive_seed(cfg.seed, task));
      model.seed = cfg.seed;
      model.feature_space_id = m.space->id();
      write_json_file(train_out, model.to_json());
    } else if (*evaluate) {
      PipelineConfig cfg = load_pipeline_config(g);
      if (ev_folds) cfg.folds = *ev_folds;
      FeatureMatrix m;
      LabelTable labels;
      if (!ev_matrix.empty() == !ev_in.empty()) {
        throw ValidationError("give exactly one of --matrix or --in");
      }
      if (!ev_matrix.empty()) {
        m = read_feature_matrix(ev_matrix);
        if (!ev_set.empty()) {
          cfg.feature_set = parse_feature_set(ev_set);
        } else if (m.feature_set) {
          cfg.feature_set = *m.feature_set;
        }
        labels = load_labels(ev_labels, nullptr);
      } else {
        if (ev_set.empty()) throw ValidationError("--features is required with --in");
        cfg.feature_set = parse_feature_set(ev_set);
        const auto sessions = parse_corpus(fs::path(ev_in));
        labels = load_labels(ev_labels, &sessions);
        m = featurize(sessions, cfg.feature_set, cfg.featurize_options());
      }
      validate_pipeline_config(cfg);
      write_evaluation(ev_out, evaluate_matrix(m, labels, cfg));
    } else if (*compare) {
      const PipelineConfig cfg = load_pipeline_config(g);
      const FeatureMatrix a = read_feature_matrix(cmp_a);
      const FeatureMatrix b = read_feature_matrix(cmp_b);
      const LabelTable labels = parse_label_table(fs::path(cmp_labels));
      const TaskLabels ya = task_labels(a.row_ids, labels);
      auto pick_k = [&](const FeatureMatrix& m) {
        const auto sel = m.space->selectable_mask();
        const auto n = static_cast<std::size_t>(std::count(sel.begin(), sel.end(), true));
        return select_k_by_cv(m.x, sel, task_labels(m.row_ids, labels)[kTotalTask],
                              effective_k_grid(cfg.k_grid, n), cfg.folds, cfg.seed, cfg.c)
            .k;
      };
      const std::size_t k_a = pick_k(a), k_b = pick_k(b);
      const FiveByTwoResult r =
          five_by_two_cv_f_test(a, k_a, b, k_b, ya[kTotalTask], cfg.seed, cfg.c);
      Json doc = artifact_envelope("five_by_two_test", cfg.seed);
      doc["a"] = Json{{"matrix", fs::path(cmp_a).filename().string()}, {"k", k_a}};
      doc["b"] = Json{{"matrix", fs::path(cmp_b).filename().string()}, {"k", k_b}};
      doc["task"] = "total";
      doc["result"] = r.to_json();
      write_json_file(cmp_out, doc);
      if (r.no_difference) {
        std::cout << "no difference\n";
      } else {
        char line[128];
        std::snprintf(line, sizeof line, "f = %.6g  (F(10,5) critical %.4f, p = %.4g)%s\n",
                      r.f_statistic, r.critical_value, r.p_value,
                      r.significant ? "  significant" : "");
        std::cout << line;
      }
    } else if (*pipe) {
      PipelineConfig cfg = load_pipeline_config(g);
      if (!pipe_set.empty()) cfg.feature_set = parse_feature_set(pipe_set);
      if (pipe_no_seg) cfg.segmentation = false;
      auto sessions = parse_corpus(fs::path(pipe_in));
      const LabelTable labels = load_labels(pipe_labels, &sessions);
      PipelineModels models;
      if (!pipe_seg.empty())
        models.segmenter =
            std::make_shared<BoundaryModel>(BoundaryModel::from_json(read_json_file(pipe_seg)));
      if (!pipe_da.empty()) models.da_tagger = read_tagger(pipe_da, Scheme::kDialogAct);
      if (!pipe_mc.empty()) models.mc_tagger = read_tagger(pipe_mc, Scheme::kMiCode);
      write_evaluation(pipe_out, run_end_to_end(cfg, std::move(sessions), labels, models));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
