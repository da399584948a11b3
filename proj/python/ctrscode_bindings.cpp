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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ctrs/artifact.hpp"
#include "ctrs/classify.hpp"
#include "ctrs/errors.hpp"
#include "ctrs/eval.hpp"
#include "ctrs/features.hpp"
#include "ctrs/pipeline.hpp"
#include "ctrs/sequence.hpp"
#include "ctrs/synth.hpp"

namespace py = pybind11;
using namespace ctrs;

namespace {

// JSON crosses the boundary as text; the package wrapper parses it.
std::string dump(const Json& doc) { return doc.dump(); }

Json parse_config(const std::string& text) {
  try {
    return text.empty() ? Json::object() : Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_ctrscode, m) {
  m.doc() = "Session-level CTRS code prediction";
  m.attr("__version__") = std::string(kToolVersion);

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<MissingArtifactError>(m, "MissingArtifactError",
                                               PyExc_FileNotFoundError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "forward_backward",
      [](const ScoreMatrix& e, const ScoreMatrix& t) {
        const auto r = forward_backward(e, t);
        return py::make_tuple(r.log_partition, r.marginals, r.pairwise);
      },
      py::arg("emissions"), py::arg("transitions"));
  m.def("viterbi", &viterbi, py::arg("emissions"), py::arg("transitions"));

  m.def(
      "synth",
      [](const std::filesystem::path& out, const std::string& config_json) {
        const SynthConfig cfg = SynthConfig::from_json(parse_config(config_json));
        write_synth_outputs(out, cfg, generate_corpus(cfg));
      },
      py::arg("out"), py::arg("config_json") = "");

  m.def(
      "featurize",
      [](const std::filesystem::path& corpus, const std::string& set, double max_df,
         double min_df) {
        FeaturizeOptions opt;
        opt.max_df = max_df;
        opt.min_df = min_df;
        const FeatureMatrix fm = featurize(parse_corpus(corpus), parse_feature_set(set), opt);
        return py::make_tuple(fm.row_ids, fm.space->names, fm.x);
      },
      py::arg("corpus"), py::arg("feature_set"), py::arg("max_df") = kDefaultMaxDf,
      py::arg("min_df") = kDefaultMinDf);

  m.def(
      "evaluate",
      [](const std::filesystem::path& corpus, const std::string& config_json) {
        const PipelineConfig cfg = PipelineConfig::from_json(parse_config(config_json));
        const auto sessions = parse_corpus(corpus);
        const FeatureMatrix fm = featurize(sessions, cfg.feature_set, cfg.featurize_options());
        return dump(evaluate_matrix(fm, labels_from_sessions(sessions), cfg).to_json());
      },
      py::arg("corpus"), py::arg("config_json") = "");

  m.def(
      "pooled_f1",
      [](const std::vector<std::array<long, 4>>& folds) {
        std::vector<Confusion> c;
        for (const auto& f : folds) c.push_back({f[0], f[1], f[2], f[3]});
        return pooled_f1(c);
      },
      py::arg("folds"), "Folds as (tp, fp, fn, tn).");

  m.def(
      "class_weights",
      [](const std::vector<int>& y) {
        const ClassWeights w = class_weights(y);
        return py::make_tuple(w.low, w.high);
      },
      py::arg("labels"));

  m.def(
      "five_by_two_f",
      [](const std::array<std::array<double, 2>, 5>& p) {
        return dump(five_by_two_f_statistic(p).to_json());
      },
      py::arg("p"));
}
