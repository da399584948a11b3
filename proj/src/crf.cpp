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

#include "ctrs/crf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ctrs/errors.hpp"

namespace ctrs {

FeatureIndex::FeatureIndex(std::vector<std::string> names)
    : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  ids_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i)
    ids_.emplace(names_[i], static_cast<int>(i));
}

int FeatureIndex::find(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

Position FeatureIndex::encode(const std::vector<std::string>& features) const {
  Position pos;
  pos.reserve(features.size());
  for (const auto& f : features) {
    int id = find(f);
    if (id >= 0) pos.push_back({id, 1.0});
  }
  return pos;
}

Json TrainReport::to_json() const {
  return Json{{"iterations", iterations},
              {"converged", converged},
              {"gradient_norm", gradient_norm},
              {"stop_reason", stop_reason},
              {"warnings", warnings}};
}

ChainCrf::ChainCrf(TagSet tags, FeatureIndex features)
    : tags_(std::move(tags)), features_(std::move(features)) {
  params_.assign(num_params(), 0.0);
}

std::size_t ChainCrf::num_params() const {
  return num_features() * num_tags() + num_tags() * num_tags();
}

double ChainCrf::emission_weight(std::size_t feature, std::size_t tag) const {
  return params_[feature * num_tags() + tag];
}

double ChainCrf::transition(std::size_t from, std::size_t to) const {
  return params_[num_features() * num_tags() + from * num_tags() + to];
}

ScoreMatrix ChainCrf::emission_scores(
    const std::vector<Position>& positions) const {
  const std::size_t k = num_tags();
  ScoreMatrix e = ScoreMatrix::Zero(static_cast<Eigen::Index>(positions.size()),
                                    static_cast<Eigen::Index>(k));
  for (std::size_t t = 0; t < positions.size(); ++t) {
    for (const Observation& o : positions[t]) {
      const double* w = &params_[static_cast<std::size_t>(o.feature) * k];
      for (std::size_t j = 0; j < k; ++j)
        e(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) +=
            o.value * w[j];
    }
  }
  return e;
}

ScoreMatrix ChainCrf::transition_matrix() const {
  const std::size_t k = num_tags();
  ScoreMatrix tr(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      tr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          transition(i, j);
  return tr;
}

std::vector<int> ChainCrf::decode(const std::vector<Position>& positions) const {
  if (positions.empty()) return {};
  return viterbi(emission_scores(positions), transition_matrix());
}

Json ChainCrf::to_json() const {
  Json doc = artifact_envelope("chain_crf", seed);
  doc["tag_set"] = Json{{"name", tags_.name()}, {"labels", tags_.labels()}};
  doc["l2"] = l2;
  doc["training"] = report.to_json();
  doc["features"] = features_.names();
  const std::size_t k = num_tags();
  Json emission = Json::array();
  for (std::size_t f = 0; f < num_features(); ++f) {
    emission.push_back(std::vector<double>(params_.begin() + f * k,
                                           params_.begin() + (f + 1) * k));
  }
  doc["emission"] = std::move(emission);
  Json trans = Json::array();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) row[j] = transition(i, j);
    trans.push_back(row);
  }
  doc["transition"] = std::move(trans);
  return doc;
}

ChainCrf ChainCrf::from_json(const Json& doc, const TagSet& expected) {
  check_artifact(doc, "chain_crf");
  TagSet tags(doc.at("tag_set").at("name").get<std::string>(),
              doc.at("tag_set").at("labels").get<std::vector<std::string>>());
  if (!(tags == expected)) {
    throw MissingArtifactError("model was trained for tag set " + tags.name() +
                               ", expected " + expected.name());
  }
  auto names = doc.at("features").get<std::vector<std::string>>();
  const std::size_t n_features = names.size();
  ChainCrf model(std::move(tags), FeatureIndex(std::move(names)));
  if (model.num_features() != n_features) {
    throw ValidationError("model feature names are not unique");
  }
  model.l2 = doc.at("l2").get<double>();
  model.seed = doc.at("created_by").at("seed").get<std::uint64_t>();
  const auto& tr = doc.at("training");
  model.report.iterations = tr.at("iterations").get<int>();
  model.report.converged = tr.at("converged").get<bool>();
  model.report.gradient_norm = tr.at("gradient_norm").get<double>();
  model.report.stop_reason = tr.at("stop_reason").get<std::string>();
  model.report.warnings = tr.at("warnings").get<std::vector<std::string>>();
  const std::size_t k = model.num_tags();
  const auto& em = doc.at("emission");
  const auto& trans = doc.at("transition");
  if (em.size() != model.num_features() || trans.size() != k) {
    throw ValidationError("model weight tables have the wrong shape");
  }
  for (std::size_t f = 0; f < model.num_features(); ++f) {
    auto row = em[f].get<std::vector<double>>();
    if (row.size() != k) throw ValidationError("emission row has wrong width");
    std::copy(row.begin(), row.end(), model.params_.begin() + f * k);
  }
  for (std::size_t i = 0; i < k; ++i) {
    auto row = trans[i].get<std::vector<double>>();
    if (row.size() != k) throw ValidationError("transition matrix not square");
    std::copy(row.begin(), row.end(),
              model.params_.begin() + model.num_features() * k + i * k);
  }
  return model;
}

namespace {

// Adds the unregularized loglik gradient of one sequence into `grad`.
double accumulate_sequence(const ChainCrf& model, const LabeledSequence& seq,
                           std::vector<double>& grad) {
  const std::size_t k = model.num_tags();
  const std::size_t trans_offset = model.num_features() * k;
  if (seq.positions.empty()) throw ValidationError("empty training sequence");
  if (seq.tags.size() != seq.positions.size()) {
    throw ValidationError("sequence has mismatched tag count");
  }
  for (int tag : seq.tags) {
    if (tag < 0 || static_cast<std::size_t>(tag) >= k) {
      throw ValidationError("gold tag index " + std::to_string(tag) +
                            " is not in tag set " + model.tags().name());
    }
  }
  const ScoreMatrix em = model.emission_scores(seq.positions);
  const ScoreMatrix tr = model.transition_matrix();
  const ForwardBackwardResult fb = forward_backward(em, tr);
  const double loglik = path_score(em, tr, seq.tags) - fb.log_partition;

  for (std::size_t t = 0; t < seq.positions.size(); ++t) {
    for (const Observation& o : seq.positions[t]) {
      double* g = &grad[static_cast<std::size_t>(o.feature) * k];
      g[seq.tags[t]] += o.value;
      for (std::size_t j = 0; j < k; ++j)
        g[j] -= o.value * fb.marginals(static_cast<Eigen::Index>(t),
                                       static_cast<Eigen::Index>(j));
    }
  }
  for (std::size_t t = 0; t + 1 < seq.positions.size(); ++t) {
    grad[trans_offset + seq.tags[t] * k + seq.tags[t + 1]] += 1.0;
    const Eigen::MatrixXd& p = fb.pairwise[t];
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        grad[trans_offset + i * k + j] -=
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return loglik;
}

void add_l2(const ChainCrf& model, double l2, LogLikGrad& out) {
  double sq = 0.0;
  auto w = model.params();
  for (std::size_t i = 0; i < w.size(); ++i) {
    sq += w[i] * w[i];
    out.gradient[i] -= l2 * w[i];
  }
  out.objective = out.loglik - 0.5 * l2 * sq;
}

}  // namespace

LogLikGrad crf_loglik_grad(const ChainCrf& model, const LabeledSequence& sequence,
                           double l2) {
  return crf_loglik_grad(model, std::span<const LabeledSequence>(&sequence, 1),
                         l2);
}

LogLikGrad crf_loglik_grad(const ChainCrf& model,
                           std::span<const LabeledSequence> data, double l2) {
  LogLikGrad out;
  out.gradient.assign(model.num_params(), 0.0);
  for (const LabeledSequence& seq : data)
    out.loglik += accumulate_sequence(model, seq, out.gradient);
  add_l2(model, l2, out);
  return out;
}

ChainCrf train_chain_crf(const TagSet& tags, FeatureIndex features,
                         std::span<const LabeledSequence> data, double l2,
                         std::uint64_t seed, const MinimizeOptions& options) {
  if (data.empty()) throw ValidationError("no training sequences");
  if (!(l2 > 0.0)) throw ValidationError("l2 strength must be positive");
  ChainCrf model(tags, std::move(features));
  model.l2 = l2;
  model.seed = seed;

  std::set<int> seen_tags;
  for (const auto& seq : data) seen_tags.insert(seq.tags.begin(), seq.tags.end());

  Objective objective = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), model.params().begin());
    LogLikGrad lg = crf_loglik_grad(model, data, l2);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = -lg.gradient[i];
    return -lg.objective;
  };
  MinimizeResult r = minimize_lbfgs(
      objective, std::vector<double>(model.num_params(), 0.0), options);
  std::copy(r.x.begin(), r.x.end(), model.params().begin());

  model.report.iterations = r.iterations;
  model.report.converged = r.converged;
  model.report.gradient_norm = r.gradient_norm;
  model.report.stop_reason = r.stop_reason;
  model.report.trace = std::move(r.trace);
  if (seen_tags.size() <= 1) {
    model.report.warnings.push_back(
        "degenerate training data: only one label occurs");
  }
  if (!r.converged) {
    model.report.warnings.push_back("optimizer stopped early: " + r.stop_reason);
  }
  return model;
}

}  // namespace ctrs
