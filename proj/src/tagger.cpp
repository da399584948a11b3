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

#include "ctrs/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ctrs/errors.hpp"
#include "ctrs/text.hpp"

namespace ctrs {

namespace {

const char* length_bucket(std::size_t n) {
  if (n <= 1) return "1";
  if (n == 2) return "2";
  if (n == 3) return "3";
  if (n <= 5) return "4-5";
  if (n <= 8) return "6-8";
  if (n <= 12) return "9-12";
  return "13+";
}

std::vector<std::string> chain_features(const std::vector<Token>& tokens) {
  auto f = utterance_features(tokens);
  f.emplace_back("bias");
  return f;
}

}  // namespace

std::vector<std::string> utterance_features(const std::vector<Token>& tokens) {
  std::vector<std::string> f;
  f.reserve(2 * tokens.size() + 1);
  std::string prev;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string w = to_lower(tokens[i].text);
    f.push_back("w=" + w);
    if (i > 0) f.push_back("bg=" + prev + "_" + w);
    prev = std::move(w);
  }
  f.push_back(std::string("len=") + length_bucket(tokens.size()));
  return f;
}

UtteranceClassifier::UtteranceClassifier(TagSet tags, FeatureIndex features)
    : tags_(std::move(tags)), features_(std::move(features)) {
  params_.assign(num_params(), 0.0);
}

std::size_t UtteranceClassifier::num_params() const {
  return (features_.size() + 1) * tags_.size();
}

std::vector<double> UtteranceClassifier::scores(const Position& x) const {
  const std::size_t k = tags_.size();
  const std::size_t bias = features_.size() * k;
  std::vector<double> s(params_.begin() + static_cast<std::ptrdiff_t>(bias),
                        params_.end());
  for (const Observation& o : x) {
    const double* w = &params_[static_cast<std::size_t>(o.feature) * k];
    for (std::size_t j = 0; j < k; ++j) s[j] += o.value * w[j];
  }
  return s;
}

int UtteranceClassifier::predict(const Position& x) const {
  const auto s = scores(x);
  std::size_t best = 0;
  for (std::size_t j = 1; j < s.size(); ++j)
    if (s[j] > s[best]) best = j;
  return static_cast<int>(best);
}

int UtteranceClassifier::predict(const std::vector<Token>& tokens) const {
  return predict(features_.encode(utterance_features(tokens)));
}

Json UtteranceClassifier::to_json() const {
  Json doc = artifact_envelope("utterance_classifier", seed);
  doc["tag_set"] = Json{{"name", tags_.name()}, {"labels", tags_.labels()}};
  doc["l2"] = l2;
  doc["training"] = report.to_json();
  doc["features"] = features_.names();
  const std::size_t k = tags_.size();
  Json weights = Json::array();
  for (std::size_t f = 0; f < features_.size(); ++f) {
    weights.push_back(std::vector<double>(
        params_.begin() + static_cast<std::ptrdiff_t>(f * k),
        params_.begin() + static_cast<std::ptrdiff_t>((f + 1) * k)));
  }
  doc["weights"] = std::move(weights);
  doc["bias"] = std::vector<double>(
      params_.begin() + static_cast<std::ptrdiff_t>(features_.size() * k),
      params_.end());
  return doc;
}

UtteranceClassifier UtteranceClassifier::from_json(const Json& doc,
                                                   const TagSet& expected) {
  check_artifact(doc, "utterance_classifier");
  TagSet tags(doc.at("tag_set").at("name").get<std::string>(),
              doc.at("tag_set").at("labels").get<std::vector<std::string>>());
  if (!(tags == expected)) {
    throw MissingArtifactError("model was trained for tag set " + tags.name() +
                               ", expected " + expected.name());
  }
  auto names = doc.at("features").get<std::vector<std::string>>();
  UtteranceClassifier model(std::move(tags), FeatureIndex(std::move(names)));
  model.l2 = doc.at("l2").get<double>();
  model.seed = doc.at("created_by").at("seed").get<std::uint64_t>();
  const auto& tr = doc.at("training");
  model.report.iterations = tr.at("iterations").get<int>();
  model.report.converged = tr.at("converged").get<bool>();
  model.report.gradient_norm = tr.at("gradient_norm").get<double>();
  model.report.stop_reason = tr.at("stop_reason").get<std::string>();
  model.report.warnings = tr.at("warnings").get<std::vector<std::string>>();
  const std::size_t k = model.tags_.size();
  const auto& weights = doc.at("weights");
  if (weights.size() != model.features_.size()) {
    throw ValidationError("classifier weight table has the wrong shape");
  }
  for (std::size_t f = 0; f < weights.size(); ++f) {
    auto row = weights[f].get<std::vector<double>>();
    if (row.size() != k) throw ValidationError("classifier row has wrong width");
    std::copy(row.begin(), row.end(),
              model.params_.begin() + static_cast<std::ptrdiff_t>(f * k));
  }
  auto bias = doc.at("bias").get<std::vector<double>>();
  if (bias.size() != k) throw ValidationError("classifier bias has wrong width");
  std::copy(bias.begin(), bias.end(),
            model.params_.begin() +
                static_cast<std::ptrdiff_t>(model.features_.size() * k));
  return model;
}

LogLikGrad classifier_loglik_grad(const UtteranceClassifier& model,
                                  std::span<const EncodedExample> data,
                                  double l2) {
  const std::size_t k = model.tags().size();
  const std::size_t n_weights = model.features().size() * k;
  LogLikGrad out;
  out.gradient.assign(model.num_params(), 0.0);
  std::vector<double> p(k);
  for (const EncodedExample& ex : data) {
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= k) {
      throw ValidationError("example label outside the tag set");
    }
    const auto s = model.scores(ex.x);
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(s[j] - m);
    const double log_z = m + std::log(z);
    out.loglik += s[ex.label] - log_z;
    for (std::size_t j = 0; j < k; ++j) p[j] = std::exp(s[j] - log_z);
    for (const Observation& o : ex.x) {
      double* g = &out.gradient[static_cast<std::size_t>(o.feature) * k];
      g[ex.label] += o.value;
      for (std::size_t j = 0; j < k; ++j) g[j] -= o.value * p[j];
    }
    out.gradient[n_weights + ex.label] += 1.0;
    for (std::size_t j = 0; j < k; ++j) out.gradient[n_weights + j] -= p[j];
  }
  double sq = 0.0;
  auto w = model.params();
  for (std::size_t i = 0; i < n_weights; ++i) {
    sq += w[i] * w[i];
    out.gradient[i] -= l2 * w[i];
  }
  out.objective = out.loglik - 0.5 * l2 * sq;
  return out;
}

UtteranceClassifier train_utterance_classifier(
    const std::vector<LabeledUtterance>& data, const TagSet& tags, double l2,
    std::uint64_t seed, const MinimizeOptions& options) {
  if (data.empty()) throw ValidationError("no training utterances");
  if (!(l2 > 0.0)) throw ValidationError("l2 strength must be positive");
  std::vector<std::vector<std::string>> feats;
  std::vector<std::string> all;
  std::vector<int> labels;
  std::vector<bool> present(tags.size(), false);
  for (const auto& ex : data) {
    const int label = static_cast<int>(tags.index_of(ex.label));
    present[label] = true;
    labels.push_back(label);
    feats.push_back(utterance_features(ex.tokens));
    all.insert(all.end(), feats.back().begin(), feats.back().end());
  }
  std::string missing;
  for (std::size_t j = 0; j < tags.size(); ++j) {
    if (!present[j]) missing += (missing.empty() ? "" : ", ") + tags.label(j);
  }
  if (!missing.empty()) {
    throw ValidationError("class absent from training data: " + missing);
  }

  UtteranceClassifier model(tags, FeatureIndex(std::move(all)));
  model.l2 = l2;
  model.seed = seed;
  std::vector<EncodedExample> encoded(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    encoded[i].x = model.features().encode(feats[i]);
    encoded[i].label = labels[i];
  }
  Objective objective = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), model.params().begin());
    LogLikGrad lg = classifier_loglik_grad(model, encoded, l2);
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
  if (!r.converged) {
    model.report.warnings.push_back("optimizer stopped early: " + r.stop_reason);
  }
  return model;
}

ChainCrf train_session_crf(
    const std::vector<std::vector<LabeledUtterance>>& sessions,
    const TagSet& tags, double l2, std::uint64_t seed,
    const MinimizeOptions& options) {
  std::vector<std::vector<std::vector<std::string>>> feats;
  std::vector<std::string> all;
  for (const auto& session : sessions) {
    if (session.empty()) continue;
    auto& sf = feats.emplace_back();
    for (const auto& u : session) {
      sf.push_back(chain_features(u.tokens));
      all.insert(all.end(), sf.back().begin(), sf.back().end());
    }
  }
  if (feats.empty()) throw ValidationError("no training sessions");
  FeatureIndex index(std::move(all));
  std::vector<LabeledSequence> encoded;
  std::size_t s_out = 0;
  for (const auto& session : sessions) {
    if (session.empty()) continue;
    LabeledSequence seq;
    for (std::size_t i = 0; i < session.size(); ++i) {
      seq.positions.push_back(index.encode(feats[s_out][i]));
      seq.tags.push_back(static_cast<int>(tags.index_of(session[i].label)));
    }
    encoded.push_back(std::move(seq));
    ++s_out;
  }
  return train_chain_crf(tags, std::move(index), encoded, l2, seed, options);
}

std::vector<int> ChainTagger::tag(const std::vector<Utterance>& utterances) const {
  std::vector<Position> positions;
  positions.reserve(utterances.size());
  for (const auto& u : utterances)
    positions.push_back(crf_.features().encode(chain_features(u.tokens)));
  return crf_.decode(positions);
}

std::vector<int> ClassifierTagger::tag(
    const std::vector<Utterance>& utterances) const {
  std::vector<int> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(model_.predict(u.tokens));
  return out;
}

std::vector<TaggedUtterance> tag_da(const std::vector<Utterance>& utterances,
                                    const ChainCrf& model) {
  if (!(model.tags() == TagSet::dialog_acts())) {
    throw MissingArtifactError("DA tagging needs a model over the DA tag set");
  }
  const auto tags = ChainTagger(model).tag(utterances);
  std::vector<TaggedUtterance> out(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    out[i].utterance = utterances[i];
    out[i].da = model.tags().label(tags[i]);
  }
  return out;
}

std::vector<TaggedUtterance> tag_mc(const std::vector<Utterance>& utterances,
                                    const UtteranceClassifier& model) {
  if (!(model.tags() == TagSet::mi_codes())) {
    throw MissingArtifactError("MC tagging needs a model over the MC tag set");
  }
  std::vector<TaggedUtterance> out(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    out[i].utterance = utterances[i];
    out[i].mc = model.tags().label(model.predict(utterances[i].tokens));
  }
  return out;
}

std::unique_ptr<UtteranceTagger> load_tagger(const Json& doc, Scheme scheme) {
  const TagSet& tags = TagSet::for_scheme(scheme);
  const std::string kind = doc.value("kind", "");
  if (kind == "chain_crf") {
    return std::make_unique<ChainTagger>(ChainCrf::from_json(doc, tags));
  }
  if (kind == "utterance_classifier") {
    return std::make_unique<ClassifierTagger>(
        UtteranceClassifier::from_json(doc, tags));
  }
  throw MissingArtifactError("not a tagger model (kind '" + kind + "')");
}

std::vector<std::vector<LabeledUtterance>> gold_examples(
    const std::vector<Session>& sessions, Scheme scheme) {
  std::vector<std::vector<LabeledUtterance>> out;
  for (const Session& s : sessions) {
    auto& per = out.emplace_back();
    for (const auto& t : tagged_utterances(s)) {
      const auto& tag = scheme == Scheme::kDialogAct ? t.da : t.mc;
      if (!tag) {
        throw ValidationError("session " + s.id + " has an untagged utterance");
      }
      per.push_back({t.utterance.tokens, *tag});
    }
  }
  return out;
}

std::unique_ptr<UtteranceTagger> train_tagger(const std::vector<Session>& gold,
                                              Scheme scheme, double l2,
                                              std::uint64_t seed) {
  auto examples = gold_examples(gold, scheme);
  const TagSet& tags = TagSet::for_scheme(scheme);
  if (scheme == Scheme::kDialogAct) {
    return std::make_unique<ChainTagger>(
        train_session_crf(examples, tags, l2, seed));
  }
  std::vector<LabeledUtterance> flat;
  for (auto& per : examples)
    for (auto& ex : per) flat.push_back(std::move(ex));
  return std::make_unique<ClassifierTagger>(
      train_utterance_classifier(flat, tags, l2, seed));
}

void tag_session(Session& session, Scheme scheme, const UtteranceTagger& tagger) {
  if (!(tagger.tags() == TagSet::for_scheme(scheme))) {
    throw MissingArtifactError("tagger tag set " + tagger.tags().name() +
                               " does not match scheme " +
                               std::string(scheme_name(scheme)));
  }
  for (Turn& turn : session.turns) {
    if (turn.segments.empty())
      turn.segments.push_back({0, turn.tokens.size(), {}, {}});
  }
  const auto utterances = session_utterances(session);
  const auto tags = tagger.tag(utterances);
  std::size_t i = 0;
  for (Turn& turn : session.turns) {
    for (Segment& seg : turn.segments) {
      const std::string& label = tagger.tags().label(tags[i++]);
      (scheme == Scheme::kDialogAct ? seg.da : seg.mc) = label;
    }
  }
}

std::vector<TaggedUtterance> tagged_utterances(const Session& session) {
  std::vector<TaggedUtterance> out;
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    const Turn& turn = session.turns[t];
    std::vector<Segment> spans = turn.segments;
    if (spans.empty()) spans.push_back({0, turn.tokens.size(), {}, {}});
    for (const Segment& s : spans) {
      TaggedUtterance tu;
      tu.utterance.speaker = turn.speaker;
      tu.utterance.turn_index = t;
      tu.utterance.token_offset = s.begin;
      tu.utterance.index_in_session = out.size();
      tu.utterance.tokens.assign(
          turn.tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
          turn.tokens.begin() + static_cast<std::ptrdiff_t>(s.end));
      tu.da = s.da;
      tu.mc = s.mc;
      out.push_back(std::move(tu));
    }
  }
  return out;
}

std::vector<TaggedUtterance> therapist_utterances(const Session& session) {
  auto all = tagged_utterances(session);
  std::vector<TaggedUtterance> out;
  for (auto& t : all)
    if (t.utterance.speaker == Role::kTherapist) out.push_back(std::move(t));
  return out;
}

}  // namespace ctrs
