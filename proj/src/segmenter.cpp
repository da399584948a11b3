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

#include "ctrs/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ctrs/errors.hpp"
#include "ctrs/text.hpp"

namespace ctrs {

std::vector<Fragment> pause_split(const Turn& turn, double threshold,
                                  std::size_t turn_index) {
  if (!(threshold > 0.0)) throw ValidationError("pause threshold must be > 0");
  std::vector<Fragment> out;
  for (std::size_t i = 0; i < turn.tokens.size(); ++i) {
    if (i == 0 || turn.tokens[i].start_s - turn.tokens[i - 1].end_s > threshold) {
      Fragment f;
      f.speaker = turn.speaker;
      f.turn_index = turn_index;
      f.token_offset = i;
      out.push_back(std::move(f));
    }
    out.back().tokens.push_back(turn.tokens[i]);
  }
  return out;
}

namespace {

bool is_sentence_mark(std::string_view tok) {
  return tok == "." || tok == "?" || tok == "!";
}

const char* position_bucket(std::size_t i) {
  if (i < 3) {
    static const char* kSmall[] = {"0", "1", "2"};
    return kSmall[i];
  }
  if (i <= 4) return "3-4";
  if (i <= 7) return "5-7";
  if (i <= 12) return "8-12";
  return "13+";
}

}  // namespace

BoundarySequence make_boundary_training_data(
    const std::vector<std::string>& punctuated_tokens) {
  if (punctuated_tokens.empty()) {
    throw ValidationError("boundary training text is empty");
  }
  BoundarySequence seq;
  for (const std::string& tok : punctuated_tokens) {
    if (is_sentence_mark(tok)) {
      if (!seq.labels.empty()) seq.labels.back() = kBoundary;
      continue;
    }
    seq.tokens.push_back(to_lower(tok));
    seq.labels.push_back(kInside);
  }
  if (seq.tokens.empty()) {
    throw ValidationError("boundary training text has no words");
  }
  return seq;
}

BoundarySequence make_boundary_training_data(std::string_view punctuated_text) {
  return make_boundary_training_data(split_whitespace(punctuated_text));
}

std::vector<std::string> boundary_features(const std::vector<std::string>& tokens,
                                           std::size_t i) {
  std::vector<std::string> f;
  f.reserve(5);
  f.emplace_back("bias");
  f.push_back("w0=" + to_lower(tokens[i]));
  f.push_back("w-1=" + (i == 0 ? std::string("<s>") : to_lower(tokens[i - 1])));
  f.push_back("w+1=" + (i + 1 == tokens.size() ? std::string("</s>")
                                                : to_lower(tokens[i + 1])));
  f.push_back(std::string("pos=") + position_bucket(i));
  return f;
}

const TagSet& BoundaryModel::label_set() {
  static const TagSet kSet("BOUNDARY", {"INSIDE", "BOUNDARY"});
  return kSet;
}

BoundaryModel::BoundaryModel(ChainCrf crf) : crf_(std::move(crf)) {
  if (!(crf_.tags() == label_set())) {
    throw MissingArtifactError("boundary model must use the BOUNDARY label set");
  }
}

std::vector<int> BoundaryModel::predict(
    const std::vector<std::string>& tokens) const {
  std::vector<Position> positions;
  positions.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    positions.push_back(crf_.features().encode(boundary_features(tokens, i)));
  return crf_.decode(positions);
}

Json BoundaryModel::to_json() const {
  Json doc = crf_.to_json();
  doc["kind"] = "boundary_model";
  doc["feature_template"] = std::string(kTemplate);
  return doc;
}

BoundaryModel BoundaryModel::from_json(const Json& doc) {
  check_artifact(doc, "boundary_model");
  Json inner = doc;
  inner["kind"] = "chain_crf";
  return BoundaryModel(ChainCrf::from_json(inner, label_set()));
}

BoundaryModel train_boundary_model(const std::vector<BoundarySequence>& data,
                                   double l2, std::uint64_t seed,
                                   const MinimizeOptions& options) {
  if (data.empty()) throw ValidationError("no boundary training sequences");
  std::vector<std::vector<std::vector<std::string>>> feats(data.size());
  std::vector<std::string> all;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto& seq = data[s];
    if (seq.tokens.empty()) throw ValidationError("empty boundary sequence");
    if (seq.tokens.size() != seq.labels.size()) {
      throw ValidationError("boundary sequence has mismatched labels");
    }
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
      feats[s].push_back(boundary_features(seq.tokens, i));
      all.insert(all.end(), feats[s].back().begin(), feats[s].back().end());
    }
  }
  FeatureIndex index(std::move(all));
  std::vector<LabeledSequence> encoded(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    for (const auto& f : feats[s]) encoded[s].positions.push_back(index.encode(f));
    encoded[s].tags = data[s].labels;
  }
  return BoundaryModel(
      train_chain_crf(BoundaryModel::label_set(), std::move(index), encoded, l2, seed, options));
}

std::vector<Utterance> segment(const Fragment& fragment,
                               const BoundaryModel& model) {
  if (fragment.tokens.empty()) throw ValidationError("empty fragment");
  std::vector<std::string> words;
  words.reserve(fragment.tokens.size());
  for (const Token& t : fragment.tokens) words.push_back(t.text);
  const std::vector<int> labels = model.predict(words);

  std::vector<Utterance> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kBoundary || i + 1 == labels.size()) {
      Utterance u;
      u.speaker = fragment.speaker;
      u.turn_index = fragment.turn_index;
      u.token_offset = fragment.token_offset + begin;
      u.tokens.assign(fragment.tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                      fragment.tokens.begin() + static_cast<std::ptrdiff_t>(i + 1));
      out.push_back(std::move(u));
      begin = i + 1;
    }
  }
  return out;
}

void segment_session(Session& session, const BoundaryModel* model,
                     double pause_threshold) {
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    Turn& turn = session.turns[t];
    turn.segments.clear();
    for (const Fragment& frag : pause_split(turn, pause_threshold, t)) {
      if (model == nullptr) {
        turn.segments.push_back(
            {frag.token_offset, frag.token_offset + frag.tokens.size(), {}, {}});
        continue;
      }
      for (const Utterance& u : segment(frag, *model)) {
        turn.segments.push_back(
            {u.token_offset, u.token_offset + u.tokens.size(), {}, {}});
      }
    }
  }
}

std::vector<Utterance> session_utterances(const Session& session) {
  std::vector<Utterance> out;
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    const Turn& turn = session.turns[t];
    std::vector<Segment> spans = turn.segments;
    if (spans.empty()) spans.push_back({0, turn.tokens.size(), {}, {}});
    for (const Segment& s : spans) {
      Utterance u;
      u.speaker = turn.speaker;
      u.turn_index = t;
      u.token_offset = s.begin;
      u.index_in_session = out.size();
      u.tokens.assign(turn.tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
                      turn.tokens.begin() + static_cast<std::ptrdiff_t>(s.end));
      out.push_back(std::move(u));
    }
  }
  return out;
}

double boundary_f1(const std::vector<std::vector<int>>& predicted,
                   const std::vector<std::vector<int>>& gold) {
  if (predicted.size() != gold.size()) {
    throw ValidationError("boundary_f1: sequence count mismatch");
  }
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (predicted[s].size() != gold[s].size()) {
      throw ValidationError("boundary_f1: length mismatch in sequence " +
                            std::to_string(s));
    }
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const bool p = predicted[s][i] == kBoundary;
      const bool g = gold[s][i] == kBoundary;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace ctrs
