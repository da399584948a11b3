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

#ifndef CTRS_TAGGER_HPP_
#define CTRS_TAGGER_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctrs/corpus.hpp"
#include "ctrs/crf.hpp"
#include "ctrs/segmenter.hpp"
#include "ctrs/tagset.hpp"

namespace ctrs {

struct TaggedUtterance {
  Utterance utterance;
  std::optional<std::string> da;
  std::optional<std::string> mc;
};

// Lowercased unigrams ("w=") and bigrams ("bg="), plus a length bucket.
std::vector<std::string> utterance_features(const std::vector<Token>& tokens);

// Multinomial logistic regression over utterance features. Decision is the
// argmax class score, ties to the lowest class index.
class UtteranceClassifier {
 public:
  UtteranceClassifier(TagSet tags, FeatureIndex features);

  const TagSet& tags() const { return tags_; }
  const FeatureIndex& features() const { return features_; }
  std::size_t num_params() const;
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::vector<double> scores(const Position& x) const;
  int predict(const Position& x) const;
  int predict(const std::vector<Token>& tokens) const;

  double l2 = 0.0;
  std::uint64_t seed = 0;
  TrainReport report;

  Json to_json() const;
  static UtteranceClassifier from_json(const Json& doc, const TagSet& expected);

 private:
  TagSet tags_;
  FeatureIndex features_;
  std::vector<double> params_;  // [weights (feature-major, F*K) | bias (K)]
};

struct LabeledUtterance {
  std::vector<Token> tokens;
  std::string label;
};

struct EncodedExample {
  Position x;
  int label = 0;
};

// Log-likelihood of the examples minus (l2 / 2) * ||weights||^2 (biases are
// not penalized), with its gradient.
LogLikGrad classifier_loglik_grad(const UtteranceClassifier& model,
                                  std::span<const EncodedExample> data, double l2);

// Throws ValidationError naming any tag-set class absent from the data.
UtteranceClassifier train_utterance_classifier(
    const std::vector<LabeledUtterance>& data, const TagSet& tags, double l2,
    std::uint64_t seed, const MinimizeOptions& options = {});

// Chain CRF over a session's utterance sequence.
ChainCrf train_session_crf(const std::vector<std::vector<LabeledUtterance>>& sessions,
                           const TagSet& tags, double l2, std::uint64_t seed,
                           const MinimizeOptions& options = {});

// Interface every utterance tagger implements; output has one tag index per
// input utterance, in order.
class UtteranceTagger {
 public:
  virtual ~UtteranceTagger() = default;
  virtual const TagSet& tags() const = 0;
  virtual std::vector<int> tag(const std::vector<Utterance>& utterances) const = 0;
  virtual Json to_json() const = 0;
};

class ChainTagger final : public UtteranceTagger {
 public:
  explicit ChainTagger(ChainCrf crf) : crf_(std::move(crf)) {}
  const TagSet& tags() const override { return crf_.tags(); }
  std::vector<int> tag(const std::vector<Utterance>& utterances) const override;
  Json to_json() const override { return crf_.to_json(); }
  const ChainCrf& crf() const { return crf_; }

 private:
  ChainCrf crf_;
};

class ClassifierTagger final : public UtteranceTagger {
 public:
  explicit ClassifierTagger(UtteranceClassifier model) : model_(std::move(model)) {}
  const TagSet& tags() const override { return model_.tags(); }
  std::vector<int> tag(const std::vector<Utterance>& utterances) const override;
  Json to_json() const override { return model_.to_json(); }
  const UtteranceClassifier& model() const { return model_; }

 private:
  UtteranceClassifier model_;
};

// DA decodes the whole interleaved utterance sequence jointly.
std::vector<TaggedUtterance> tag_da(const std::vector<Utterance>& utterances,
                                    const ChainCrf& model);
// MC tags each utterance independently.
std::vector<TaggedUtterance> tag_mc(const std::vector<Utterance>& utterances,
                                    const UtteranceClassifier& model);

// Loads a tagger model file and checks it was trained for `scheme`.
std::unique_ptr<UtteranceTagger> load_tagger(const Json& doc, Scheme scheme);
std::unique_ptr<UtteranceTagger> train_tagger(const std::vector<Session>& gold,
                                              Scheme scheme, double l2,
                                              std::uint64_t seed);

// Writes the tagger output into the session's segments. Segments are
// materialized first if the session is unsegmented.
void tag_session(Session& session, Scheme scheme, const UtteranceTagger& tagger);

// Utterances of a session with the tags stored on its segments.
std::vector<TaggedUtterance> tagged_utterances(const Session& session);
std::vector<TaggedUtterance> therapist_utterances(const Session& session);

// Gold training examples (utterance + tag) grouped per session.
std::vector<std::vector<LabeledUtterance>> gold_examples(
    const std::vector<Session>& sessions, Scheme scheme);

}  // namespace ctrs

#endif  // CTRS_TAGGER_HPP_
