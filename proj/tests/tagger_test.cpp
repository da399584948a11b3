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

#include <gtest/gtest.h>

#include <random>

#include "ctrs/errors.hpp"
#include "ctrs/tagger.hpp"
#include "oracles.hpp"

namespace ctrs {
namespace {

std::vector<Token> tokens_of(const std::vector<std::string>& words) {
  std::vector<Token> out;
  double t = 0.0;
  for (const auto& w : words) {
    out.push_back({w, t, t + 0.3});
    t += 0.4;
  }
  return out;
}

Utterance utterance_of(const std::vector<std::string>& words) {
  Utterance u;
  u.tokens = tokens_of(words);
  return u;
}

// Each MC tag has a two-word cue; the rest of the utterance is noise.
const std::map<std::string, std::vector<std::string>>& mc_cues() {
  static const std::map<std::string, std::vector<std::string>> kCues = {
      {"FA", {"okay", "right"}},   {"GI", {"research", "shows"}},
      {"RE", {"sounds", "like"}},  {"QUC", {"did", "you"}},
      {"QUO", {"what", "brings"}}, {"MIA", {"great", "job"}},
      {"MIN", {"you", "must"}}};
  return kCues;
}

std::vector<LabeledUtterance> cue_corpus(std::mt19937_64& rng, int per_tag) {
  std::vector<LabeledUtterance> out;
  for (int r = 0; r < per_tag; ++r) {
    for (const auto& [tag, cue] : mc_cues()) {
      std::vector<std::string> words = cue;
      const int extra = 1 + static_cast<int>(rng() % 5);
      for (int i = 0; i < extra; ++i) words.push_back("n" + std::to_string(rng() % 40));
      out.push_back({tokens_of(words), tag});
    }
  }
  return out;
}

TEST(TagSets, SevenLabelsEach) {
  EXPECT_EQ(TagSet::dialog_acts().labels(),
            (std::vector<std::string>{"Question", "Statement", "Agreement", "Other",
                                      "Appreciation", "Incomplete", "Backchannel"}));
  EXPECT_EQ(TagSet::mi_codes().labels(),
            (std::vector<std::string>{"FA", "GI", "RE", "QUC", "QUO", "MIA", "MIN"}));
  EXPECT_THROW(TagSet::mi_codes().index_of("RES"), ValidationError);
}

TEST(UtteranceFeatures, UnigramsBigramsAndLength) {
  const auto f = utterance_features(tokens_of({"Did", "you"}));
  EXPECT_EQ(f, (std::vector<std::string>{"w=did", "w=you", "bg=did_you", "len=2"}));
}

TEST(Classifier, ZeroWeightsPredictFirstTag) {
  UtteranceClassifier m(TagSet::mi_codes(), FeatureIndex({"w=a", "w=b"}));
  EXPECT_EQ(m.predict(tokens_of({"a", "b", "c"})), 0);
  const auto tagged = tag_mc({utterance_of({"a"}), utterance_of({"b"})}, m);
  for (const auto& t : tagged) EXPECT_EQ(*t.mc, "FA");
}

TEST(Classifier, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> w(0.0, 0.8);
  std::uniform_real_distribution<double> v(-1.0, 2.0);
  for (int rep = 0; rep < 40; ++rep) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const int f = 1 + static_cast<int>(rng() % 5);
    std::vector<std::string> labels, names;
    for (int i = 0; i < k; ++i) labels.push_back("t" + std::to_string(i));
    for (int i = 0; i < f; ++i) names.push_back("f" + std::to_string(i));
    UtteranceClassifier model(TagSet("toy", labels), FeatureIndex(names));
    for (double& p : model.params()) p = w(rng);
    std::vector<EncodedExample> data(6);
    for (auto& ex : data) {
      for (int j = 0; j < f; ++j)
        if (rng() % 2) ex.x.push_back({j, v(rng)});
      ex.label = static_cast<int>(rng() % static_cast<unsigned>(k));
    }
    const auto lg = classifier_loglik_grad(model, data, 0.4);
    UtteranceClassifier probe = model;
    auto objective = [&](const std::vector<double>& x) {
      std::copy(x.begin(), x.end(), probe.params().begin());
      return classifier_loglik_grad(probe, data, 0.4).objective;
    };
    const std::vector<double> x(model.params().begin(), model.params().end());
    EXPECT_LT(oracle::max_relative_error(lg.gradient,
                                         oracle::central_differences(objective, x)),
              1e-5);
  }
}

TEST(Classifier, PlantedCuesRecoveredOnHeldOutData) {
  std::mt19937_64 rng(73);
  const auto train = cue_corpus(rng, 30);
  const auto test = cue_corpus(rng, 30);
  const auto m = train_utterance_classifier(train, TagSet::mi_codes(), 1.0, 4);
  EXPECT_TRUE(m.report.converged) << m.report.stop_reason;
  int total = 0, right = 0;
  for (const auto& ex : test) {
    if (ex.label != "RE" && ex.label != "QUC") continue;
    ++total;
    right += TagSet::mi_codes().label(m.predict(ex.tokens)) == ex.label;
  }
  EXPECT_GE(static_cast<double>(right) / total, 0.95);
}

TEST(Classifier, MissingClassNamed) {
  std::mt19937_64 rng(79);
  auto data = cue_corpus(rng, 3);
  std::erase_if(data, [](const LabeledUtterance& u) { return u.label == "MIA"; });
  try {
    train_utterance_classifier(data, TagSet::mi_codes(), 1.0, 0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("MIA"), std::string::npos);
  }
}

TEST(Classifier, DeterministicAndRoundTrips) {
  std::mt19937_64 rng(83);
  const auto data = cue_corpus(rng, 5);
  const auto a = train_utterance_classifier(data, TagSet::mi_codes(), 1.0, 2);
  const auto b = train_utterance_classifier(data, TagSet::mi_codes(), 1.0, 2);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  const auto back = UtteranceClassifier::from_json(a.to_json(), TagSet::mi_codes());
  EXPECT_EQ(back.to_json().dump(), a.to_json().dump());
  EXPECT_THROW(UtteranceClassifier::from_json(a.to_json(), TagSet::dialog_acts()),
               MissingArtifactError);
}

// Sessions alternating questions and answers; the DA of each utterance
// is cued by its first word.
std::vector<std::vector<LabeledUtterance>> da_sessions(std::mt19937_64& rng, int n) {
  static const std::vector<std::pair<std::string, std::string>> kCue = {
      {"Question", "why"},     {"Statement", "i"},         {"Agreement", "yes"},
      {"Other", "anyway"},     {"Appreciation", "thanks"}, {"Incomplete", "so"},
      {"Backchannel", "mhm"}};
  std::vector<std::vector<LabeledUtterance>> out;
  for (int s = 0; s < n; ++s) {
    auto& session = out.emplace_back();
    const int len = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < len; ++i) {
      const auto& [tag, cue] = kCue[rng() % kCue.size()];
      std::vector<std::string> words = {cue};
      for (int j = static_cast<int>(rng() % 4); j > 0; --j)
        words.push_back("z" + std::to_string(rng() % 15));
      session.push_back({tokens_of(words), tag});
    }
  }
  return out;
}

TEST(DaTagger, SingleUtteranceIsEmissionArgmax) {
  std::mt19937_64 rng(89);
  const ChainCrf crf = train_session_crf(da_sessions(rng, 40), TagSet::dialog_acts(), 1.0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const Utterance u = utterance_of({"z" + std::to_string(rep % 15), "why"});
    const auto tagged = tag_da({u}, crf);
    ASSERT_EQ(tagged.size(), 1u);
    std::vector<std::string> feats = utterance_features(u.tokens);
    feats.emplace_back("bias");
    const ScoreMatrix e = crf.emission_scores({crf.features().encode(feats)});
    Eigen::Index best;
    e.row(0).maxCoeff(&best);
    EXPECT_EQ(*tagged[0].da, TagSet::dialog_acts().label(static_cast<std::size_t>(best)));
  }
}

TEST(DaTagger, MatchesBruteForceOnShortSessions) {
  std::mt19937_64 rng(97);
  const ChainCrf crf = train_session_crf(da_sessions(rng, 60), TagSet::dialog_acts(), 2.0, 1);
  for (const auto& session : da_sessions(rng, 30)) {
    if (session.size() > 6) continue;
    std::vector<Utterance> utts;
    std::vector<Position> positions;
    for (const auto& u : session) {
      Utterance x;
      x.tokens = u.tokens;
      utts.push_back(x);
      auto feats = utterance_features(u.tokens);
      feats.emplace_back("bias");
      positions.push_back(crf.features().encode(feats));
    }
    const auto tagged = tag_da(utts, crf);
    ASSERT_EQ(tagged.size(), utts.size());
    const auto best = oracle::enumerate_chain(crf.emission_scores(positions),
                                              crf.transition_matrix());
    for (std::size_t i = 0; i < utts.size(); ++i)
      EXPECT_EQ(*tagged[i].da, TagSet::dialog_acts().label(
                                   static_cast<std::size_t>(best.best_path[i])));
  }
}

TEST(DaTagger, SeparableCuesFitTrainingSet) {
  std::mt19937_64 rng(101);
  const auto data = da_sessions(rng, 50);
  const ChainCrf crf = train_session_crf(data, TagSet::dialog_acts(), 0.1, 1);
  for (const auto& session : data) {
    std::vector<Utterance> utts;
    for (const auto& u : session) utts.push_back(utterance_of({}));
    for (std::size_t i = 0; i < session.size(); ++i) utts[i].tokens = session[i].tokens;
    const auto tagged = tag_da(utts, crf);
    for (std::size_t i = 0; i < session.size(); ++i) EXPECT_EQ(*tagged[i].da, session[i].label);
  }
}

TEST(DaTagger, EmptySessionGivesEmptyList) {
  std::mt19937_64 rng(103);
  const ChainCrf crf = train_session_crf(da_sessions(rng, 10), TagSet::dialog_acts(), 1.0, 1);
  EXPECT_TRUE(tag_da({}, crf).empty());
}

TEST(LoadTagger, SchemeChecked) {
  std::mt19937_64 rng(107);
  const ChainCrf crf = train_session_crf(da_sessions(rng, 10), TagSet::dialog_acts(), 1.0, 1);
  EXPECT_NO_THROW(load_tagger(crf.to_json(), Scheme::kDialogAct));
  EXPECT_THROW(load_tagger(crf.to_json(), Scheme::kMiCode), MissingArtifactError);
  EXPECT_THROW(load_tagger(Json{{"kind", "feature_space"}}, Scheme::kMiCode),
               MissingArtifactError);
}

TEST(TagSession, TagsEveryUtterance) {
  std::mt19937_64 rng(109);
  const auto m = train_utterance_classifier(cue_corpus(rng, 10), TagSet::mi_codes(), 1.0, 0);
  Session s;
  s.id = "a";
  Turn t;
  t.tokens = tokens_of({"sounds", "like", "x", "did", "you"});
  t.segments = {{0, 3, {}, {}}, {3, 5, {}, {}}};
  s.turns.push_back(t);
  tag_session(s, Scheme::kMiCode, ClassifierTagger(m));
  const auto tagged = tagged_utterances(s);
  ASSERT_EQ(tagged.size(), 2u);
  EXPECT_EQ(*tagged[0].mc, "RE");
  EXPECT_EQ(*tagged[1].mc, "QUC");
  EXPECT_THROW(tag_session(s, Scheme::kDialogAct, ClassifierTagger(m)), MissingArtifactError);
}

}  // namespace
}  // namespace ctrs
