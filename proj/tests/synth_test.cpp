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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctrs/errors.hpp"
#include "ctrs/synth.hpp"
#include "ctrs/tagger.hpp"
#include "oracles.hpp"

namespace ctrs {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ctrs_synth_" + name);
  fs::remove_all(d);
  return d;
}

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig c = default_synth_config();
  c.n_sessions = 40;
  c.seed = seed;
  return c;
}

TEST(Synth, SameSeedSameBytes) {
  const fs::path a = fresh_dir("a"), b = fresh_dir("b"), other = fresh_dir("c");
  write_synth_outputs(a, small_config(5), generate_corpus(small_config(5)));
  write_synth_outputs(b, small_config(5), generate_corpus(small_config(5)));
  write_synth_outputs(other, small_config(6), generate_corpus(small_config(6)));
  for (const char* f : {"corpus.jsonl", "gold.jsonl", "labels.csv", "sentences.txt",
                        "config.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_NE(slurp(a / "corpus.jsonl"), slurp(other / "corpus.jsonl"));
}

TEST(Synth, SessionsAreValidAndTimed) {
  const SynthCorpus c = generate_corpus(small_config(1));
  ASSERT_EQ(c.gold.size(), 40u);
  ASSERT_EQ(c.high_quality.size(), 40u);
  for (const Session& s : c.gold) {
    EXPECT_NO_THROW(validate_session(s));
    ASSERT_TRUE(s.scores.has_value());
    double last = -1.0;
    for (const Turn& t : s.turns) {
      EXPECT_FALSE(t.segments.empty());
      for (const Token& tok : t.tokens) {
        EXPECT_GE(tok.start_s, last);
        EXPECT_GE(tok.end_s, tok.start_s);
        last = tok.end_s;
      }
      for (const Segment& seg : t.segments) {
        EXPECT_TRUE(seg.da.has_value());
        EXPECT_TRUE(seg.mc.has_value());
      }
    }
  }
}

TEST(Synth, GoldRoundTripsThroughCorpusFile) {
  const SynthCorpus c = generate_corpus(small_config(2));
  std::stringstream first;
  write_corpus(first, c.gold);
  const std::vector<Session> back = parse_corpus(first);
  std::stringstream second;
  write_corpus(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST(Synth, StripKeepsTokensAndScores) {
  const SynthCorpus c = generate_corpus(small_config(3));
  const auto raw = strip_annotations(c.gold);
  ASSERT_EQ(raw.size(), c.gold.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    EXPECT_EQ(raw[i].scores->values, c.gold[i].scores->values);
    ASSERT_EQ(raw[i].turns.size(), c.gold[i].turns.size());
    for (std::size_t t = 0; t < raw[i].turns.size(); ++t) {
      EXPECT_TRUE(raw[i].turns[t].segments.empty());
      EXPECT_EQ(raw[i].turns[t].tokens.size(), c.gold[i].turns[t].tokens.size());
    }
  }
  std::size_t turns = 0;
  for (const auto& s : c.gold) turns += s.turns.size();
  EXPECT_EQ(punctuated_turns(c.gold).size(), turns);
}

// With full strength and no noise, a rule's code is 6 when its latent is on
// and 0 when off.
TEST(Synth, FullStrengthRuleDeterminesCode) {
  SynthConfig cfg = small_config(4);
  cfg.label_noise = 0.0;
  for (auto& r : cfg.signal_rules) r.strength = 1.0;
  const SynthCorpus c = generate_corpus(cfg);
  for (std::size_t i = 0; i < c.gold.size(); ++i) {
    for (const auto& r : cfg.signal_rules) {
      const int v = c.gold[i].scores->values[code_index(r.code)];
      EXPECT_EQ(v, c.rule_latent[i] ? 6 : 0) << c.gold[i].id << " " << r.code;
    }
  }
}

TEST(Synth, ZeroStrengthRuleIsChance) {
  SynthConfig cfg = default_synth_config();
  cfg.n_sessions = 300;
  cfg.label_noise = 0.0;
  for (auto& r : cfg.signal_rules) r.strength = 0.0;
  const SynthCorpus c = generate_corpus(cfg);
  for (const auto& r : cfg.signal_rules) {
    int agree = 0;
    for (std::size_t i = 0; i < c.gold.size(); ++i) {
      const bool code_high = c.gold[i].scores->values[code_index(r.code)] >= kCodeHighThreshold;
      agree += code_high == c.rule_latent[i];
    }
    // Binomial(300, p) around its own mean; the score is independent of
    // the latent so agreement sits near P(high) * P(on) + P(low) * P(off).
    double p_high = 0.0, p_on = 0.0;
    for (std::size_t i = 0; i < c.gold.size(); ++i) {
      p_high += c.gold[i].scores->values[code_index(r.code)] >= kCodeHighThreshold;
      p_on += c.rule_latent[i];
    }
    p_high /= 300.0;
    p_on /= 300.0;
    const double expect = p_high * p_on + (1 - p_high) * (1 - p_on);
    EXPECT_NEAR(agree / 300.0, expect, 0.1) << r.code;
  }
}

// Keyword counts alone say nothing about the code; keyword counts inside
// utterances with the rule's tag say a lot.
TEST(Synth, RuleSignalOnlyVisibleInContext) {
  SynthConfig cfg = default_synth_config();
  cfg.n_sessions = 300;
  const SynthCorpus c = generate_corpus(cfg);
  for (const auto& r : cfg.signal_rules) {
    std::vector<double> plain, in_tag;
    std::vector<int> y;
    for (const Session& s : c.gold) {
      double n = 0, k = 0;
      for (const auto& u : tagged_utterances(s)) {
        for (const Token& t : u.utterance.tokens) {
          if (t.text != r.keyword) continue;
          ++n;
          if (u.mc && *u.mc == r.tag) ++k;
        }
      }
      plain.push_back(n);
      in_tag.push_back(k);
      y.push_back(s.scores->values[code_index(r.code)] >= kCodeHighThreshold);
    }
    EXPECT_LT(oracle::anova_f(plain, y), 10.0) << r.keyword;
    EXPECT_GT(oracle::anova_f(in_tag, y), 100.0) << r.keyword;
  }
}

TEST(SynthConfig, JsonRoundTrip) {
  const SynthConfig c = default_synth_config();
  EXPECT_EQ(SynthConfig::from_json(c.to_json()).to_json().dump(), c.to_json().dump());
  const SynthConfig partial = SynthConfig::from_json(Json{{"n_sessions", 7}});
  EXPECT_EQ(partial.n_sessions, 7);
  EXPECT_EQ(partial.signal_rules.size(), c.signal_rules.size());
}

TEST(SynthConfig, InvalidConfigsRejected) {
  EXPECT_THROW(SynthConfig::from_json(Json{{"n_sesions", 7}}), ValidationError);
  EXPECT_THROW(SynthConfig::from_json(Json{{"n_sessions", "many"}}), ValidationError);
  EXPECT_THROW(SynthConfig::from_json(Json::array()), ValidationError);

  SynthConfig c = default_synth_config();
  c.n_sessions = 0;
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = default_synth_config();
  c.signal_rules[0].tag = "XYZ";
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = default_synth_config();
  c.signal_rules[1].code = c.signal_rules[0].code;
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = default_synth_config();
  c.label_noise = 1.5;
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = default_synth_config();
  c.high_scores = {5, 3};
  EXPECT_THROW(validate_synth_config(c), ValidationError);
}

}  // namespace
}  // namespace ctrs
