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

#ifndef CTRS_SYNTH_HPP_
#define CTRS_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ctrs/artifact.hpp"
#include "ctrs/corpus.hpp"

namespace ctrs {

// Phrase template: an utterance is one head word followed by filler words.
struct UtteranceTemplate {
  std::string name;
  std::string mc;  // MI code of utterances made from this template
  std::string da;  // dialog act
  std::vector<std::string> heads;
  std::pair<int, int> filler_words{3, 8};  // inclusive range
  double weight = 1.0;
  // Added to the weight in high-quality sessions, subtracted in low ones.
  double quality_shift = 0.0;
};

// A keyword placed m times per session, each time into an utterance tagged
// `tag` or `counter_tag`. The chance of `tag` is (1 + strength) / 2 when the
// session's rule latent is on and (1 - strength) / 2 when it is off; the keyword's
// overall count does not depend on quality. The affected code is scored from
// the realized in-`tag` rate. The partner utterance of each placement gets
// `counter_word` (or a filler word when empty), so both sides carry the same
// amount of text.
struct SignalRule {
  std::string keyword;
  std::string counter_word;
  std::string tag;          // MC tag
  std::string counter_tag;  // MC tag
  std::string code;
  double strength = 1.0;
  std::pair<int, int> occurrences{4, 8};
};

// A word whose count per session is Poisson(rate_high) or Poisson(rate_low).
struct UnigramRule {
  std::string word;
  double rate_high = 1.0;
  double rate_low = 1.0;
};

struct TimingConfig {
  std::pair<double, double> word_duration{0.2, 0.5};
  std::pair<double, double> word_gap{0.0, 0.15};
  std::pair<double, double> utterance_gap{0.1, 1.0};
  std::pair<double, double> long_pause{2.2, 4.0};
  double long_pause_probability = 0.1;  // per utterance boundary inside a turn
  std::pair<double, double> turn_gap{0.3, 1.5};
};

struct SynthConfig {
  int n_sessions = 300;
  std::uint64_t seed = 0;
  std::pair<int, int> therapist_utterances{40, 60};
  std::pair<int, int> utterances_per_turn{1, 4};
  std::pair<int, int> patient_utterances_per_turn{1, 2};
  int vocabulary_size = 600;
  double zipf_exponent = 1.0;
  std::vector<UtteranceTemplate> therapist_templates;
  std::vector<UtteranceTemplate> patient_templates;
  double incomplete_rate = 0.03;  // therapist utterances cut short
  std::vector<SignalRule> signal_rules;
  std::vector<UnigramRule> unigram_rules;
  double high_probability = 0.45;
  // Signal rules follow their own latent, equal to the session quality with
  // this probability and its negation otherwise. 1 ties rules to quality.
  double rule_latent_agreement = 0.75;
  std::pair<int, int> high_scores{3, 6};  // codes without a signal rule
  std::pair<int, int> low_scores{1, 4};
  double label_noise = 0.0;  // chance a code score is redrawn uniformly
  TimingConfig timing;
  double asr_dropout = 0.0;
  double asr_substitution = 0.0;

  Json to_json() const;
  static SynthConfig from_json(const Json& doc);
};

// Templates and rules used when no config file is given.
SynthConfig default_synth_config();

// Throws ValidationError on an out-of-range field, a tag missing from the
// therapist templates, or an unknown tag/code name.
void validate_synth_config(const SynthConfig& config);

struct SynthCorpus {
  std::vector<Session> gold;  // segmented, DA+MC tagged, scored
  std::vector<bool> high_quality;  // latent class per session
  std::vector<bool> rule_latent;
};

// Deterministic in config.seed.
SynthCorpus generate_corpus(const SynthConfig& config);

// Copy with segments and tags removed; scores kept.
std::vector<Session> strip_annotations(const std::vector<Session>& sessions);

// One line per turn, utterances ended with "?" (questions) or ".".
std::vector<std::string> punctuated_turns(const std::vector<Session>& gold);

// corpus.jsonl, gold.jsonl, labels.csv, sentences.txt and config.json.
void write_synth_outputs(const std::filesystem::path& dir, const SynthConfig& config,
                         const SynthCorpus& corpus);

}  // namespace ctrs

#endif  // CTRS_SYNTH_HPP_
