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

#include "ctrs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "ctrs/errors.hpp"
#include "ctrs/parallel.hpp"
#include "ctrs/tagset.hpp"

namespace ctrs {

namespace {

using Range = std::pair<int, int>;
using RealRange = std::pair<double, double>;

Json range_json(const Range& r) { return Json::array({r.first, r.second}); }
Json range_json(const RealRange& r) { return Json::array({r.first, r.second}); }

template <typename T>
std::pair<T, T> range_from(const Json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) {
    throw ValidationError(std::string("synth config: ") + key + " must be [lo, hi]");
  }
  return {j[0].get<T>(), j[1].get<T>()};
}

Json template_json(const UtteranceTemplate& t) {
  return Json{{"name", t.name},
              {"mc", t.mc},
              {"da", t.da},
              {"heads", t.heads},
              {"filler_words", range_json(t.filler_words)},
              {"weight", t.weight},
              {"quality_shift", t.quality_shift}};
}

UtteranceTemplate template_from(const Json& j) {
  UtteranceTemplate t;
  t.name = j.at("name").get<std::string>();
  t.mc = j.at("mc").get<std::string>();
  t.da = j.at("da").get<std::string>();
  t.heads = j.at("heads").get<std::vector<std::string>>();
  if (j.contains("filler_words"))
    t.filler_words = range_from<int>(j["filler_words"], "filler_words");
  t.weight = j.value("weight", 1.0);
  t.quality_shift = j.value("quality_shift", 0.0);
  return t;
}

template <typename T>
void check_range(const std::pair<T, T>& r, T lo, const std::string& what) {
  if (!(r.first >= lo && r.second >= r.first)) {
    throw ValidationError("synth config: invalid range for " + what);
  }
}

void check_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError("synth config: " + what + " must be in [0, 1]");
  }
}

void check_word(const std::string& w, const std::string& what) {
  if (w.empty() || std::any_of(w.begin(), w.end(), [](unsigned char c) {
        return std::isspace(c) || c == '|' || c == '.' || c == '?' || c == '!';
      })) {
    throw ValidationError("synth config: bad " + what + " '" + w + "'");
  }
}

// Pronounceable pseudo-words: consonant-vowel syllables indexed in base 70.
std::vector<std::string> make_vocabulary(int size, const std::set<std::string>& reserved) {
  static constexpr std::string_view kC = "bdfgklmnprstvz";
  static constexpr std::string_view kV = "aeiou";
  const std::size_t n_syll = kC.size() * kV.size();
  auto syllable = [&](std::size_t s) {
    return std::string{kC[s / kV.size()], kV[s % kV.size()]};
  };
  std::vector<std::string> words;
  for (std::size_t i = 0; words.size() < static_cast<std::size_t>(size); ++i) {
    std::string w = syllable(i % n_syll) + syllable((i / n_syll) % n_syll);
    for (std::size_t rest = i / (n_syll * n_syll); rest > 0; rest /= n_syll)
      w += syllable((rest - 1) % n_syll);
    if (!reserved.count(w)) words.push_back(std::move(w));
  }
  return words;
}

struct PlannedUtterance {
  std::size_t templ = 0;
  std::vector<std::string> extras;  // words inserted after the head
};

int uniform(std::mt19937_64& rng, const Range& r) {
  return std::uniform_int_distribution<int>(r.first, r.second)(rng);
}

// Milliseconds, so times serialize exactly.
long uniform_ms(std::mt19937_64& rng, const RealRange& r) {
  return std::uniform_int_distribution<long>(std::lround(r.first * 1000.0),
                                             std::lround(r.second * 1000.0))(rng);
}

bool bernoulli(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

class Generator {
 public:
  explicit Generator(const SynthConfig& config) : config_(config) {
    std::set<std::string> reserved;
    for (const auto* list : {&config.therapist_templates, &config.patient_templates})
      for (const auto& t : *list) reserved.insert(t.heads.begin(), t.heads.end());
    for (const auto& r : config.signal_rules) {
      reserved.insert(r.keyword);
      if (!r.counter_word.empty()) reserved.insert(r.counter_word);
    }
    for (const auto& r : config.unigram_rules) reserved.insert(r.word);
    vocabulary_ = make_vocabulary(config.vocabulary_size, reserved);
    std::vector<double> zipf;
    for (std::size_t r = 0; r < vocabulary_.size(); ++r)
      zipf.push_back(1.0 / std::pow(static_cast<double>(r + 1), config.zipf_exponent));
    filler_dist_ = std::discrete_distribution<std::size_t>(zipf.begin(), zipf.end());
  }

  Session session(std::size_t index, bool& high, bool& rule_on) const {
    std::mt19937_64 rng(derive_seed(config_.seed, index));
    high = bernoulli(rng, config_.high_probability);
    rule_on = bernoulli(rng, config_.rule_latent_agreement) ? high : !high;
    const auto& ther = config_.therapist_templates;

    std::vector<PlannedUtterance> plan;
    std::map<std::string, double> rule_rate;
    for (const SignalRule& rule : config_.signal_rules) {
      const int m = uniform(rng, rule.occurrences);
      const double p_tag =
          rule_on ? (1.0 + rule.strength) / 2.0 : (1.0 - rule.strength) / 2.0;
      int in_tag = 0;
      for (int j = 0; j < m; ++j) {
        PlannedUtterance a{pick_for_tag(rng, ther, rule.tag), {}};
        PlannedUtterance b{pick_for_tag(rng, ther, rule.counter_tag), {}};
        const std::string other =
            rule.counter_word.empty() ? filler(rng) : rule.counter_word;
        if (bernoulli(rng, p_tag)) {
          a.extras.push_back(rule.keyword);
          b.extras.push_back(other);
          ++in_tag;
        } else {
          a.extras.push_back(other);
          b.extras.push_back(rule.keyword);
        }
        plan.push_back(std::move(a));
        plan.push_back(std::move(b));
      }
      rule_rate[rule.code] = static_cast<double>(in_tag) / static_cast<double>(m);
    }
    const int n_total = uniform(rng, config_.therapist_utterances);
    std::vector<double> weights;
    for (const auto& t : ther)
      weights.push_back(std::max(0.0, t.weight + (high ? 1.0 : -1.0) * t.quality_shift));
    std::discrete_distribution<std::size_t> pick_free(weights.begin(), weights.end());
    while (plan.size() < static_cast<std::size_t>(n_total)) plan.push_back({pick_free(rng), {}});

    for (const UnigramRule& rule : config_.unigram_rules) {
      const int count = std::poisson_distribution<int>(high ? rule.rate_high
                                                            : rule.rate_low)(rng);
      for (int c = 0; c < count; ++c) {
        const std::size_t at =
            std::uniform_int_distribution<std::size_t>(0, plan.size() - 1)(rng);
        plan[at].extras.push_back(rule.word);
      }
    }
    std::shuffle(plan.begin(), plan.end(), rng);

    Session s;
    char id[32];
    std::snprintf(id, sizeof id, "s%04zu", index);
    s.id = id;

    std::vector<double> patient_weights;
    for (const auto& t : config_.patient_templates) patient_weights.push_back(t.weight);
    std::discrete_distribution<std::size_t> pick_patient(patient_weights.begin(),
                                                         patient_weights.end());
    long clock_ms = 0;
    std::size_t next = 0;
    while (next < plan.size()) {
      const int n = std::min<int>(uniform(rng, config_.utterances_per_turn),
                                  static_cast<int>(plan.size() - next));
      Turn turn;
      turn.speaker = Role::kTherapist;
      for (int u = 0; u < n; ++u, ++next)
        add_utterance(rng, turn, ther[plan[next].templ], plan[next].extras, true);
      place_turn(rng, turn, clock_ms, s.turns.empty());
      s.turns.push_back(std::move(turn));

      Turn reply;
      reply.speaker = Role::kPatient;
      const int n_reply = uniform(rng, config_.patient_utterances_per_turn);
      for (int u = 0; u < n_reply; ++u)
        add_utterance(rng, reply, config_.patient_templates[pick_patient(rng)], {}, false);
      place_turn(rng, reply, clock_ms, false);
      s.turns.push_back(std::move(reply));
    }

    CodeScores scores;
    for (std::size_t c = 0; c < kNumCodes; ++c) {
      auto it = rule_rate.find(std::string(kCodeNames[c]));
      int v = 0;
      if (it != rule_rate.end()) {
        v = std::min(kMaxCodeScore, static_cast<int>(std::floor(7.0 * it->second)));
      } else {
        v = uniform(rng, high ? config_.high_scores : config_.low_scores);
      }
      if (bernoulli(rng, config_.label_noise)) v = uniform(rng, {0, kMaxCodeScore});
      scores.values[c] = v;
    }
    s.scores = scores;
    return s;
  }

 private:
  std::size_t pick_for_tag(std::mt19937_64& rng, const std::vector<UtteranceTemplate>& ts,
                           const std::string& mc) const {
    std::vector<std::size_t> idx;
    std::vector<double> w;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i].mc == mc) {
        idx.push_back(i);
        w.push_back(ts[i].weight);
      }
    }
    std::discrete_distribution<std::size_t> d(w.begin(), w.end());
    return idx[d(rng)];
  }

  std::string filler(std::mt19937_64& rng) const {
    return vocabulary_[filler_dist_(rng)];
  }

  // Words of one utterance appended to the turn as a new tagged segment.
  void add_utterance(std::mt19937_64& rng, Turn& turn, const UtteranceTemplate& t,
                     const std::vector<std::string>& extras, bool therapist) const {
    std::vector<std::string> words;
    words.push_back(t.heads[std::uniform_int_distribution<std::size_t>(
        0, t.heads.size() - 1)(rng)]);
    const int n_fill = uniform(rng, t.filler_words);
    for (int i = 0; i < n_fill; ++i) words.push_back(filler(rng));
    std::string da = t.da;
    if (therapist && extras.empty() && bernoulli(rng, config_.incomplete_rate)) {
      words.resize(std::min<std::size_t>(words.size(), 1 + uniform(rng, {0, 1})));
      da = "Incomplete";
    }
    for (const auto& e : extras) {
      const auto at = std::uniform_int_distribution<std::size_t>(1, words.size())(rng);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), e);
    }
    if (config_.asr_dropout > 0.0 || config_.asr_substitution > 0.0) {
      std::vector<std::string> noisy{words.front()};
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (bernoulli(rng, config_.asr_dropout)) continue;
        noisy.push_back(bernoulli(rng, config_.asr_substitution) ? filler(rng) : words[i]);
      }
      words = std::move(noisy);
    }
    Segment seg;
    seg.begin = turn.tokens.size();
    for (auto& w : words) turn.tokens.push_back(Token{std::move(w), 0.0, 0.0});
    seg.end = turn.tokens.size();
    seg.da = da;
    seg.mc = t.mc;
    turn.segments.push_back(std::move(seg));
  }

  void place_turn(std::mt19937_64& rng, Turn& turn, long& clock_ms, bool first) const {
    const TimingConfig& tc = config_.timing;
    if (!first) clock_ms += uniform_ms(rng, tc.turn_gap);
    for (std::size_t s = 0; s < turn.segments.size(); ++s) {
      const Segment& seg = turn.segments[s];
      if (s > 0) {
        clock_ms += bernoulli(rng, tc.long_pause_probability)
                        ? uniform_ms(rng, tc.long_pause)
                        : uniform_ms(rng, tc.utterance_gap);
      }
      for (std::size_t i = seg.begin; i < seg.end; ++i) {
        if (i > seg.begin) clock_ms += uniform_ms(rng, tc.word_gap);
        Token& tok = turn.tokens[i];
        tok.start_s = static_cast<double>(clock_ms) / 1000.0;
        clock_ms += uniform_ms(rng, tc.word_duration);
        tok.end_s = static_cast<double>(clock_ms) / 1000.0;
      }
    }
  }

  const SynthConfig& config_;
  std::vector<std::string> vocabulary_;
  // Stateless between draws; mutable only because operator() is non-const.
  mutable std::discrete_distribution<std::size_t> filler_dist_;
};

}  // namespace

Json SynthConfig::to_json() const {
  Json ther = Json::array(), pat = Json::array(), rules = Json::array(),
       unigrams = Json::array();
  for (const auto& t : therapist_templates) ther.push_back(template_json(t));
  for (const auto& t : patient_templates) pat.push_back(template_json(t));
  for (const auto& r : signal_rules) {
    rules.push_back(Json{{"keyword", r.keyword},
                         {"counter_word", r.counter_word},
                         {"tag", r.tag},
                         {"counter_tag", r.counter_tag},
                         {"code", r.code},
                         {"strength", r.strength},
                         {"occurrences", range_json(r.occurrences)}});
  }
  for (const auto& r : unigram_rules) {
    unigrams.push_back(
        Json{{"word", r.word}, {"rate_high", r.rate_high}, {"rate_low", r.rate_low}});
  }
  return Json{{"n_sessions", n_sessions},
              {"seed", seed},
              {"therapist_utterances", range_json(therapist_utterances)},
              {"utterances_per_turn", range_json(utterances_per_turn)},
              {"patient_utterances_per_turn", range_json(patient_utterances_per_turn)},
              {"vocabulary_size", vocabulary_size},
              {"zipf_exponent", zipf_exponent},
              {"therapist_templates", std::move(ther)},
              {"patient_templates", std::move(pat)},
              {"incomplete_rate", incomplete_rate},
              {"signal_rules", std::move(rules)},
              {"unigram_rules", std::move(unigrams)},
              {"high_probability", high_probability},
              {"rule_latent_agreement", rule_latent_agreement},
              {"high_scores", range_json(high_scores)},
              {"low_scores", range_json(low_scores)},
              {"label_noise", label_noise},
              {"timing",
               Json{{"word_duration", range_json(timing.word_duration)},
                    {"word_gap", range_json(timing.word_gap)},
                    {"utterance_gap", range_json(timing.utterance_gap)},
                    {"long_pause", range_json(timing.long_pause)},
                    {"long_pause_probability", timing.long_pause_probability},
                    {"turn_gap", range_json(timing.turn_gap)}}},
              {"asr_dropout", asr_dropout},
              {"asr_substitution", asr_substitution}};
}

SynthConfig SynthConfig::from_json(const Json& doc) {
  // Missing keys keep their defaults, so a config may override only a few.
  SynthConfig c = default_synth_config();
  if (!doc.is_object()) throw ValidationError("synth config: expected a JSON object");
  const Json known = c.to_json();
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ValidationError("synth config: unknown key '" + key + "'");
  }
  try {
    if (doc.contains("n_sessions")) c.n_sessions = doc["n_sessions"].get<int>();
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    for (auto [key, field] : {std::pair{"therapist_utterances", &c.therapist_utterances},
                              std::pair{"utterances_per_turn", &c.utterances_per_turn},
                              std::pair{"patient_utterances_per_turn",
                                        &c.patient_utterances_per_turn},
                              std::pair{"high_scores", &c.high_scores},
                              std::pair{"low_scores", &c.low_scores}}) {
      if (doc.contains(key)) *field = range_from<int>(doc[key], key);
    }
    if (doc.contains("vocabulary_size")) c.vocabulary_size = doc["vocabulary_size"].get<int>();
    if (doc.contains("zipf_exponent")) c.zipf_exponent = doc["zipf_exponent"].get<double>();
    if (doc.contains("therapist_templates")) {
      c.therapist_templates.clear();
      for (const auto& t : doc["therapist_templates"])
        c.therapist_templates.push_back(template_from(t));
    }
    if (doc.contains("patient_templates")) {
      c.patient_templates.clear();
      for (const auto& t : doc["patient_templates"])
        c.patient_templates.push_back(template_from(t));
    }
    if (doc.contains("incomplete_rate")) c.incomplete_rate = doc["incomplete_rate"].get<double>();
    if (doc.contains("signal_rules")) {
      c.signal_rules.clear();
      for (const auto& r : doc["signal_rules"]) {
        SignalRule rule;
        rule.keyword = r.at("keyword").get<std::string>();
        rule.counter_word = r.value("counter_word", std::string());
        rule.tag = r.at("tag").get<std::string>();
        rule.counter_tag = r.at("counter_tag").get<std::string>();
        rule.code = r.at("code").get<std::string>();
        rule.strength = r.value("strength", 1.0);
        if (r.contains("occurrences"))
          rule.occurrences = range_from<int>(r["occurrences"], "occurrences");
        c.signal_rules.push_back(std::move(rule));
      }
    }
    if (doc.contains("unigram_rules")) {
      c.unigram_rules.clear();
      for (const auto& r : doc["unigram_rules"]) {
        c.unigram_rules.push_back({r.at("word").get<std::string>(),
                                   r.value("rate_high", 1.0), r.value("rate_low", 1.0)});
      }
    }
    if (doc.contains("high_probability"))
      c.high_probability = doc["high_probability"].get<double>();
    c.rule_latent_agreement = doc.value("rule_latent_agreement", c.rule_latent_agreement);
    if (doc.contains("label_noise")) c.label_noise = doc["label_noise"].get<double>();
    if (doc.contains("timing")) {
      const Json& t = doc["timing"];
      for (auto [key, field] :
           {std::pair{"word_duration", &c.timing.word_duration},
            std::pair{"word_gap", &c.timing.word_gap},
            std::pair{"utterance_gap", &c.timing.utterance_gap},
            std::pair{"long_pause", &c.timing.long_pause},
            std::pair{"turn_gap", &c.timing.turn_gap}}) {
        if (t.contains(key)) *field = range_from<double>(t[key], key);
      }
      c.timing.long_pause_probability =
          t.value("long_pause_probability", c.timing.long_pause_probability);
    }
    if (doc.contains("asr_dropout")) c.asr_dropout = doc["asr_dropout"].get<double>();
    if (doc.contains("asr_substitution"))
      c.asr_substitution = doc["asr_substitution"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synth config: ") + e.what());
  }
  validate_synth_config(c);
  return c;
}

SynthConfig default_synth_config() {
  SynthConfig c;
  c.therapist_templates = {
      {"ack", "FA", "Backchannel", {"mhm", "uhhuh", "okay", "alright"}, {0, 1}, 0.8, 0.0},
      {"agree", "FA", "Agreement", {"right", "sure", "exactly", "absolutely"}, {0, 2}, 0.6, 0.0},
      {"inform", "GI", "Statement",
       {"typically", "research", "generally", "usually", "studies", "often"}, {5, 10}, 1.5, -0.3},
      {"reflect", "RE", "Statement", {"sounds", "seems", "feels", "hearing", "noticing"},
       {4, 9}, 1.2, 0.3},
      {"closed", "QUC", "Question", {"did", "is", "are", "do", "can", "have"}, {3, 7}, 1.0, 0.0},
      {"open", "QUO", "Question", {"what", "how", "why", "tell", "describe", "where"},
       {4, 8}, 1.0, 0.3},
      {"affirm", "MIA", "Appreciation", {"great", "wonderful", "excellent", "impressive"},
       {1, 4}, 0.6, 0.0},
      {"direct", "MIN", "Other", {"should", "must", "stop", "warn", "never"}, {3, 7}, 0.5,
       -0.3},
  };
  c.patient_templates = {
      {"p-statement", "GI", "Statement", {"i", "my", "we", "it", "they", "well"}, {3, 10}, 3.0, 0.0},
      {"p-agree", "FA", "Agreement", {"yeah", "yep", "true"}, {0, 2}, 1.0, 0.0},
      {"p-backchannel", "FA", "Backchannel", {"uh", "hmm", "um"}, {0, 1}, 0.5, 0.0},
      {"p-question", "QUC", "Question", {"wouldnt", "couldnt", "shouldnt"}, {3, 6}, 0.4, 0.0},
      {"p-other", "MIN", "Other", {"anyway", "whatever"}, {1, 4}, 0.3, 0.0},
  };
  c.signal_rules = {
      {"homework", "exercise", "QUC", "RE", "hw", 0.8, {4, 8}},
      {"agenda", "topics", "QUO", "GI", "ag", 0.8, {4, 8}},
      {"feedback", "comments", "MIA", "MIN", "fb", 0.8, {4, 8}},
      {"thoughts", "beliefs", "RE", "QUC", "cb", 0.8, {4, 8}},
  };
  c.unigram_rules = {
      {"progress", 2.5, 1.0},
      {"plan", 2.5, 1.0},
      {"skills", 2.5, 1.0},
  };
  c.therapist_utterances = {80, 120};
  c.utterances_per_turn = {2, 5};
  c.label_noise = 0.05;
  return c;
}

void validate_synth_config(const SynthConfig& c) {
  if (c.n_sessions < 1) throw ValidationError("synth config: n_sessions must be >= 1");
  if (c.vocabulary_size < 10) {
    throw ValidationError("synth config: vocabulary_size must be >= 10");
  }
  check_range(c.therapist_utterances, 1, "therapist_utterances");
  check_range(c.utterances_per_turn, 1, "utterances_per_turn");
  check_range(c.patient_utterances_per_turn, 1, "patient_utterances_per_turn");
  check_range(c.high_scores, 0, "high_scores");
  check_range(c.low_scores, 0, "low_scores");
  if (c.high_scores.second > kMaxCodeScore || c.low_scores.second > kMaxCodeScore) {
    throw ValidationError("synth config: scores must not exceed 6");
  }
  check_unit(c.high_probability, "high_probability");
  check_unit(c.rule_latent_agreement, "rule_latent_agreement");
  check_unit(c.label_noise, "label_noise");
  check_unit(c.incomplete_rate, "incomplete_rate");
  check_unit(c.asr_dropout, "asr_dropout");
  check_unit(c.asr_substitution, "asr_substitution");
  check_unit(c.timing.long_pause_probability, "long_pause_probability");
  for (auto [r, name] : {std::pair{&c.timing.word_duration, "word_duration"},
                         std::pair{&c.timing.word_gap, "word_gap"},
                         std::pair{&c.timing.utterance_gap, "utterance_gap"},
                         std::pair{&c.timing.long_pause, "long_pause"},
                         std::pair{&c.timing.turn_gap, "turn_gap"}}) {
    check_range(*r, 0.0, name);
  }
  if (c.timing.word_duration.first <= 0.0) {
    throw ValidationError("synth config: word durations must be positive");
  }

  const TagSet& mc = TagSet::mi_codes();
  const TagSet& da = TagSet::dialog_acts();
  std::set<std::string> mc_seen, da_seen;
  if (c.incomplete_rate > 0.0) da_seen.insert("Incomplete");
  for (const auto* list : {&c.therapist_templates, &c.patient_templates}) {
    if (list->empty()) throw ValidationError("synth config: empty template list");
    for (const auto& t : *list) {
      if (mc.find(t.mc) < 0 || da.find(t.da) < 0) {
        throw ValidationError("synth config: template '" + t.name + "' has unknown tags");
      }
      if (t.heads.empty()) {
        throw ValidationError("synth config: template '" + t.name + "' has no heads");
      }
      for (const auto& h : t.heads) check_word(h, "head word");
      check_range(t.filler_words, 0, "filler_words of " + t.name);
      if (!(t.weight >= 0.0)) throw ValidationError("synth config: negative weight");
      if (list == &c.therapist_templates) mc_seen.insert(t.mc);
      da_seen.insert(t.da);
    }
  }
  for (const auto& label : mc.labels()) {
    if (!mc_seen.count(label)) {
      throw ValidationError("synth config: no therapist template for MC tag " + label);
    }
  }
  for (const auto& label : da.labels()) {
    if (!da_seen.count(label)) {
      throw ValidationError("synth config: no template for DA tag " + label);
    }
  }
  std::set<std::string> rule_codes;
  for (const auto& r : c.signal_rules) {
    check_word(r.keyword, "keyword");
    if (!r.counter_word.empty()) check_word(r.counter_word, "counter word");
    if (r.counter_word == r.keyword) {
      throw ValidationError("synth config: counter word equals keyword '" + r.keyword + "'");
    }
    if (mc.find(r.tag) < 0 || mc.find(r.counter_tag) < 0 || r.tag == r.counter_tag) {
      throw ValidationError("synth config: rule '" + r.keyword + "' needs two distinct MC tags");
    }
    code_index(r.code);
    if (!rule_codes.insert(r.code).second) {
      throw ValidationError("synth config: two rules affect code " + r.code);
    }
    check_unit(r.strength, "strength of '" + r.keyword + "'");
    check_range(r.occurrences, 1, "occurrences of '" + r.keyword + "'");
  }
  for (const auto& r : c.unigram_rules) {
    check_word(r.word, "unigram word");
    if (!(r.rate_high >= 0.0 && r.rate_low >= 0.0)) {
      throw ValidationError("synth config: unigram rates must be non-negative");
    }
  }
}

SynthCorpus generate_corpus(const SynthConfig& config) {
  validate_synth_config(config);
  const Generator gen(config);
  SynthCorpus out;
  out.gold.reserve(static_cast<std::size_t>(config.n_sessions));
  for (std::size_t i = 0; i < static_cast<std::size_t>(config.n_sessions); ++i) {
    bool high = false, rule_on = false;
    out.gold.push_back(gen.session(i, high, rule_on));
    out.high_quality.push_back(high);
    out.rule_latent.push_back(rule_on);
  }
  return out;
}

std::vector<Session> strip_annotations(const std::vector<Session>& sessions) {
  std::vector<Session> out = sessions;
  for (Session& s : out)
    for (Turn& t : s.turns) t.segments.clear();
  return out;
}

std::vector<std::string> punctuated_turns(const std::vector<Session>& gold) {
  std::vector<std::string> lines;
  for (const Session& s : gold) {
    for (const Turn& t : s.turns) {
      std::string line;
      for (const Segment& seg : t.segments) {
        for (std::size_t i = seg.begin; i < seg.end; ++i) {
          if (!line.empty()) line += ' ';
          line += t.tokens[i].text;
        }
        line += seg.da && *seg.da == "Question" ? " ?" : " .";
      }
      if (!line.empty()) lines.push_back(std::move(line));
    }
  }
  return lines;
}

void write_synth_outputs(const std::filesystem::path& dir, const SynthConfig& config,
                         const SynthCorpus& corpus) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create " + dir.string() + ": " + ec.message());
  const Json header = artifact_envelope("corpus", config.seed);
  write_corpus(dir / "corpus.jsonl", strip_annotations(corpus.gold), &header);
  write_corpus(dir / "gold.jsonl", corpus.gold, &header);
  {
    std::ofstream out(dir / "labels.csv", std::ios::binary);
    if (!out) throw ValidationError("cannot write " + (dir / "labels.csv").string());
    write_label_table(out, labels_from_sessions(corpus.gold));
  }
  {
    std::ofstream out(dir / "sentences.txt", std::ios::binary);
    if (!out) throw ValidationError("cannot write " + (dir / "sentences.txt").string());
    for (const auto& line : punctuated_turns(corpus.gold)) out << line << '\n';
  }
  Json doc = artifact_envelope("synth_config", config.seed);
  doc["config"] = config.to_json();
  write_json_file(dir / "config.json", doc);
}

}  // namespace ctrs
