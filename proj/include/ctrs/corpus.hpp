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

#ifndef CTRS_CORPUS_HPP_
#define CTRS_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctrs/artifact.hpp"

namespace ctrs {

inline constexpr int kFormatVersion = 1;

enum class Role { kTherapist, kPatient };

std::string_view role_name(Role role);
Role parse_role(std::string_view text);  // throws ValidationError

struct Token {
  std::string text;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const Token&) const = default;
};

// A materialized utterance span [begin, end) inside one turn, with the tags
// assigned to it. Spans of a turn partition its tokens in order.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<std::string> da;
  std::optional<std::string> mc;

  std::size_t size() const { return end - begin; }
  bool operator==(const Segment&) const = default;
};

struct Turn {
  Role speaker = Role::kTherapist;
  std::vector<Token> tokens;
  std::vector<Segment> segments;  // empty until segmented

  bool operator==(const Turn&) const = default;
};

// The eleven CTRS codes, in the canonical column order.
enum class Code { ag, at, co, fb, gd, hw, ip, cb, pt, sc, un };
inline constexpr std::size_t kNumCodes = 11;
inline constexpr std::array<std::string_view, kNumCodes> kCodeNames = {
    "ag", "at", "co", "fb", "gd", "hw", "ip", "cb", "pt", "sc", "un"};

// A code is "high" at or above this score; the session total is "high" at or
// above kTotalHighThreshold.
inline constexpr int kCodeHighThreshold = 4;
inline constexpr int kTotalHighThreshold = 40;
inline constexpr int kMaxCodeScore = 6;

std::size_t code_index(std::string_view name);  // throws ValidationError

struct CodeScores {
  std::array<int, kNumCodes> values{};

  int operator[](Code c) const { return values[static_cast<std::size_t>(c)]; }
  bool operator==(const CodeScores&) const = default;
};

struct CodeLabels {
  std::array<bool, kNumCodes> high{};
  bool total_high = false;

  bool operator==(const CodeLabels&) const = default;
};

struct Session {
  std::string id;
  std::vector<Turn> turns;
  std::optional<CodeScores> scores;

  bool operator==(const Session&) const = default;
};

// Throws ValidationError if any score is outside [0, 6].
void validate_scores(const CodeScores& scores);

int total_ctrs(const CodeScores& scores);
CodeLabels binarize_scores(const CodeScores& scores);

// Checks every Token/Turn/Segment invariant. Throws ValidationError.
void validate_session(const Session& session);

// Line-delimited JSON: one session per line. Blank lines are skipped. The
// first line may instead be an artifact envelope of kind "corpus".
std::vector<Session> parse_corpus(std::istream& in);
std::vector<Session> parse_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<Session>& sessions,
                  const Json* header = nullptr);
void write_corpus(const std::filesystem::path& path,
                  const std::vector<Session>& sessions, const Json* header = nullptr);

Session session_from_json_text(std::string_view line, int line_no = 0);
std::string session_to_json_text(const Session& session);

// Delimited label table: header "id,ag,at,...,un", one row per session.
using LabelTable = std::map<std::string, CodeScores>;
LabelTable parse_label_table(std::istream& in);
LabelTable parse_label_table(const std::filesystem::path& path);
void write_label_table(std::ostream& out, const LabelTable& table);

// Scores embedded in the sessions themselves. Sessions without scores are
// skipped.
LabelTable labels_from_sessions(const std::vector<Session>& sessions);

// Replaces each session's scores with the table entry. Sessions missing from
// the table keep what they had.
void attach_labels(std::vector<Session>& sessions, const LabelTable& table);

// Training operations need every session scored; throws ValidationError
// listing the unscored ids.
void require_scores(const std::vector<Session>& sessions);

}  // namespace ctrs

#endif  // CTRS_CORPUS_HPP_
