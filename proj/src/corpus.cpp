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

#include "ctrs/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "ctrs/errors.hpp"
#include "ctrs/tagset.hpp"

namespace ctrs {

using Json = nlohmann::ordered_json;

std::string_view role_name(Role role) {
  return role == Role::kTherapist ? "therapist" : "patient";
}

Role parse_role(std::string_view text) {
  if (text == "therapist") return Role::kTherapist;
  if (text == "patient") return Role::kPatient;
  throw ValidationError("unknown speaker role '" + std::string(text) + "'");
}

std::size_t code_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumCodes; ++i) {
    if (kCodeNames[i] == name) return i;
  }
  throw ValidationError("unknown CTRS code '" + std::string(name) + "'");
}

void validate_scores(const CodeScores& scores) {
  for (std::size_t i = 0; i < kNumCodes; ++i) {
    if (scores.values[i] < 0 || scores.values[i] > kMaxCodeScore) {
      throw ValidationError("score for " + std::string(kCodeNames[i]) + " is " +
                            std::to_string(scores.values[i]) +
                            ", outside [0, 6]");
    }
  }
}

int total_ctrs(const CodeScores& scores) {
  int total = 0;
  for (int v : scores.values) total += v;
  return total;
}

CodeLabels binarize_scores(const CodeScores& scores) {
  CodeLabels labels;
  for (std::size_t i = 0; i < kNumCodes; ++i) {
    labels.high[i] = scores.values[i] >= kCodeHighThreshold;
  }
  labels.total_high = total_ctrs(scores) >= kTotalHighThreshold;
  return labels;
}

namespace {

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}

void validate_segments(const Turn& turn, const std::string& where) {
  if (turn.segments.empty()) return;
  std::size_t expected = 0;
  for (const Segment& seg : turn.segments) {
    if (seg.begin != expected || seg.end <= seg.begin ||
        seg.end > turn.tokens.size()) {
      throw ValidationError(where + ": segments do not partition the turn");
    }
    if (seg.da) TagSet::dialog_acts().index_of(*seg.da);
    if (seg.mc) TagSet::mi_codes().index_of(*seg.mc);
    expected = seg.end;
  }
  if (expected != turn.tokens.size()) {
    throw ValidationError(where + ": segments do not cover the turn");
  }
}

}  // namespace

void validate_session(const Session& session) {
  if (session.id.empty()) throw ValidationError("session id is empty");
  for (std::size_t t = 0; t < session.turns.size(); ++t) {
    const Turn& turn = session.turns[t];
    const std::string where =
        "session " + session.id + " turn " + std::to_string(t);
    if (turn.tokens.empty()) throw ValidationError(where + ": no tokens");
    double prev_start = 0.0;
    for (std::size_t i = 0; i < turn.tokens.size(); ++i) {
      const Token& tok = turn.tokens[i];
      const std::string tw = where + " token " + std::to_string(i);
      if (tok.text.empty() || has_whitespace(tok.text)) {
        throw ValidationError(tw + ": text is empty or contains whitespace");
      }
      if (!std::isfinite(tok.start_s) || !std::isfinite(tok.end_s) ||
          tok.start_s < 0.0) {
        throw ValidationError(tw + ": invalid start time");
      }
      if (tok.end_s < tok.start_s) {
        throw ValidationError(tw + ": end_s < start_s");
      }
      if (i > 0 && tok.start_s < prev_start) {
        throw ValidationError(tw + ": tokens not ordered by start time");
      }
      prev_start = tok.start_s;
    }
    validate_segments(turn, where);
  }
  if (session.scores) validate_scores(*session.scores);
}

namespace {

template <typename T>
T required(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ParseError(where + ": field '" + key + "' has the wrong type");
  }
}

CodeScores scores_from_json(const Json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": scores must be an object");
  if (obj.size() != kNumCodes) {
    throw ValidationError(where +
                          ": scores must list all 11 codes or be omitted");
  }
  CodeScores scores;
  for (std::size_t i = 0; i < kNumCodes; ++i) {
    auto it = obj.find(std::string(kCodeNames[i]));
    if (it == obj.end()) {
      throw ValidationError(where + ": missing score for " +
                            std::string(kCodeNames[i]));
    }
    if (!it->is_number_integer()) {
      throw ValidationError(where + ": score for " +
                            std::string(kCodeNames[i]) + " is not an integer");
    }
    scores.values[i] = it->get<int>();
  }
  return scores;
}

Json scores_to_json(const CodeScores& scores) {
  Json obj = Json::object();
  for (std::size_t i = 0; i < kNumCodes; ++i) {
    obj[std::string(kCodeNames[i])] = scores.values[i];
  }
  return obj;
}

Session session_from_json(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ParseError(where + ": record is not an object");
  if (auto v = doc.find("format_version"); v != doc.end()) {
    if (!v->is_number_integer() || v->get<int>() != kFormatVersion) {
      throw ParseError(where + ": unsupported format_version");
    }
  }
  Session session;
  session.id = required<std::string>(doc, "id", where);
  auto turns = doc.find("turns");
  if (turns == doc.end() || !turns->is_array()) {
    throw ParseError(where + ": missing array 'turns'");
  }
  for (const Json& jt : *turns) {
    Turn turn;
    turn.speaker = parse_role(required<std::string>(jt, "speaker", where));
    auto toks = jt.find("tokens");
    if (toks == jt.end() || !toks->is_array()) {
      throw ParseError(where + ": turn without 'tokens' array");
    }
    for (const Json& jk : *toks) {
      Token tok;
      tok.text = required<std::string>(jk, "text", where);
      tok.start_s = required<double>(jk, "start_s", where);
      tok.end_s = required<double>(jk, "end_s", where);
      turn.tokens.push_back(std::move(tok));
    }
    if (auto segs = jt.find("segments"); segs != jt.end()) {
      if (!segs->is_array()) throw ParseError(where + ": 'segments' not array");
      for (const Json& js : *segs) {
        Segment seg;
        seg.begin = required<std::size_t>(js, "begin", where);
        seg.end = required<std::size_t>(js, "end", where);
        if (auto d = js.find("da"); d != js.end()) seg.da = d->get<std::string>();
        if (auto m = js.find("mc"); m != js.end()) seg.mc = m->get<std::string>();
        turn.segments.push_back(std::move(seg));
      }
    }
    session.turns.push_back(std::move(turn));
  }
  if (auto s = doc.find("scores"); s != doc.end() && !s->is_null()) {
    session.scores = scores_from_json(*s, where);
  }
  validate_session(session);
  return session;
}

Json session_to_json(const Session& session) {
  Json doc = Json::object();
  doc["format_version"] = kFormatVersion;
  doc["id"] = session.id;
  Json turns = Json::array();
  for (const Turn& turn : session.turns) {
    Json jt = Json::object();
    jt["speaker"] = std::string(role_name(turn.speaker));
    Json toks = Json::array();
    for (const Token& tok : turn.tokens) {
      toks.push_back(
          Json{{"text", tok.text}, {"start_s", tok.start_s}, {"end_s", tok.end_s}});
    }
    jt["tokens"] = std::move(toks);
    if (!turn.segments.empty()) {
      Json segs = Json::array();
      for (const Segment& seg : turn.segments) {
        Json js{{"begin", seg.begin}, {"end", seg.end}};
        if (seg.da) js["da"] = *seg.da;
        if (seg.mc) js["mc"] = *seg.mc;
        segs.push_back(std::move(js));
      }
      jt["segments"] = std::move(segs);
    }
    turns.push_back(std::move(jt));
  }
  doc["turns"] = std::move(turns);
  if (session.scores) doc["scores"] = scores_to_json(*session.scores);
  return doc;
}

}  // namespace

Session session_from_json_text(std::string_view line, int line_no) {
  Json doc;
  try {
    doc = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), line_no);
  }
  const std::string where =
      line_no > 0 ? "record on line " + std::to_string(line_no) : "record";
  return session_from_json(doc, where);
}

std::string session_to_json_text(const Session& session) {
  return session_to_json(session).dump();
}

namespace {

// An optional first line carrying the artifact envelope instead of a session.
bool is_header_line(const std::string& line) {
  if (line.find("\"kind\"") == std::string::npos) return false;
  Json doc;
  try {
    doc = Json::parse(line);
  } catch (const Json::parse_error&) {
    return false;
  }
  if (!doc.is_object() || doc.contains("id") || !doc.contains("kind")) return false;
  check_artifact(doc, "corpus");
  return true;
}

}  // namespace

std::vector<Session> parse_corpus(std::istream& in) {
  std::vector<Session> sessions;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (sessions.empty() && ids.empty() && is_header_line(line)) continue;
    Session s = session_from_json_text(line, line_no);
    if (!ids.insert(s.id).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate session id '" + s.id + "'");
    }
    sessions.push_back(std::move(s));
  }
  return sessions;
}

std::vector<Session> parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open corpus " + path.string());
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<Session>& sessions,
                  const Json* header) {
  if (header) out << header->dump() << '\n';
  for (const Session& s : sessions) out << session_to_json_text(s) << '\n';
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<Session>& sessions, const Json* header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_corpus(out, sessions, header);
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    std::size_t lead = cell.find_first_not_of(' ');
    cells.push_back(lead == std::string::npos ? "" : cell.substr(lead));
  }
  return cells;
}

}  // namespace

LabelTable parse_label_table(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::size_t> column_code;  // header column -> code index
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto header = split_row(line);
    if (header.empty() || header[0] != "id") {
      throw ParseError("label table header must start with 'id'", line_no);
    }
    std::set<std::size_t> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
      std::size_t idx = code_index(header[c]);
      if (!seen.insert(idx).second) {
        throw ParseError("duplicate column " + header[c], line_no);
      }
      column_code.push_back(idx);
    }
    if (column_code.size() != kNumCodes) {
      throw ParseError("label table must have all 11 code columns", line_no);
    }
    break;
  }
  if (column_code.empty()) throw ParseError("label table is empty");

  LabelTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_row(line);
    if (cells.size() != kNumCodes + 1) {
      throw ParseError("expected 12 columns, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    CodeScores scores;
    for (std::size_t c = 0; c < kNumCodes; ++c) {
      const std::string& cell = cells[c + 1];
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size()) {
        throw ParseError("score '" + cell + "' is not an integer", line_no);
      }
      scores.values[column_code[c]] = v;
    }
    try {
      validate_scores(scores);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!table.emplace(cells[0], scores).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate session id '" + cells[0] + "'");
    }
  }
  return table;
}

LabelTable parse_label_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open label table " + path.string());
  return parse_label_table(in);
}

void write_label_table(std::ostream& out, const LabelTable& table) {
  out << "id";
  for (auto name : kCodeNames) out << ',' << name;
  out << '\n';
  for (const auto& [id, scores] : table) {
    out << id;
    for (int v : scores.values) out << ',' << v;
    out << '\n';
  }
}

LabelTable labels_from_sessions(const std::vector<Session>& sessions) {
  LabelTable table;
  for (const Session& s : sessions) {
    if (s.scores) table.emplace(s.id, *s.scores);
  }
  return table;
}

void attach_labels(std::vector<Session>& sessions, const LabelTable& table) {
  for (Session& s : sessions) {
    if (auto it = table.find(s.id); it != table.end()) s.scores = it->second;
  }
}

void require_scores(const std::vector<Session>& sessions) {
  std::string missing;
  for (const Session& s : sessions) {
    if (!s.scores) missing += (missing.empty() ? "" : ", ") + s.id;
  }
  if (!missing.empty()) {
    throw ValidationError("sessions without scores: " + missing);
  }
}

}  // namespace ctrs
