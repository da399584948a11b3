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

#ifndef CTRS_SEGMENTER_HPP_
#define CTRS_SEGMENTER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctrs/corpus.hpp"
#include "ctrs/crf.hpp"

namespace ctrs {

inline constexpr double kDefaultPauseThreshold = 2.0;

// A pause-delimited run of tokens from one turn.
struct Fragment {
  std::vector<Token> tokens;
  Role speaker = Role::kTherapist;
  std::size_t turn_index = 0;
  std::size_t token_offset = 0;  // index of tokens[0] in the turn
};

struct Utterance {
  std::vector<Token> tokens;
  Role speaker = Role::kTherapist;
  std::size_t index_in_session = 0;
  std::size_t turn_index = 0;
  std::size_t token_offset = 0;
};

// Splits between tokens i and i+1 iff start(i+1) - end(i) > threshold.
std::vector<Fragment> pause_split(const Turn& turn,
                                  double threshold = kDefaultPauseThreshold,
                                  std::size_t turn_index = 0);

enum BoundaryLabel : int { kInside = 0, kBoundary = 1 };

struct BoundarySequence {
  std::vector<std::string> tokens;
  std::vector<int> labels;
};

// Strips sentence-final marks (. ? !) and labels the token before each mark
// BOUNDARY. Tokens are lowercased. Throws ValidationError on empty input.
BoundarySequence make_boundary_training_data(
    const std::vector<std::string>& punctuated_tokens);
BoundarySequence make_boundary_training_data(std::string_view punctuated_text);

// Window features for token i: lowercased current/previous/next token and a
// bucket of the position within the fragment.
std::vector<std::string> boundary_features(const std::vector<std::string>& tokens,
                                           std::size_t i);

class BoundaryModel {
 public:
  static const TagSet& label_set();  // [INSIDE, BOUNDARY]
  static constexpr std::string_view kTemplate =
      "bias; w0; w-1; w+1; position bucket {0,1,2,3-4,5-7,8-12,13+}";

  explicit BoundaryModel(ChainCrf crf);

  const ChainCrf& crf() const { return crf_; }
  std::vector<int> predict(const std::vector<std::string>& tokens) const;

  Json to_json() const;
  static BoundaryModel from_json(const Json& doc);

 private:
  ChainCrf crf_;
};

BoundaryModel train_boundary_model(const std::vector<BoundarySequence>& data,
                                   double l2, std::uint64_t seed,
                                   const MinimizeOptions& options = {});

// Utterances end at every BOUNDARY token and at the fragment's last token.
std::vector<Utterance> segment(const Fragment& fragment,
                               const BoundaryModel& model);

// Materializes utterance spans on every turn of the session. With no model,
// each pause fragment becomes one utterance. Existing tags are discarded.
void segment_session(Session& session, const BoundaryModel* model,
                     double pause_threshold = kDefaultPauseThreshold);

// Utterances of a session in order. Unsegmented turns count as one utterance.
std::vector<Utterance> session_utterances(const Session& session);

// F1 of the BOUNDARY class over all positions. Throws ValidationError on a
// length mismatch.
double boundary_f1(const std::vector<std::vector<int>>& predicted,
                   const std::vector<std::vector<int>>& gold);

}  // namespace ctrs

#endif  // CTRS_SEGMENTER_HPP_
