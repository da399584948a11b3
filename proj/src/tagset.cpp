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

#include "ctrs/tagset.hpp"

#include <set>

#include "ctrs/errors.hpp"

namespace ctrs {

TagSet::TagSet(std::string name, std::vector<std::string> labels)
    : name_(std::move(name)), labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("tag set " + name_ + " is empty");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) {
    throw ValidationError("tag set " + name_ + " has duplicate labels");
  }
}

const TagSet& TagSet::dialog_acts() {
  static const TagSet kSet("DA", {"Question", "Statement", "Agreement", "Other",
                                  "Appreciation", "Incomplete", "Backchannel"});
  return kSet;
}

// Simple and complex reflections (RES/REC) are merged into RE.
const TagSet& TagSet::mi_codes() {
  static const TagSet kSet("MC", {"FA", "GI", "RE", "QUC", "QUO", "MIA", "MIN"});
  return kSet;
}

const TagSet& TagSet::for_scheme(Scheme scheme) {
  return scheme == Scheme::kDialogAct ? dialog_acts() : mi_codes();
}

std::optional<std::size_t> TagSet::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t TagSet::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw ValidationError("label '" + std::string(label) + "' is not in tag set " +
                        name_);
}

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::kDialogAct ? "DA" : "MC";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "da" || text == "DA") return Scheme::kDialogAct;
  if (text == "mc" || text == "MC") return Scheme::kMiCode;
  throw ValidationError("unknown tag scheme '" + std::string(text) +
                        "' (expected da or mc)");
}

}  // namespace ctrs
