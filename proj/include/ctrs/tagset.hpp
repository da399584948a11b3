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

#ifndef CTRS_TAGSET_HPP_
#define CTRS_TAGSET_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctrs {

enum class Scheme { kDialogAct, kMiCode };

// An ordered, closed label inventory. Label order is the column order of the
// tag-count features and the tie-break order of every decoder.
class TagSet {
 public:
  static const TagSet& dialog_acts();
  static const TagSet& mi_codes();
  static const TagSet& for_scheme(Scheme scheme);

  // Arbitrary label set (used for the two-label boundary model).
  TagSet(std::string name, std::vector<std::string> labels);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  std::optional<std::size_t> find(std::string_view label) const;
  // Throws ValidationError naming the set when the label is unknown.
  std::size_t index_of(std::string_view label) const;

  bool operator==(const TagSet& other) const = default;

 private:
  std::string name_;
  std::vector<std::string> labels_;
};

std::string_view scheme_name(Scheme scheme);  // "DA" / "MC"
Scheme parse_scheme(std::string_view text);   // accepts da|mc|DA|MC

}  // namespace ctrs

#endif  // CTRS_TAGSET_HPP_
