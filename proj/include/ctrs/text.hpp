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

#ifndef CTRS_TEXT_HPP_
#define CTRS_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace ctrs {

// ASCII lowercasing; bytes >= 0x80 pass through unchanged.
std::string to_lower(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

}  // namespace ctrs

#endif  // CTRS_TEXT_HPP_
