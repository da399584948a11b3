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

#ifndef CTRS_ARTIFACT_HPP_
#define CTRS_ARTIFACT_HPP_

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

namespace ctrs {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolName = "ctrscode";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Every model and feature-space file is a JSON object with the same envelope:
//   {"format_version": 1, "kind": ..., "created_by": {...}, ...payload}
// The envelope carries no wall-clock time so identical runs produce identical
// bytes.
Json artifact_envelope(std::string_view kind, std::uint64_t seed);

// Throws MissingArtifactError if the envelope is absent or its kind differs.
void check_artifact(const Json& doc, std::string_view expected_kind);

void write_json_file(const std::filesystem::path& path, const Json& doc);
Json read_json_file(const std::filesystem::path& path);

}  // namespace ctrs

#endif  // CTRS_ARTIFACT_HPP_
