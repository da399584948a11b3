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

#include "ctrs/artifact.hpp"

#include <fstream>

#include "ctrs/corpus.hpp"
#include "ctrs/errors.hpp"

namespace ctrs {

Json artifact_envelope(std::string_view kind, std::uint64_t seed) {
  Json doc = Json::object();
  doc["format_version"] = kFormatVersion;
  doc["kind"] = std::string(kind);
  doc["created_by"] = Json{{"tool", std::string(kToolName)},
                           {"version", std::string(kToolVersion)},
                           {"seed", seed}};
  return doc;
}

void check_artifact(const Json& doc, std::string_view expected_kind) {
  if (!doc.is_object() || !doc.contains("format_version") ||
      !doc.contains("kind")) {
    throw MissingArtifactError("not a ctrscode artifact");
  }
  if (doc["format_version"] != kFormatVersion) {
    throw MissingArtifactError("unsupported artifact format_version");
  }
  const auto kind = doc["kind"].get<std::string>();
  if (kind != expected_kind) {
    throw MissingArtifactError("expected a " + std::string(expected_kind) +
                               " artifact, found " + kind);
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace ctrs
