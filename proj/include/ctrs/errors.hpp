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

#ifndef CTRS_ERRORS_HPP_
#define CTRS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ctrs {

// Base class for all library errors. The CLI maps each subclass to an exit
// code (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

// Input violates a documented invariant (bad role, bad times, bad flag combo).
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// Malformed record in a file. Carries the 1-based line number when known.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line = 0)
      : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what
                                 : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A required model or input artifact is absent or of the wrong kind.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Non-finite values or an optimizer failure.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace ctrs

#endif  // CTRS_ERRORS_HPP_
