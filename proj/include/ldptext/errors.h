//
// Copyright 2026 The ldptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LDPTEXT_ERRORS_H_
#define LDPTEXT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldptext {

// A parameter is outside its documented domain (non-positive temperature,
// k out of range, non-PD covariance, ...).
class InvalidParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Structurally bad input: length mismatches, empty corpora, missing ids.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidTemplateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File content that does not parse. line() is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NetworkTimeoutError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class VocabularyMismatchError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class MalformedResponseError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

// Wraps a scorer failure raised inside the decode loop.
class DecodeStepError : public std::runtime_error {
 public:
  DecodeStepError(int step, const std::string& what)
      : std::runtime_error("decode step " + std::to_string(step) + ": " + what),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace ldptext

#endif  // LDPTEXT_ERRORS_H_
