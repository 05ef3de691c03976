/* Copyright 2026 The gcgat Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gcgat {

// Every failure the library reports is one of these. The C API maps them onto
// its status codes, so the numbering of the first group matches the CLI exit
// codes.
enum class ErrorCode : int {
  kConfig = 2,
  kNonFiniteLoss = 3,
  kMissingGroundTruth = 4,
  kIndexOutOfRange = 5,
  kHorizonMismatch = 6,
  kIo = 7,
  kParse = 8,
  kFormat = 9,
  kVersionMismatch = 10,
  kShapeMismatch = 11,
  kLimitExceeded = 12,
  kDegenerateInput = 13,
  kTargetOffGraph = 14,
  kNonPositiveScale = 15,
  kKTooLarge = 16,
  kInvalidArgument = 17,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the trainer when a forward pass produces a NaN or infinite loss.
class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(std::int64_t step, std::size_t scene_index)
      : Error(ErrorCode::kNonFiniteLoss,
              "non-finite loss at step " + std::to_string(step) +
                  " (batch scene " + std::to_string(scene_index) + ")"),
        step_(step),
        scene_index_(scene_index) {}

  std::int64_t step() const noexcept { return step_; }
  std::size_t scene_index() const noexcept { return scene_index_; }

 private:
  std::int64_t step_;
  std::size_t scene_index_;
};

// Parse failures carry the 1-based line and the JSON-ish path of the field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& field_path,
             const std::string& what)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": field '" +
                                     field_path + "': " + what),
        line_(line),
        field_path_(field_path) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::size_t line_;
  std::string field_path_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace gcgat
