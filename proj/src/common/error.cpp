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

#include "common/error.hpp"

namespace gcgat {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kHorizonMismatch: return "HorizonMismatch";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLimitExceeded: return "LimitExceeded";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kTargetOffGraph: return "TargetOffGraph";
    case ErrorCode::kNonPositiveScale: return "NonPositiveScale";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace gcgat
