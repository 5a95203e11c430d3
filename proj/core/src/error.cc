// Copyright 2026 The planted Authors
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

#include "planted/error.h"

#include <string>

namespace planted {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonDivisible: return "NonDivisible";
    case ErrorCode::kZeroSize: return "ZeroSize";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kRankOutOfRange: return "RankOutOfRange";
    case ErrorCode::kSizeOutOfRange: return "SizeOutOfRange";
    case ErrorCode::kGraphTooSmall: return "GraphTooSmall";
    case ErrorCode::kDegenerateGap: return "DegenerateGap";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::kEmptyFamily: return "EmptyFamily";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kInvariant: return "Invariant";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void check_invariant(bool condition, std::string_view what) {
  if (!condition) {
    throw Error(ErrorCode::kInvariant, std::string(what));
  }
}

}  // namespace planted
