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

#ifndef PLANTED_ERROR_H_
#define PLANTED_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace planted {

enum class ErrorCode {
  kNonDivisible,
  kZeroSize,
  kInvalidParams,
  kEmptySet,
  kNonFinite,
  kRankOutOfRange,
  kSizeOutOfRange,
  kGraphTooSmall,
  kDegenerateGap,
  kDimensionMismatch,
  kEpsilonOutOfRange,
  kEmptyFamily,
  kInvalidConfig,
  kIo,
  kParse,
  kInvariant,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; `code()`
// identifies the failure class so callers (the CLI in particular) can map it
// to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Throws Error(kInvariant, ...) when `condition` is false.
void check_invariant(bool condition, std::string_view what);

}  // namespace planted

#endif  // PLANTED_ERROR_H_
