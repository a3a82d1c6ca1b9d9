// Copyright 2026 The tkgqa Authors
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

#ifndef TKGQA_ERROR_HPP_
#define TKGQA_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tkgqa {

enum class ErrorCode {
  kMalformedRecord,
  kUnknownLocation,
  kIoError,
  kSchemaMismatch,
  kInvalidParams,
  kBudgetExceeded,
  kHorizonExhausted,
  kNetworkError,
  kParseFailure,
  kRateLimited,
  kEmptyEvidence,
  kInsufficientCoverage,
  kNoGoldLabel,
  kLengthMismatch,
  kInvalidFormat,
};

std::string_view to_string(ErrorCode code) noexcept;

// True for codes caused by bad user input (files, flags, queries) rather
// than by a bug or an environment failure.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tkgqa

#endif  // TKGQA_ERROR_HPP_
