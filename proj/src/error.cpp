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

#include "tkgqa/error.hpp"

namespace tkgqa {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MALFORMED_RECORD";
    case ErrorCode::kUnknownLocation: return "UNKNOWN_LOCATION";
    case ErrorCode::kIoError: return "IO_ERROR";
    case ErrorCode::kSchemaMismatch: return "SCHEMA_MISMATCH";
    case ErrorCode::kInvalidParams: return "INVALID_PARAMS";
    case ErrorCode::kBudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::kHorizonExhausted: return "HORIZON_EXHAUSTED";
    case ErrorCode::kNetworkError: return "NETWORK_ERROR";
    case ErrorCode::kParseFailure: return "PARSE_FAILURE";
    case ErrorCode::kRateLimited: return "RATE_LIMITED";
    case ErrorCode::kEmptyEvidence: return "EMPTY_EVIDENCE";
    case ErrorCode::kInsufficientCoverage: return "INSUFFICIENT_COVERAGE";
    case ErrorCode::kNoGoldLabel: return "NO_GOLD_LABEL";
    case ErrorCode::kLengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::kInvalidFormat: return "INVALID_FORMAT";
  }
  return "UNKNOWN";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedRecord:
    case ErrorCode::kUnknownLocation:
    case ErrorCode::kIoError:
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kInvalidParams:
    case ErrorCode::kInsufficientCoverage:
    case ErrorCode::kNoGoldLabel:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kInvalidFormat:
      return true;
    default:
      return false;
  }
}

}  // namespace tkgqa
