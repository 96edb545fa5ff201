/*
 * Copyright 2026 The ovrlogit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ovrlogit {

// Identifies the failure class of an Error so callers can branch on it
// without parsing messages.
enum class ErrorCode {
  kMissingFile,
  kIo,
  kMalformedCsv,
  kNonNumericCell,
  kMissingLabelColumn,
  kNonFiniteValue,
  kEmptyDataset,
  kInvalidArgument,
  kDimensionMismatch,
  kZeroVariance,
  kDegenerateTargets,
  kNonFiniteLoss,
  kSingularSystem,
  kNotConverged,
  kWrongSolver,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "missing file";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kMalformedCsv: return "malformed csv";
    case ErrorCode::kNonNumericCell: return "non-numeric cell";
    case ErrorCode::kMissingLabelColumn: return "missing label column";
    case ErrorCode::kNonFiniteValue: return "non-finite value";
    case ErrorCode::kEmptyDataset: return "empty dataset";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kZeroVariance: return "zero variance";
    case ErrorCode::kDegenerateTargets: return "degenerate targets";
    case ErrorCode::kNonFiniteLoss: return "non-finite loss";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kNotConverged: return "not converged";
    case ErrorCode::kWrongSolver: return "wrong solver";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace ovrlogit
