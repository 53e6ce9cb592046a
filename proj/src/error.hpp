// Copyright 2026 The SynGen Authors. All Rights Reserved.
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
// =============================================================================

#ifndef SYNGEN_ERROR_HPP_
#define SYNGEN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace syngen {

// Failure categories. The C API maps these one-to-one onto syngen_status.
enum class ErrorKind {
  kDimension,
  kDegenerateMask,
  kRank,
  kDeterminism,
  kIncompleteBackward,
  kParse,
  kValidation,
  kIncompleteGold,
  kRange,
  kConfiguration,
  kEmptyInput,
  kPrecondition,
  kAlignment,
  kIncompatible,
  kDiverged,
  kIo,
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kDegenerateMask: return "degenerate mask";
    case ErrorKind::kRank: return "rank error";
    case ErrorKind::kDeterminism: return "determinism error";
    case ErrorKind::kIncompleteBackward: return "incomplete backward";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kIncompleteGold: return "incomplete gold";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kEmptyInput: return "empty input";
    case ErrorKind::kPrecondition: return "precondition error";
    case ErrorKind::kAlignment: return "alignment error";
    case ErrorKind::kIncompatible: return "incompatibility error";
    case ErrorKind::kDiverged: return "diverged training";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

}  // namespace syngen

#endif  // SYNGEN_ERROR_HPP_
