// Copyright 2026 The unimod Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unimod {

enum class ErrorCode {
  kInvalidNetwork,
  kParse,
  kNonInvariantFunction,
  kZeroMass,
  kNotMarkovian,
  kSupportMismatch,
  kZeroMassAtom,
  kInvariantMismatch,
  kMarginalDominationViolated,
  kMaxStagesExceeded,
  kIntensityMismatch,
  kBalanceFailed,
  kMarkCountMismatch,
  kNonConstantIntensity,
  kRootOutsideS,
  kSDisconnected,
  kImproperExtension,
  kNotMarkovianIntoS,
  kZeroClassIntensity,
  kBracketInvalid,
  kEvenLength,
  kCountOutOfRange,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidNetwork: return "InvalidNetwork";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kNonInvariantFunction: return "NonInvariantFunction";
    case ErrorCode::kZeroMass: return "ZeroMass";
    case ErrorCode::kNotMarkovian: return "NotMarkovian";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kZeroMassAtom: return "ZeroMassAtom";
    case ErrorCode::kInvariantMismatch: return "InvariantMismatch";
    case ErrorCode::kMarginalDominationViolated: return "MarginalDominationViolated";
    case ErrorCode::kMaxStagesExceeded: return "MaxStagesExceeded";
    case ErrorCode::kIntensityMismatch: return "IntensityMismatch";
    case ErrorCode::kBalanceFailed: return "BalanceFailed";
    case ErrorCode::kMarkCountMismatch: return "MarkCountMismatch";
    case ErrorCode::kNonConstantIntensity: return "NonConstantIntensity";
    case ErrorCode::kRootOutsideS: return "RootOutsideS";
    case ErrorCode::kSDisconnected: return "SDisconnected";
    case ErrorCode::kImproperExtension: return "ImproperExtension";
    case ErrorCode::kNotMarkovianIntoS: return "NotMarkovianIntoS";
    case ErrorCode::kZeroClassIntensity: return "ZeroClassIntensity";
    case ErrorCode::kBracketInvalid: return "BracketInvalid";
    case ErrorCode::kEvenLength: return "EvenLength";
    case ErrorCode::kCountOutOfRange: return "CountOutOfRange";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace unimod
