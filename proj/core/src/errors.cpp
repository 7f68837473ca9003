/*
 * Copyright 2026 The forster Authors.
 *
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

#include "forster/errors.hpp"

namespace forster {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kZeroVector: return "ZeroVector";
    case ErrorKind::kSingularTransform: return "SingularTransform";
    case ErrorKind::kNotPSD: return "NotPSD";
    case ErrorKind::kNotSymmetric: return "NotSymmetric";
    case ErrorKind::kAllEqual: return "AllEqual";
    case ErrorKind::kPreconditionViolated: return "PreconditionViolated";
    case ErrorKind::kEigenFailed: return "EigenFailed";
    case ErrorKind::kIterationCapExceeded: return "IterationCapExceeded";
    case ErrorKind::kNoDescent: return "NoDescent";
    case ErrorKind::kDoesNotSpan: return "DoesNotSpan";
    case ErrorKind::kGapTooSmall: return "GapTooSmall";
    case ErrorKind::kMaxRoundsExceeded: return "MaxRoundsExceeded";
    case ErrorKind::kRoundingOverflow: return "RoundingOverflow";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kNotSeparable: return "NotSeparable";
    case ErrorKind::kRoundBudgetExceeded: return "RoundBudgetExceeded";
    case ErrorKind::kBadSpec: return "BadSpec";
    case ErrorKind::kParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace forster
