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

#ifndef FORSTER_ERRORS_HPP_
#define FORSTER_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace forster {

enum class ErrorKind {
  kZeroVector,
  kSingularTransform,
  kNotPSD,
  kNotSymmetric,
  kAllEqual,
  kPreconditionViolated,
  kEigenFailed,
  kIterationCapExceeded,
  kNoDescent,
  kDoesNotSpan,
  kGapTooSmall,
  kMaxRoundsExceeded,
  kRoundingOverflow,
  kDegenerateInput,
  kNotSeparable,
  kRoundBudgetExceeded,
  kBadSpec,
  kParseError,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every algorithmic failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the transform driver when the iteration cap is hit; carries the
// potential values of all accepted steps.
class IterationCapError : public Error {
 public:
  IterationCapError(const std::string& message, std::vector<double> trace)
      : Error(ErrorKind::kIterationCapExceeded, message),
        trace_(std::move(trace)) {}

  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace forster

#endif  // FORSTER_ERRORS_HPP_
