// Copyright 2026 The Polysub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLYSUB_ERROR_HPP_
#define POLYSUB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace polysub {

enum class ErrorCode {
  kEmptyInput,
  kLengthMismatch,
  kEmbeddingsNotLoaded,
  kLexiconNotLoaded,
  kDictionaryNotLoaded,
  kModeMismatch,
  kRemoteError,
  kBudgetExceeded,
  kEmptyDataset,
  kNoCandidates,
  kInvalidArgument,
  kParse,
  kIo,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmbeddingsNotLoaded: return "EmbeddingsNotLoaded";
    case ErrorCode::kLexiconNotLoaded: return "LexiconNotLoaded";
    case ErrorCode::kDictionaryNotLoaded: return "DictionaryNotLoaded";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kRemoteError: return "RemoteError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

// Base of every exception thrown by the library. The message is prefixed
// with the code name so that it surfaces in CLI output unchanged.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : Error(ErrorCode::kBudgetExceeded, what) {}
};

// status is the HTTP status code, or 0 when no response was received.
class RemoteError : public Error {
 public:
  RemoteError(int status, const std::string& what)
      : Error(ErrorCode::kRemoteError, what), status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace polysub

#endif  // POLYSUB_ERROR_HPP_
