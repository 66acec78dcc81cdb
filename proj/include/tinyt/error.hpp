// Copyright 2026 The TinyT Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace tinyt {

enum class ErrorCode {
  kMalformedXml,
  kUnsupportedConstruct,
  kIndexOutOfRange,
  kSinkFailure,
  kCycleDetected,
  kInvalidGrammar,
  kRankOverflow,
  kIdOverflow,
  kBadMagic,
  kVersionMismatch,
  kTruncatedFile,
  kChecksumMismatch,
  kIoError,
  kInvalidNodeId,
  kSyntaxError,
  kUnsupportedFeature,
  kNondeterministicAutomaton,
  kTextIndexOverflow,
  kInternal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Errors that point at a position in textual input (XML bytes, XPath text).
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, const std::string& message)
      : Error(code, message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace tinyt
