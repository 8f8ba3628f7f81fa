// Copyright (c) 2026 The Datafarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace df {

// Stable error codes. The numeric values ride the data-plane status byte
// and the names ride the control-plane ERR lines, so order must not change.
enum class ErrorCode : uint8_t {
  kOk = 0,
  kDuplicateName,
  kGapInFragmentIndices,
  kEmptyFragmentSet,
  kUnknownFile,
  kChecksumMismatch,
  kUnknownFragmentIndex,
  kLastReplica,
  kUnknownReplica,
  kCorruptRecord,
  kExists,
  kDiskFull,
  kIoFailure,
  kNotFound,
  kRangeError,
  kBadMagic,
  kCrcMismatch,
  kUnknownCollection,
  kInconsistentDirectory,
  kDivisionByZero,
  kUnterminatedBlock,
  kMalformedDirective,
  kValidationFailed,
  kTemplateNotFound,
  kNoDestination,
  kCatalogUnreachable,
  kPartialFailure,
  kNoNodesAvailable,
  kZeroRate,
  kUnknownNode,
  kProtocol,
  kInvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kGapInFragmentIndices: return "GapInFragmentIndices";
    case ErrorCode::kEmptyFragmentSet: return "EmptyFragmentSet";
    case ErrorCode::kUnknownFile: return "UnknownFile";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kUnknownFragmentIndex: return "UnknownFragmentIndex";
    case ErrorCode::kLastReplica: return "LastReplica";
    case ErrorCode::kUnknownReplica: return "UnknownReplica";
    case ErrorCode::kCorruptRecord: return "CorruptRecord";
    case ErrorCode::kExists: return "Exists";
    case ErrorCode::kDiskFull: return "DiskFull";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kCrcMismatch: return "CrcMismatch";
    case ErrorCode::kUnknownCollection: return "UnknownCollection";
    case ErrorCode::kInconsistentDirectory: return "InconsistentDirectory";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kUnterminatedBlock: return "UnterminatedBlock";
    case ErrorCode::kMalformedDirective: return "MalformedDirective";
    case ErrorCode::kValidationFailed: return "ValidationFailed";
    case ErrorCode::kTemplateNotFound: return "TemplateNotFound";
    case ErrorCode::kNoDestination: return "NoDestination";
    case ErrorCode::kCatalogUnreachable: return "CatalogUnreachable";
    case ErrorCode::kPartialFailure: return "PartialFailure";
    case ErrorCode::kNoNodesAvailable: return "NoNodesAvailable";
    case ErrorCode::kZeroRate: return "ZeroRate";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kProtocol: return "Protocol";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

inline ErrorCode error_code_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kInvalidArgument); ++i) {
    auto code = static_cast<ErrorCode>(i);
    if (name == to_string(code)) return code;
  }
  return ErrorCode::kProtocol;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace df
