// Copyright 2026 The adgen Authors.
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

#include "adgen/common/error.hpp"

namespace adgen {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateScale: return "DegenerateScale";
    case ErrorCode::kImageDecode: return "ImageDecode";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kBackendTimeout: return "BackendTimeout";
    case ErrorCode::kBackendFailure: return "BackendFailure";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kIllegalTransition: return "IllegalTransition";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kStorageFailure: return "StorageFailure";
    case ErrorCode::kQueueFull: return "QueueFull";
    case ErrorCode::kBadRequest: return "BadRequest";
    case ErrorCode::kImageFetchFailure: return "ImageFetchFailure";
    case ErrorCode::kCallbackFailure: return "CallbackFailure";
    case ErrorCode::kZeroBaseline: return "ZeroBaseline";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace adgen
