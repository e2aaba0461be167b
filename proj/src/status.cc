// Copyright 2026 The Softbit Authors. All Rights Reserved.
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

#include "softbit/status.h"

namespace softbit {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPrecondition:
      return "precondition";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kMalformedHeader:
      return "malformed header";
    case ErrorCode::kTruncatedPayload:
      return "truncated payload";
    case ErrorCode::kUnsupportedMaxval:
      return "unsupported maxval";
    case ErrorCode::kBadMagic:
      return "bad magic";
    case ErrorCode::kBadVersion:
      return "bad version";
    case ErrorCode::kTruncatedBitstream:
      return "truncated bitstream";
    case ErrorCode::kInconsistentBitstream:
      return "inconsistent bitstream";
    case ErrorCode::kNonFinite:
      return "non-finite";
  }
  return "unknown";
}

}  // namespace softbit
