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

#ifndef SOFTBIT_STATUS_H_
#define SOFTBIT_STATUS_H_

#include <stdexcept>
#include <string>

namespace softbit {

// Every failure raised by the library carries one of these codes so callers
// (and tests) can tell apart e.g. a truncated payload from a bad magic.
enum class ErrorCode {
  kPrecondition,
  kIo,
  // Netpbm parsing.
  kMalformedHeader,
  kTruncatedPayload,
  kUnsupportedMaxval,
  // Bitstream / model file decoding.
  kBadMagic,
  kBadVersion,
  kTruncatedBitstream,
  kInconsistentBitstream,
  // Training.
  kNonFinite,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define SOFTBIT_CHECK(cond, msg)                                          \
  do {                                                                    \
    if (!(cond)) {                                                        \
      throw ::softbit::Error(::softbit::ErrorCode::kPrecondition,         \
                             std::string(msg) + " (" #cond ")");          \
    }                                                                     \
  } while (0)

}  // namespace softbit

#endif  // SOFTBIT_STATUS_H_
