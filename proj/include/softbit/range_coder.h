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

#ifndef SOFTBIT_RANGE_CODER_H_
#define SOFTBIT_RANGE_CODER_H_

// Adaptive binary range coder.
//
// The coder keeps a 32-bit range and a 33-bit low (the extra bit catches
// carries). A bit is coded by splitting the range at
//   bound = (range * P) >> 16,
// where P is the 16-bit fixed-point probability of a one: ones take
// [low, low + bound), zeros take the rest. Bytes are shifted out whenever
// range drops below 2^24; pending 0xFF bytes are held back until a carry
// resolves them.
//
// Stream framing: the leading byte of the classic construction is always
// zero and is not emitted, and the final low is rounded up to a multiple of
// 2^24 so its three trailing zero bytes can be left implicit. The decoder
// therefore reads exactly three bytes past the end of the payload, all of
// which it treats as zero; any other overrun means the payload was cut.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace softbit {

constexpr uint32_t kProbBits = 16;
constexpr uint32_t kProbOne = 1u << kProbBits;
constexpr uint32_t kCountLimit = 1024;

// Count-based adaptive probability for one context.
class BinaryContextModel {
 public:
  // 16-bit fixed-point P(bit = 1), clamped to [1, 2^16 - 1].
  uint32_t ProbOne() const;
  void Update(int bit);

  uint32_t c0() const { return c0_; }
  uint32_t c1() const { return c1_; }

 private:
  uint32_t c0_ = 1;
  uint32_t c1_ = 1;
};

class RangeEncoder {
 public:
  // Codes `bit` with P(bit = 1) = prob_one / 2^16.
  void Encode(int bit, uint32_t prob_one);
  // Codes through an adaptive model and updates it.
  void Encode(int bit, BinaryContextModel& model);

  // Terminates the codeword; the encoder must not be used afterwards.
  std::vector<uint8_t> Finish();

 private:
  void ShiftLow();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  bool first_byte_ = true;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> payload);

  int Decode(uint32_t prob_one);
  int Decode(BinaryContextModel& model);

  // Bytes requested beyond the payload so far (returned as zero).
  size_t overrun() const { return overrun_; }
  size_t consumed() const { return pos_; }
  // True if decoding ended exactly where the encoder's Finish() put it.
  bool ExactlyConsumed() const;

 private:
  uint8_t NextByte();

  std::span<const uint8_t> payload_;
  size_t pos_ = 0;
  size_t overrun_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

// Implicit zero bytes the decoder reads past a well-formed payload.
constexpr size_t kImplicitTailBytes = 3;

}  // namespace softbit

#endif  // SOFTBIT_RANGE_CODER_H_
