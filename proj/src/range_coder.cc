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

#include "softbit/range_coder.h"

#include <algorithm>

namespace softbit {

namespace {

constexpr uint32_t kTopValue = 1u << 24;

uint32_t SplitRange(uint32_t range, uint32_t prob_one) {
  return static_cast<uint32_t>((static_cast<uint64_t>(range) * prob_one) >>
                               kProbBits);
}

}  // namespace

uint32_t BinaryContextModel::ProbOne() const {
  const uint64_t p = (static_cast<uint64_t>(c1_) << kProbBits) / (c0_ + c1_);
  return static_cast<uint32_t>(
      std::clamp<uint64_t>(p, 1, kProbOne - 1));
}

void BinaryContextModel::Update(int bit) {
  if (bit) {
    ++c1_;
  } else {
    ++c0_;
  }
  if (c0_ + c1_ >= kCountLimit) {
    c0_ = (c0_ + 1) / 2;
    c1_ = (c1_ + 1) / 2;
  }
}

void RangeEncoder::Encode(int bit, uint32_t prob_one) {
  const uint32_t bound = SplitRange(range_, prob_one);
  if (bit) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  while (range_ < kTopValue) {
    range_ <<= 8;
    ShiftLow();
  }
}

void RangeEncoder::Encode(int bit, BinaryContextModel& model) {
  Encode(bit, model.ProbOne());
  model.Update(bit);
}

void RangeEncoder::ShiftLow() {
  if (static_cast<uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const uint8_t carry = static_cast<uint8_t>(low_ >> 32);
    uint8_t pending = cache_;
    do {
      const uint8_t byte = static_cast<uint8_t>(pending + carry);
      // The very first byte is the integer part of the code value, which
      // is always zero.
      if (first_byte_) {
        first_byte_ = false;
      } else {
        out_.push_back(byte);
      }
      pending = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<uint8_t> RangeEncoder::Finish() {
  // Any value in [low, low + range) identifies the codeword; pick the one
  // with the most trailing zero bytes. range >= 2^24 guarantees the
  // rounded value stays inside.
  low_ = (low_ + (kTopValue - 1)) & ~static_cast<uint64_t>(kTopValue - 1);
  ShiftLow();
  ShiftLow();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> payload)
    : payload_(payload) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
}

uint8_t RangeDecoder::NextByte() {
  if (pos_ < payload_.size()) return payload_[pos_++];
  ++overrun_;
  return 0;
}

int RangeDecoder::Decode(uint32_t prob_one) {
  const uint32_t bound = SplitRange(range_, prob_one);
  int bit;
  if (code_ < bound) {
    range_ = bound;
    bit = 1;
  } else {
    code_ -= bound;
    range_ -= bound;
    bit = 0;
  }
  while (range_ < kTopValue) {
    range_ <<= 8;
    code_ = (code_ << 8) | NextByte();
  }
  return bit;
}

int RangeDecoder::Decode(BinaryContextModel& model) {
  const int bit = Decode(model.ProbOne());
  model.Update(bit);
  return bit;
}

bool RangeDecoder::ExactlyConsumed() const {
  return pos_ == payload_.size() && overrun_ == kImplicitTailBytes;
}

}  // namespace softbit
