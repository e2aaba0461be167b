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

#ifndef SOFTBIT_ENTROPY_CODEC_H_
#define SOFTBIT_ENTROPY_CODEC_H_

// Context-adaptive bitplane coding of quantization indices and the .sbc
// container.
//
// .sbc layout (little-endian, 24-byte header):
//   0  "SBC1"        magic
//   4  u8            version (1)
//   5  u8            bit depth b
//   6  u16           feature maps C
//   8  u32           padded image width  (multiple of 8)
//   12 u32           padded image height (multiple of 8)
//   16 u32           original image width
//   20 u32           original image height
//   24 ...           range-coded payload
// The feature grid is (padded width / 8) x (padded height / 8) x C.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "softbit/bitplane.h"
#include "softbit/quantizer.h"

namespace softbit {

constexpr uint8_t kBitstreamVersion = 1;
constexpr size_t kBitstreamHeaderSize = 24;
constexpr size_t kDownsampling = 8;

struct BitstreamHeader {
  uint8_t version = kBitstreamVersion;
  int bits = 0;
  size_t channels = 0;
  uint32_t padded_width = 0;
  uint32_t padded_height = 0;
  uint32_t original_width = 0;
  uint32_t original_height = 0;

  TensorShape GridShape() const {
    return {padded_width / kDownsampling, padded_height / kDownsampling,
            channels};
  }
  bool operator==(const BitstreamHeader&) const = default;
};

struct Bitstream {
  BitstreamHeader header;
  std::vector<uint8_t> payload;

  std::vector<uint8_t> Serialize() const;
  size_t SizeBytes() const { return kBitstreamHeaderSize + payload.size(); }
};

// Parses and validates the container; does not touch the payload.
Bitstream ParseBitstream(std::span<const uint8_t> bytes);

// Codes q as one codeword. The original image size defaults to the grid
// size times 8 (no padding).
Bitstream Encode(const QuantIndices& q);
Bitstream Encode(const QuantIndices& q, uint32_t original_width,
                 uint32_t original_height);

QuantIndices Decode(const Bitstream& bs);

// Observer for the encoder: called once per coded bit with its context and
// the model probability (16-bit fixed point) the bit was coded with.
using CodingTrace =
    std::function<void(const CodedBit& bit, uint32_t prob_one)>;
Bitstream Encode(const QuantIndices& q, uint32_t original_width,
                 uint32_t original_height, const CodingTrace& trace);

// (header + payload bits) / (original width * original height).
double ActualBpp(const Bitstream& bs);

}  // namespace softbit

#endif  // SOFTBIT_ENTROPY_CODEC_H_
