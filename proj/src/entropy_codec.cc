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

#include "softbit/entropy_codec.h"

#include <array>
#include <cstring>
#include <string>

#include "softbit/range_coder.h"
#include "softbit/status.h"

namespace softbit {

namespace {

constexpr char kMagic[4] = {'S', 'B', 'C', '1'};

void PutU16(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t GetU16(std::span<const uint8_t> b, size_t pos) {
  return b[pos] | (static_cast<uint32_t>(b[pos + 1]) << 8);
}

uint32_t GetU32(std::span<const uint8_t> b, size_t pos) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[pos + i];
  return v;
}

void ValidateHeader(const BitstreamHeader& h) {
  auto inconsistent = [](const std::string& what) {
    return Error(ErrorCode::kInconsistentBitstream, what);
  };
  if (h.bits < kMinBitDepth || h.bits > kMaxBitDepth) {
    throw inconsistent("bit depth " + std::to_string(h.bits));
  }
  if (h.channels == 0) throw inconsistent("zero feature maps");
  if (h.padded_width == 0 || h.padded_height == 0 ||
      h.padded_width % kDownsampling != 0 ||
      h.padded_height % kDownsampling != 0) {
    throw inconsistent("padded size not a positive multiple of 8");
  }
  if (h.original_width == 0 || h.original_height == 0 ||
      h.original_width > h.padded_width ||
      h.original_height > h.padded_height ||
      h.padded_width - h.original_width >= kDownsampling ||
      h.padded_height - h.original_height >= kDownsampling) {
    throw inconsistent("original size does not match padded size");
  }
}

}  // namespace

std::vector<uint8_t> Bitstream::Serialize() const {
  std::vector<uint8_t> out;
  out.reserve(SizeBytes());
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(header.version);
  out.push_back(static_cast<uint8_t>(header.bits));
  PutU16(out, static_cast<uint32_t>(header.channels));
  PutU32(out, header.padded_width);
  PutU32(out, header.padded_height);
  PutU32(out, header.original_width);
  PutU32(out, header.original_height);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bitstream ParseBitstream(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an .sbc bitstream");
  }
  if (bytes.size() < kBitstreamHeaderSize) {
    throw Error(ErrorCode::kTruncatedBitstream, "header cut short");
  }
  Bitstream bs;
  bs.header.version = bytes[4];
  if (bs.header.version != kBitstreamVersion) {
    throw Error(ErrorCode::kBadVersion,
                "version " + std::to_string(bs.header.version));
  }
  bs.header.bits = bytes[5];
  bs.header.channels = GetU16(bytes, 6);
  bs.header.padded_width = GetU32(bytes, 8);
  bs.header.padded_height = GetU32(bytes, 12);
  bs.header.original_width = GetU32(bytes, 16);
  bs.header.original_height = GetU32(bytes, 20);
  ValidateHeader(bs.header);
  bs.payload.assign(bytes.begin() + kBitstreamHeaderSize, bytes.end());
  return bs;
}

Bitstream Encode(const QuantIndices& q) {
  return Encode(q, static_cast<uint32_t>(q.shape.width * kDownsampling),
                static_cast<uint32_t>(q.shape.height * kDownsampling));
}

Bitstream Encode(const QuantIndices& q, uint32_t original_width,
                 uint32_t original_height) {
  return Encode(q, original_width, original_height, nullptr);
}

Bitstream Encode(const QuantIndices& q, uint32_t original_width,
                 uint32_t original_height, const CodingTrace& trace) {
  SOFTBIT_CHECK(q.indices.size() == q.shape.size(), "index count mismatch");
  SOFTBIT_CHECK(q.shape.channels <= 0xFFFF, "too many feature maps");
  Bitstream bs;
  bs.header.bits = q.bits;
  bs.header.channels = q.shape.channels;
  bs.header.padded_width = static_cast<uint32_t>(q.shape.width * kDownsampling);
  bs.header.padded_height =
      static_cast<uint32_t>(q.shape.height * kDownsampling);
  bs.header.original_width = original_width;
  bs.header.original_height = original_height;
  ValidateHeader(bs.header);
  const uint32_t limit = 1u << q.bits;
  for (uint32_t v : q.indices) {
    SOFTBIT_CHECK(v < limit, "index exceeds bit depth");
  }

  RangeEncoder encoder;
  std::array<BinaryContextModel, kNumContexts> models;
  size_t current_map = 0;
  ForEachCodedBit(q, [&](const CodedBit& cb) {
    if (cb.channel != current_map) {
      models = {};
      current_map = cb.channel;
    }
    BinaryContextModel& model = models[cb.ctx.Index()];
    if (trace) trace(cb, model.ProbOne());
    encoder.Encode(cb.bit, model);
  });
  bs.payload = encoder.Finish();
  return bs;
}

QuantIndices Decode(const Bitstream& bs) {
  ValidateHeader(bs.header);
  const TensorShape shape = bs.header.GridShape();
  const int bits = bs.header.bits;
  QuantIndices q(shape, bits);
  RangeDecoder decoder(bs.payload);
  for (size_t c = 0; c < shape.channels; ++c) {
    std::array<BinaryContextModel, kNumContexts> models;
    MapScanner scanner(shape.width, shape.height);
    for (int k = 0; k < bits; ++k) {
      scanner.BeginPlane(k);
      for (size_t y = 0; y < shape.height; ++y) {
        for (size_t x = 0; x < shape.width; ++x) {
          const ContextId ctx = scanner.Context(x, y);
          const int bit = decoder.Decode(models[ctx.Index()]);
          scanner.Record(x, y, bit);
          q.indices[shape.Index(c, x, y)] |=
              static_cast<uint32_t>(bit) << (bits - 1 - k);
        }
        if (decoder.overrun() > kImplicitTailBytes) {
          throw Error(ErrorCode::kTruncatedBitstream, "payload cut short");
        }
      }
      scanner.EndPlane();
    }
  }
  if (decoder.overrun() != kImplicitTailBytes) {
    if (decoder.overrun() > kImplicitTailBytes) {
      throw Error(ErrorCode::kTruncatedBitstream, "payload cut short");
    }
    throw Error(ErrorCode::kInconsistentBitstream,
                "payload longer than the header's tensor requires");
  }
  if (!decoder.ExactlyConsumed()) {
    throw Error(ErrorCode::kInconsistentBitstream,
                "trailing bytes after payload");
  }
  return q;
}

double ActualBpp(const Bitstream& bs) {
  const double pixels = static_cast<double>(bs.header.original_width) *
                        bs.header.original_height;
  SOFTBIT_CHECK(pixels > 0, "empty image");
  return 8.0 * static_cast<double>(bs.SizeBytes()) / pixels;
}

}  // namespace softbit
