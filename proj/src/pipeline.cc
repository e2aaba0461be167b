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

#include "softbit/pipeline.h"

#include <algorithm>
#include <string>

#include "softbit/status.h"

namespace softbit {

Bitstream CompressImage(const RgbImage& image, const ToyModel& model) {
  const ImagePlanes padded = PadToMultiple(RgbToYuv(image), kDownsampling);
  const QuantIndices q =
      Quantize(ToyEncode(padded, model.params), model.quant);
  return Encode(q, static_cast<uint32_t>(image.width),
                static_cast<uint32_t>(image.height));
}

ImagePlanes DecompressPlanes(const Bitstream& bs, const ToyModel& model) {
  if (bs.header.channels != model.params.channels ||
      bs.header.bits != model.quant.bits) {
    throw Error(ErrorCode::kInconsistentBitstream,
                "bitstream has C=" + std::to_string(bs.header.channels) +
                    ", b=" + std::to_string(bs.header.bits) +
                    " but the model expects C=" +
                    std::to_string(model.params.channels) +
                    ", b=" + std::to_string(model.quant.bits));
  }
  const QuantIndices q = Decode(bs);
  const ImagePlanes full = ToyDecode(Dequantize(q), model.params);
  return Crop(full, bs.header.original_width, bs.header.original_height);
}

RgbImage DecompressImage(const Bitstream& bs, const ToyModel& model) {
  return YuvToRgb(DecompressPlanes(bs, model));
}

size_t CountNonzeroBitplanes(const QuantIndices& q) {
  size_t count = 0;
  const size_t map = q.shape.MapSize();
  for (size_t c = 0; c < q.shape.channels; ++c) {
    uint32_t any = 0;
    for (size_t i = 0; i < map; ++i) any |= q.indices[c * map + i];
    for (int k = 0; k < q.bits; ++k) count += (any >> k) & 1u;
  }
  return count;
}

size_t ChannelsForTargetBpp(double target_bpp) {
  if (target_bpp < 0.25) return 4;
  if (target_bpp <= 0.5) return 8;
  return 16;
}

}  // namespace softbit
