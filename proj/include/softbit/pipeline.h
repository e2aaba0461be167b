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

#ifndef SOFTBIT_PIPELINE_H_
#define SOFTBIT_PIPELINE_H_

// Test-mode image codec: pad, YUV, toy encoder, quantizer, bitplane coder,
// and back.

#include "softbit/entropy_codec.h"
#include "softbit/image.h"
#include "softbit/trainer.h"

namespace softbit {

Bitstream CompressImage(const RgbImage& image, const ToyModel& model);

// Decoder output in YUV at the original size, before 8-bit conversion.
ImagePlanes DecompressPlanes(const Bitstream& bs, const ToyModel& model);
RgbImage DecompressImage(const Bitstream& bs, const ToyModel& model);

// Number of distinct (map, plane) bitplanes holding at least one set bit.
size_t CountNonzeroBitplanes(const QuantIndices& q);

// Recommended feature map count for a target rate: 4 below 0.25 bpp, 8 up
// to 0.5 bpp, 16 above.
size_t ChannelsForTargetBpp(double target_bpp);

}  // namespace softbit

#endif  // SOFTBIT_PIPELINE_H_
