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

#include "softbit/quantizer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "softbit/status.h"

namespace softbit {

double QuantizerConfig::step() const { return std::ldexp(1.0, -bits); }

void QuantizerConfig::Validate() const {
  SOFTBIT_CHECK(bits >= kMinBitDepth && bits <= kMaxBitDepth,
                "bit depth out of range");
}

double ClampFeature(double f) {
  if (!(f > 0.0)) return 0.0;  // also maps NaN to 0
  return std::min(f, kFeatureMax);
}

uint32_t QuantizeSample(double f, int bits) {
  const double scaled = std::floor(std::ldexp(ClampFeature(f), bits));
  const uint32_t top = (1u << bits) - 1;
  return std::min(static_cast<uint32_t>(scaled), top);
}

double DequantizeSample(uint32_t q, int bits) { return std::ldexp(q, -bits); }

QuantIndices Quantize(const FeatureTensor& features,
                      const QuantizerConfig& cfg) {
  cfg.Validate();
  SOFTBIT_CHECK(features.samples.size() == features.shape.size(),
                "feature tensor size mismatch");
  QuantIndices q(features.shape, cfg.bits);
  std::transform(features.samples.begin(), features.samples.end(),
                 q.indices.begin(),
                 [&](double f) { return QuantizeSample(f, cfg.bits); });
  return q;
}

FeatureTensor Dequantize(const QuantIndices& q) {
  QuantizerConfig{q.bits}.Validate();
  FeatureTensor f(q.shape);
  const uint32_t limit = 1u << q.bits;
  for (size_t i = 0; i < q.indices.size(); ++i) {
    SOFTBIT_CHECK(q.indices[i] < limit, "index exceeds bit depth");
    f.samples[i] = DequantizeSample(q.indices[i], q.bits);
  }
  return f;
}

int HardBit(uint32_t q, int k, int bits) {
  SOFTBIT_CHECK(k >= 0 && k < bits, "bit position out of range");
  return static_cast<int>((q >> (bits - 1 - k)) & 1u);
}

}  // namespace softbit
