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

#ifndef SOFTBIT_QUANTIZER_H_
#define SOFTBIT_QUANTIZER_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace softbit {

constexpr int kMinBitDepth = 1;
constexpr int kMaxBitDepth = 16;

// Largest value fed to the quantizer: 1 - 2^-24.
constexpr double kFeatureMax = 1.0 - 1.0 / (1 << 24);

struct QuantizerConfig {
  int bits = 4;

  double step() const;
  void Validate() const;
};

// Shape shared by feature tensors and index tensors. Samples are stored
// map-major: index = (c * height + y) * width + x.
struct TensorShape {
  size_t width = 0;
  size_t height = 0;
  size_t channels = 0;

  size_t size() const { return width * height * channels; }
  size_t MapSize() const { return width * height; }
  size_t Index(size_t c, size_t x, size_t y) const {
    return (c * height + y) * width + x;
  }
  bool operator==(const TensorShape&) const = default;
};

// Encoder output: real features in [0, 1).
struct FeatureTensor {
  TensorShape shape;
  std::vector<double> samples;

  FeatureTensor() = default;
  explicit FeatureTensor(TensorShape s, double fill = 0.0)
      : shape(s), samples(s.size(), fill) {}
};

// b-bit quantization indices, 0 <= q < 2^b.
struct QuantIndices {
  TensorShape shape;
  int bits = 0;
  std::vector<uint32_t> indices;

  QuantIndices() = default;
  QuantIndices(TensorShape s, int b) : shape(s), bits(b), indices(s.size()) {}

  bool operator==(const QuantIndices&) const = default;
};

// Clamps into [0, kFeatureMax]; the encoder's open interval is not
// representable so the quantizer enforces a half-open range instead.
double ClampFeature(double f);

// q = floor(f * 2^b) after clamping.
uint32_t QuantizeSample(double f, int bits);
// f_hat = q * 2^-b (lower cell edge).
double DequantizeSample(uint32_t q, int bits);

QuantIndices Quantize(const FeatureTensor& features,
                      const QuantizerConfig& cfg);
FeatureTensor Dequantize(const QuantIndices& q);

// Bit k of a b-bit index, counted from the most significant (k = 0 is the
// 2^-1 bit of the feature).
int HardBit(uint32_t q, int k, int bits);

}  // namespace softbit

#endif  // SOFTBIT_QUANTIZER_H_
