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

#ifndef SOFTBIT_SOFTBITS_H_
#define SOFTBIT_SOFTBITS_H_

// Soft bits: differentiable stand-ins for the hard bits of a quantization
// index. Bit k of q = floor(f * 2^b) is a square wave in f with period
// 2^-k; it is rebuilt as an alternating superposition of logistic steps
//
//   soft_k(f) = sum_{j=1..2^(k+1)} (-1)^(j+1) sigmoid_alpha(f - j * 2^-(k+1))
//
// which tends to the hard bit as alpha grows and has a nonzero derivative
// everywhere.

#include <span>
#include <vector>

#include "softbit/quantizer.h"

namespace softbit {

constexpr double kDefaultAlpha = 50.0;
// Soft bits are kept inside (kSoftBitFloor, 1 - kSoftBitFloor).
constexpr double kSoftBitFloor = 1e-12;

struct SoftBitConfig {
  double alpha = kDefaultAlpha;
  int bits = 4;

  void Validate() const;
};

// Per-sample, per-bit soft bits. Layout: [sample index * bits + k], samples
// ordered as in FeatureTensor.
struct SoftBitTensor {
  TensorShape shape;
  int bits = 0;
  std::vector<double> values;
  // d soft_k / d f, same layout as values.
  std::vector<double> grads;

  double At(size_t sample, int k) const { return values[sample * bits + k]; }
};

// 1 / (1 + exp(-alpha x)), without overflow for any |alpha x|.
double Sigmoid(double x, double alpha);

// Writes the b soft bits of f into out. Meaningful for 0 <= f < 1; the
// formula itself is defined for any real f.
void SoftBits(double f, const SoftBitConfig& cfg, std::span<double> out);
std::vector<double> SoftBits(double f, const SoftBitConfig& cfg);

// Analytic d soft_k / d f.
void SoftBitsGrad(double f, const SoftBitConfig& cfg, std::span<double> out);
std::vector<double> SoftBitsGrad(double f, const SoftBitConfig& cfg);

// sum_k soft_k * 2^-(k+1).
double SoftDequantizeSample(std::span<const double> soft_bits);
// Chain rule through SoftDequantizeSample: sum_k 2^-(k+1) d soft_k / d f.
double SoftDequantizeGrad(std::span<const double> soft_grads);

SoftBitTensor ComputeSoftBits(const FeatureTensor& features,
                              const SoftBitConfig& cfg);
FeatureTensor SoftDequantize(const SoftBitTensor& soft);

}  // namespace softbit

#endif  // SOFTBIT_SOFTBITS_H_
