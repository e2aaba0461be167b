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

#ifndef SOFTBIT_RATE_MODEL_H_
#define SOFTBIT_RATE_MODEL_H_

// Training-time rate estimation.
//
// The adaptive coder's per-context statistics are summarized by a static
// probability pi_ctx of a one, and the probability of a soft bit s is the
// bilinear interpolation
//
//   p(s | ctx) = s * pi_ctx + (1 - s) * (1 - pi_ctx),
//
// which reduces to the coder's probability at s in {0, 1} and has
// dp/ds = 2 pi_ctx - 1. The estimated rate is the self-information
// sum_i -log2 p(s_i | ctx_i); contexts come from the hard bits and carry no
// gradient.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "softbit/bitplane.h"
#include "softbit/quantizer.h"
#include "softbit/softbits.h"

namespace softbit {

constexpr double kMinContextProb = 1e-4;

struct ContextStats {
  std::array<uint64_t, kNumContexts> n0{};
  std::array<uint64_t, kNumContexts> n1{};

  void Add(const ContextId& ctx, int bit);
  ContextStats& operator+=(const ContextStats& other);
  uint64_t Total() const;
  bool operator==(const ContextStats&) const = default;
};

struct RegressorParams {
  std::array<double, kNumContexts> prob_one;

  RegressorParams() { prob_one.fill(0.5); }
  double At(const ContextId& ctx) const { return prob_one[ctx.Index()]; }
};

struct RateLoss {
  double total_bits = 0.0;
  // d total_bits / d f for every feature sample.
  std::vector<double> grad;
};

// Tallies (context, bit) pairs over the exact coding traversal.
ContextStats CollectStats(const QuantIndices& q);

// Laplace-smoothed relative frequency (n1 + 1) / (n0 + n1 + 2), clamped to
// [kMinContextProb, 1 - kMinContextProb].
RegressorParams FitRegressor(const ContextStats& stats);

double RegressorProb(double soft_bit, const ContextId& ctx,
                     const RegressorParams& params);
// dp / d soft_bit.
double RegressorProbGrad(const ContextId& ctx, const RegressorParams& params);

// `contexts` is laid out like soft.values (see AssignContexts).
RateLoss ComputeRateLoss(const SoftBitTensor& soft,
                         std::span<const ContextId> contexts,
                         const RegressorParams& params);

// Rate of the hard bits of q under params: sum -log2 p(q_i | ctx_i).
double HardRateBits(const QuantIndices& q, const RegressorParams& params);

// Empirical code length sum_ctx n1 * -log2(pi) + n0 * -log2(1 - pi) for the
// fitted pi of the same stats.
double EmpiricalCodeLength(const ContextStats& stats,
                           const RegressorParams& params);

double EstimatedBpp(const RateLoss& loss, size_t width, size_t height);

// Sidecar file: u16 LE context count, then one u16 LE per context holding
// round(pi * 2^16) (always in [1, 65535] given the clamp).
std::vector<uint8_t> SerializeRegressor(const RegressorParams& params);
RegressorParams ParseRegressor(std::span<const uint8_t> bytes);
void SaveRegressor(const RegressorParams& params,
                   const std::filesystem::path& path);
RegressorParams LoadRegressor(const std::filesystem::path& path);

}  // namespace softbit

#endif  // SOFTBIT_RATE_MODEL_H_
