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

#include "softbit/rate_model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "softbit/image.h"
#include "softbit/status.h"

namespace softbit {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

}  // namespace

void ContextStats::Add(const ContextId& ctx, int bit) {
  if (bit) {
    ++n1[ctx.Index()];
  } else {
    ++n0[ctx.Index()];
  }
}

ContextStats& ContextStats::operator+=(const ContextStats& other) {
  for (int i = 0; i < kNumContexts; ++i) {
    n0[i] += other.n0[i];
    n1[i] += other.n1[i];
  }
  return *this;
}

uint64_t ContextStats::Total() const {
  uint64_t total = 0;
  for (int i = 0; i < kNumContexts; ++i) total += n0[i] + n1[i];
  return total;
}

ContextStats CollectStats(const QuantIndices& q) {
  ContextStats stats;
  ForEachCodedBit(q, [&](const CodedBit& cb) { stats.Add(cb.ctx, cb.bit); });
  return stats;
}

RegressorParams FitRegressor(const ContextStats& stats) {
  RegressorParams params;
  for (int i = 0; i < kNumContexts; ++i) {
    const double p = (static_cast<double>(stats.n1[i]) + 1.0) /
                     (static_cast<double>(stats.n0[i] + stats.n1[i]) + 2.0);
    params.prob_one[i] = std::clamp(p, kMinContextProb, 1.0 - kMinContextProb);
  }
  return params;
}

double RegressorProb(double soft_bit, const ContextId& ctx,
                     const RegressorParams& params) {
  const double pi = params.At(ctx);
  return soft_bit * pi + (1.0 - soft_bit) * (1.0 - pi);
}

double RegressorProbGrad(const ContextId& ctx, const RegressorParams& params) {
  return 2.0 * params.At(ctx) - 1.0;
}

RateLoss ComputeRateLoss(const SoftBitTensor& soft,
                         std::span<const ContextId> contexts,
                         const RegressorParams& params) {
  SOFTBIT_CHECK(contexts.size() == soft.values.size(),
                "one context per soft bit required");
  const size_t b = soft.bits;
  const size_t samples = soft.values.size() / b;
  RateLoss loss;
  loss.grad.assign(samples, 0.0);
  for (size_t i = 0; i < samples; ++i) {
    double g = 0.0;
    for (size_t k = 0; k < b; ++k) {
      const size_t j = i * b + k;
      const double p = RegressorProb(soft.values[j], contexts[j], params);
      loss.total_bits -= std::log2(p);
      g -= kInvLn2 / p * RegressorProbGrad(contexts[j], params) *
           soft.grads[j];
    }
    loss.grad[i] = g;
  }
  return loss;
}

double HardRateBits(const QuantIndices& q, const RegressorParams& params) {
  double bits = 0.0;
  ForEachCodedBit(q, [&](const CodedBit& cb) {
    bits -= std::log2(RegressorProb(cb.bit, cb.ctx, params));
  });
  return bits;
}

double EmpiricalCodeLength(const ContextStats& stats,
                           const RegressorParams& params) {
  double bits = 0.0;
  for (int i = 0; i < kNumContexts; ++i) {
    const double pi = params.prob_one[i];
    bits -= static_cast<double>(stats.n1[i]) * std::log2(pi) +
            static_cast<double>(stats.n0[i]) * std::log2(1.0 - pi);
  }
  return bits;
}

double EstimatedBpp(const RateLoss& loss, size_t width, size_t height) {
  SOFTBIT_CHECK(width > 0 && height > 0, "empty image");
  return loss.total_bits / (static_cast<double>(width) * height);
}

std::vector<uint8_t> SerializeRegressor(const RegressorParams& params) {
  std::vector<uint8_t> out;
  out.push_back(static_cast<uint8_t>(kNumContexts));
  out.push_back(0);
  for (double pi : params.prob_one) {
    const double scaled = std::round(pi * 65536.0);
    const auto v = static_cast<uint16_t>(std::clamp(scaled, 1.0, 65535.0));
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
  }
  return out;
}

RegressorParams ParseRegressor(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2) {
    throw Error(ErrorCode::kTruncatedBitstream, "regressor file too short");
  }
  const size_t count = bytes[0] | (bytes[1] << 8);
  if (count != kNumContexts) {
    throw Error(ErrorCode::kInconsistentBitstream,
                "expected " + std::to_string(kNumContexts) + " contexts, got " +
                    std::to_string(count));
  }
  if (bytes.size() != 2 + 2 * count) {
    throw Error(bytes.size() < 2 + 2 * count
                    ? ErrorCode::kTruncatedBitstream
                    : ErrorCode::kInconsistentBitstream,
                "regressor file size mismatch");
  }
  RegressorParams params;
  for (size_t i = 0; i < count; ++i) {
    const uint32_t v = bytes[2 + 2 * i] | (bytes[3 + 2 * i] << 8);
    params.prob_one[i] = std::clamp(v / 65536.0, kMinContextProb,
                                    1.0 - kMinContextProb);
  }
  return params;
}

void SaveRegressor(const RegressorParams& params,
                   const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeRegressor(params));
}

RegressorParams LoadRegressor(const std::filesystem::path& path) {
  return ParseRegressor(ReadFile(path));
}

}  // namespace softbit
