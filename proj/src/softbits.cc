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

#include "softbit/softbits.h"

#include <algorithm>
#include <cmath>

#include "softbit/status.h"

namespace softbit {

namespace {

// Logistic terms further than this many alpha-scaled units from f are below
// 1e-17 and are skipped.
constexpr double kSaturationWindow = 40.0;

double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Range of step pairs [lo, hi] for bit k that can contribute at f. Pair m
// is the rising step at (2m+1)s followed by the falling step at (2m+2)s,
// i.e. the interval on which the hard bit is one.
struct PairRange {
  long lo;
  long hi;
};

PairRange ActivePairs(double f, double alpha, int k) {
  const double s = std::ldexp(1.0, -(k + 1));
  const long last = (1L << k) - 1;
  const double window = kSaturationWindow / alpha;
  const double lo = std::floor(((f - window) / s - 2.0) / 2.0);
  const double hi = std::ceil(((f + window) / s) / 2.0);
  PairRange r;
  r.lo = lo <= 0.0 ? 0L : static_cast<long>(std::min<double>(lo, last + 1));
  r.hi = hi >= static_cast<double>(last) ? last
                                         : static_cast<long>(std::max(hi, -1.0));
  return r;
}

}  // namespace

void SoftBitConfig::Validate() const {
  SOFTBIT_CHECK(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive");
  SOFTBIT_CHECK(bits >= kMinBitDepth && bits <= kMaxBitDepth,
                "bit depth out of range");
}

double Sigmoid(double x, double alpha) { return Logistic(alpha * x); }

void SoftBits(double f, const SoftBitConfig& cfg, std::span<double> out) {
  SOFTBIT_CHECK(out.size() == static_cast<size_t>(cfg.bits),
                "output size must equal bit depth");
  const double alpha = cfg.alpha;
  for (int k = 0; k < cfg.bits; ++k) {
    const double s = std::ldexp(1.0, -(k + 1));
    // sigma(a) - sigma(b) with a - b = alpha * s, evaluated as
    // sigma(a) * sigma(-b) * (1 - exp(-(a - b))) so no pair cancels.
    const double gap = -std::expm1(-alpha * s);
    const PairRange r = ActivePairs(f, alpha, k);
    double sum = 0.0;
    for (long m = r.lo; m <= r.hi; ++m) {
      const double a = alpha * (f - (2 * m + 1) * s);
      const double b = alpha * (f - (2 * m + 2) * s);
      sum += Logistic(a) * Logistic(-b) * gap;
    }
    out[k] = std::clamp(sum, kSoftBitFloor, 1.0 - kSoftBitFloor);
  }
}

std::vector<double> SoftBits(double f, const SoftBitConfig& cfg) {
  std::vector<double> out(cfg.bits);
  SoftBits(f, cfg, out);
  return out;
}

void SoftBitsGrad(double f, const SoftBitConfig& cfg, std::span<double> out) {
  SOFTBIT_CHECK(out.size() == static_cast<size_t>(cfg.bits),
                "output size must equal bit depth");
  const double alpha = cfg.alpha;
  for (int k = 0; k < cfg.bits; ++k) {
    const double s = std::ldexp(1.0, -(k + 1));
    const PairRange r = ActivePairs(f, alpha, k);
    double sum = 0.0;
    for (long m = r.lo; m <= r.hi; ++m) {
      const double a = alpha * (f - (2 * m + 1) * s);
      const double b = alpha * (f - (2 * m + 2) * s);
      sum += Logistic(a) * Logistic(-a) - Logistic(b) * Logistic(-b);
    }
    out[k] = alpha * sum;
  }
}

std::vector<double> SoftBitsGrad(double f, const SoftBitConfig& cfg) {
  std::vector<double> out(cfg.bits);
  SoftBitsGrad(f, cfg, out);
  return out;
}

double SoftDequantizeSample(std::span<const double> soft_bits) {
  double f = 0.0;
  for (size_t k = 0; k < soft_bits.size(); ++k) {
    f += soft_bits[k] * std::ldexp(1.0, -static_cast<int>(k + 1));
  }
  return f;
}

double SoftDequantizeGrad(std::span<const double> soft_grads) {
  return SoftDequantizeSample(soft_grads);
}

SoftBitTensor ComputeSoftBits(const FeatureTensor& features,
                              const SoftBitConfig& cfg) {
  cfg.Validate();
  SoftBitTensor t;
  t.shape = features.shape;
  t.bits = cfg.bits;
  t.values.resize(features.samples.size() * cfg.bits);
  t.grads.resize(features.samples.size() * cfg.bits);
  const size_t b = cfg.bits;
  for (size_t i = 0; i < features.samples.size(); ++i) {
    const double f = features.samples[i];
    SoftBits(f, cfg, std::span<double>(t.values).subspan(i * b, b));
    SoftBitsGrad(f, cfg, std::span<double>(t.grads).subspan(i * b, b));
  }
  return t;
}

FeatureTensor SoftDequantize(const SoftBitTensor& soft) {
  FeatureTensor f(soft.shape);
  const size_t b = soft.bits;
  for (size_t i = 0; i < f.samples.size(); ++i) {
    f.samples[i] = SoftDequantizeSample(
        std::span<const double>(soft.values).subspan(i * b, b));
  }
  return f;
}

}  // namespace softbit
