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

#include "softbit/metrics.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "softbit/status.h"

namespace softbit {

namespace {

constexpr int kScales = 5;
constexpr std::array<double, kScales> kScaleWeights = {0.0448, 0.2856, 0.3001,
                                                       0.2363, 0.1333};
constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::array<double, kWindow> GaussianTaps() {
  std::array<double, kWindow> taps;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable Gaussian filter, 'valid' region only.
Plane FilterValid(const Plane& in) {
  static const std::array<double, kWindow> taps = GaussianTaps();
  const size_t ow = in.width - kWindow + 1;
  const size_t oh = in.height - kWindow + 1;
  Plane horiz(ow, in.height);
  for (size_t y = 0; y < in.height; ++y) {
    for (size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += taps[i] * in.At(x + i, y);
      horiz.At(x, y) = acc;
    }
  }
  Plane out(ow, oh);
  for (size_t y = 0; y < oh; ++y) {
    for (size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += taps[i] * horiz.At(x, y + i);
      out.At(x, y) = acc;
    }
  }
  return out;
}

Plane Multiply(const Plane& a, const Plane& b) {
  Plane out(a.width, a.height);
  for (size_t i = 0; i < a.samples.size(); ++i) {
    out.samples[i] = a.samples[i] * b.samples[i];
  }
  return out;
}

Plane Downsample2x(const Plane& in) {
  Plane out(in.width / 2, in.height / 2);
  for (size_t y = 0; y < out.height; ++y) {
    for (size_t x = 0; x < out.width; ++x) {
      out.At(x, y) = 0.25 * (in.At(2 * x, 2 * y) + in.At(2 * x + 1, 2 * y) +
                             in.At(2 * x, 2 * y + 1) +
                             in.At(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

Plane To8BitScale(const Plane& p) {
  Plane out = p;
  for (double& v : out.samples) v *= 255.0;
  return out;
}

struct SsimTerms {
  double cs;    // mean contrast-structure term
  double ssim;  // mean luminance * contrast-structure
};

SsimTerms ComputeSsimTerms(const Plane& x, const Plane& y) {
  const Plane mu_x = FilterValid(x);
  const Plane mu_y = FilterValid(y);
  const Plane xx = FilterValid(Multiply(x, x));
  const Plane yy = FilterValid(Multiply(y, y));
  const Plane xy = FilterValid(Multiply(x, y));
  double cs_sum = 0.0;
  double ssim_sum = 0.0;
  for (size_t i = 0; i < mu_x.samples.size(); ++i) {
    const double mx = mu_x.samples[i];
    const double my = mu_y.samples[i];
    const double var_x = xx.samples[i] - mx * mx;
    const double var_y = yy.samples[i] - my * my;
    const double cov = xy.samples[i] - mx * my;
    const double cs = (2.0 * cov + kC2) / (var_x + var_y + kC2);
    const double lum = (2.0 * mx * my + kC1) / (mx * mx + my * my + kC1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const double n = static_cast<double>(mu_x.samples.size());
  return {cs_sum / n, ssim_sum / n};
}

void CheckSameShape(const Plane& a, const Plane& b) {
  SOFTBIT_CHECK(a.width == b.width && a.height == b.height,
                "plane shapes differ");
  SOFTBIT_CHECK(a.width >= 1 && a.height >= 1, "empty plane");
}

}  // namespace

double Psnr(const Plane& a, const Plane& b) {
  CheckSameShape(a, b);
  double sse = 0.0;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    const double d = 255.0 * (a.samples[i] - b.samples[i]);
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrCap;
  const double mse = sse / static_cast<double>(a.samples.size());
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double MsSsimPlane(const Plane& a, const Plane& b) {
  CheckSameShape(a, b);
  SOFTBIT_CHECK(std::min(a.width, a.height) >= kMsSsimMinSize,
                "image too small for 5-scale MS-SSIM (need 176 pixels)");
  Plane x = To8BitScale(a);
  Plane y = To8BitScale(b);
  double result = 1.0;
  for (int scale = 0; scale < kScales; ++scale) {
    const SsimTerms terms = ComputeSsimTerms(x, y);
    const double term =
        scale == kScales - 1 ? terms.ssim : terms.cs;
    result *= std::pow(std::max(term, 0.0), kScaleWeights[scale]);
    if (scale + 1 < kScales) {
      x = Downsample2x(x);
      y = Downsample2x(y);
    }
  }
  return result;
}

double MsSsim(const ImagePlanes& a, const ImagePlanes& b) {
  double sum = 0.0;
  for (size_t c = 0; c < 3; ++c) sum += MsSsimPlane(a.planes[c], b.planes[c]);
  return sum / 3.0;
}

QualityScore ScorePair(const ImagePlanes& original,
                       const ImagePlanes& reconstruction, double bpp) {
  SOFTBIT_CHECK(original.width == reconstruction.width &&
                    original.height == reconstruction.height,
                "image dimensions differ");
  QualityScore s;
  s.psnr_y = Psnr(original.planes[0], reconstruction.planes[0]);
  s.psnr_u = Psnr(original.planes[1], reconstruction.planes[1]);
  s.psnr_v = Psnr(original.planes[2], reconstruction.planes[2]);
  s.psnr_avg = (s.psnr_y + s.psnr_u + s.psnr_v) / 3.0;
  if (std::min(original.width, original.height) >= kMsSsimMinSize) {
    s.msssim_avg = MsSsim(original, reconstruction);
  }
  s.bpp = bpp;
  return s;
}

QualityScore DatasetSummary(std::span<const QualityScore> per_image) {
  SOFTBIT_CHECK(!per_image.empty(), "no pairs to summarize");
  QualityScore mean;
  double msssim_sum = 0.0;
  size_t msssim_count = 0;
  for (const QualityScore& s : per_image) {
    mean.psnr_y += s.psnr_y;
    mean.psnr_u += s.psnr_u;
    mean.psnr_v += s.psnr_v;
    mean.psnr_avg += s.psnr_avg;
    mean.bpp += s.bpp;
    if (s.msssim_avg) {
      msssim_sum += *s.msssim_avg;
      ++msssim_count;
    }
  }
  const double n = static_cast<double>(per_image.size());
  mean.psnr_y /= n;
  mean.psnr_u /= n;
  mean.psnr_v /= n;
  mean.psnr_avg /= n;
  mean.bpp /= n;
  if (msssim_count > 0) {
    mean.msssim_avg = msssim_sum / static_cast<double>(msssim_count);
  }
  return mean;
}

QualityScore DatasetSummary(std::span<const EvalPair> pairs) {
  std::vector<QualityScore> scores;
  scores.reserve(pairs.size());
  for (const EvalPair& p : pairs) {
    SOFTBIT_CHECK(p.original && p.reconstruction, "null image in pair");
    scores.push_back(ScorePair(*p.original, *p.reconstruction, p.bpp));
  }
  return DatasetSummary(scores);
}

}  // namespace softbit
