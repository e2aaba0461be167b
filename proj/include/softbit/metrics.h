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

#ifndef SOFTBIT_METRICS_H_
#define SOFTBIT_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softbit/image.h"

namespace softbit {

constexpr double kPsnrCap = 99.0;
// 11-tap window over 5 dyadic scales.
constexpr size_t kMsSsimMinSize = 176;

// 10 log10(255^2 / MSE) with MSE measured on the 8-bit scale. Identical
// planes (and anything above the cap) report kPsnrCap.
double Psnr(const Plane& a, const Plane& b);

// Five-scale MS-SSIM of one plane (Gaussian window sigma 1.5, weights
// 0.0448, 0.2856, 0.3001, 0.2363, 0.1333, K1 = 0.01, K2 = 0.03, dynamic
// range 255). Negative per-scale terms are clamped to zero.
double MsSsimPlane(const Plane& a, const Plane& b);
// Mean of MsSsimPlane over Y, U, V.
double MsSsim(const ImagePlanes& a, const ImagePlanes& b);

struct QualityScore {
  double psnr_y = 0.0;
  double psnr_u = 0.0;
  double psnr_v = 0.0;
  double psnr_avg = 0.0;
  // Absent when the image is smaller than kMsSsimMinSize.
  std::optional<double> msssim_avg;
  double bpp = 0.0;
};

struct EvalPair {
  std::string name;
  const ImagePlanes* original = nullptr;
  const ImagePlanes* reconstruction = nullptr;
  double bpp = 0.0;
};

QualityScore ScorePair(const ImagePlanes& original,
                       const ImagePlanes& reconstruction, double bpp);

// Per image: metrics averaged over the three planes. Then the arithmetic
// mean over images (MS-SSIM over the images that have it).
QualityScore DatasetSummary(std::span<const QualityScore> per_image);
QualityScore DatasetSummary(std::span<const EvalPair> pairs);

}  // namespace softbit

#endif  // SOFTBIT_METRICS_H_
