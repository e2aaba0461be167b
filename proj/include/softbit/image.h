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

#ifndef SOFTBIT_IMAGE_H_
#define SOFTBIT_IMAGE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace softbit {

// 8-bit interleaved RGB, the only pixel format that touches disk.
struct RgbImage {
  size_t width = 0;
  size_t height = 0;
  std::vector<uint8_t> samples;  // width * height * 3, RGBRGB...

  RgbImage() = default;
  RgbImage(size_t w, size_t h);

  uint8_t* Pixel(size_t x, size_t y) { return &samples[3 * (y * width + x)]; }
  const uint8_t* Pixel(size_t x, size_t y) const {
    return &samples[3 * (y * width + x)];
  }
  bool operator==(const RgbImage&) const = default;
};

// Single real-valued plane, row-major.
struct Plane {
  size_t width = 0;
  size_t height = 0;
  std::vector<double> samples;

  Plane() = default;
  Plane(size_t w, size_t h, double fill = 0.0)
      : width(w), height(h), samples(w * h, fill) {}

  double& At(size_t x, size_t y) { return samples[y * width + x]; }
  double At(size_t x, size_t y) const { return samples[y * width + x]; }
  bool operator==(const Plane&) const = default;
};

// 4:4:4 YUV image with samples in [0,1]; planes are Y, U, V.
struct ImagePlanes {
  size_t width = 0;
  size_t height = 0;
  std::array<Plane, 3> planes;

  ImagePlanes() = default;
  ImagePlanes(size_t w, size_t h, double fill = 0.0);

  bool operator==(const ImagePlanes&) const = default;
};

struct PatchBatch {
  std::vector<ImagePlanes> patches;

  size_t count() const { return patches.size(); }
};

// Binary PPM (P6, maxval 255) I/O.
RgbImage LoadPpm(const std::filesystem::path& path);
RgbImage DecodePpm(std::span<const uint8_t> bytes);
void SavePpm(const RgbImage& img, const std::filesystem::path& path);
std::vector<uint8_t> EncodePpm(const RgbImage& img);

// Binary PGM (P5, maxval 255) writer, used for bitplane dumps.
std::vector<uint8_t> EncodePgm(size_t width, size_t height,
                               std::span<const uint8_t> gray);

// Writes to a sibling temp file and renames over `path` on success, so a
// failed write never leaves a partial file behind.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const uint8_t> bytes);
std::vector<uint8_t> ReadFile(const std::filesystem::path& path);

// Full-range BT.601, normalized to [0,1] with chroma offset 0.5.
ImagePlanes RgbToYuv(const RgbImage& img);
// Inverse of the above; rounds half-up and clamps to [0,255].
RgbImage YuvToRgb(const ImagePlanes& planes);

// Edge-replicates the right and bottom borders up to the next multiple of m.
ImagePlanes PadToMultiple(const ImagePlanes& planes, size_t multiple);
// Top-left width x height region.
ImagePlanes Crop(const ImagePlanes& planes, size_t width, size_t height);
// Region at (x0, y0); bounds are checked.
ImagePlanes Extract(const ImagePlanes& planes, size_t x0, size_t y0,
                    size_t width, size_t height);

// Random square crops with independent horizontal/vertical flips. A pure
// function of its arguments.
PatchBatch SamplePatches(std::span<const ImagePlanes> images, size_t size,
                         size_t count, uint64_t seed);

// Where each patch of SamplePatches came from; exposed for statistical tests.
struct PatchOrigin {
  size_t image = 0;
  size_t x = 0;
  size_t y = 0;
  bool flip_h = false;
  bool flip_v = false;
};
std::vector<PatchOrigin> SamplePatchOrigins(
    std::span<const ImagePlanes> images, size_t size, size_t count,
    uint64_t seed);

// Smooth synthetic natural-ish images (a few low-frequency color blobs and
// gradients with mild texture). Stands in for a photographic training set.
std::vector<ImagePlanes> SyntheticImages(size_t count, size_t width,
                                         size_t height, uint64_t seed);

}  // namespace softbit

#endif  // SOFTBIT_IMAGE_H_
