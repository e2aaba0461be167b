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

#include "softbit/image.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <system_error>

#include <unistd.h>

#include "softbit/status.h"

namespace softbit {

namespace {

// BT.601 luma weights.
constexpr double kKr = 0.299;
constexpr double kKb = 0.114;
constexpr double kKg = 1.0 - kKr - kKb;

bool IsSpace(uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Header tokenizer: skips whitespace and '#' comments.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  size_t ReadNumber(const char* what) {
    SkipSpaceAndComments();
    if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      throw Error(ErrorCode::kMalformedHeader,
                  std::string("expected ") + what);
    }
    size_t value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' &&
           bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 30)) {
        throw Error(ErrorCode::kMalformedHeader,
                    std::string(what) + " too large");
      }
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void ConsumeSingleSpace() {
    if (pos_ >= bytes_.size() || !IsSpace(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedHeader,
                  "missing whitespace after maxval");
    }
    ++pos_;
  }

  size_t pos() const { return pos_; }
  void set_pos(size_t pos) { pos_ = pos; }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (IsSpace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

uint8_t ToByte(double v) {
  const double scaled = std::floor(v * 255.0 + 0.5);
  return static_cast<uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

}  // namespace

RgbImage::RgbImage(size_t w, size_t h)
    : width(w), height(h), samples(w * h * 3, 0) {}

ImagePlanes::ImagePlanes(size_t w, size_t h, double fill)
    : width(w), height(h) {
  for (Plane& p : planes) p = Plane(w, h, fill);
}

RgbImage DecodePpm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw Error(ErrorCode::kMalformedHeader, "not a binary PPM (P6)");
  }
  HeaderReader reader(bytes);
  reader.set_pos(2);
  const size_t width = reader.ReadNumber("width");
  const size_t height = reader.ReadNumber("height");
  const size_t maxval = reader.ReadNumber("maxval");
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::kMalformedHeader, "zero image dimension");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::kUnsupportedMaxval,
                "maxval " + std::to_string(maxval) + " (only 255 supported)");
  }
  reader.ConsumeSingleSpace();
  const size_t need = width * height * 3;
  if (bytes.size() - reader.pos() < need) {
    throw Error(ErrorCode::kTruncatedPayload,
                "expected " + std::to_string(need) + " payload bytes, got " +
                    std::to_string(bytes.size() - reader.pos()));
  }
  RgbImage img(width, height);
  std::copy_n(bytes.begin() + reader.pos(), need, img.samples.begin());
  return img;
}

RgbImage LoadPpm(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = ReadFile(path);
  return DecodePpm(bytes);
}

std::vector<uint8_t> EncodePpm(const RgbImage& img) {
  SOFTBIT_CHECK(img.width >= 1 && img.height >= 1, "empty image");
  SOFTBIT_CHECK(img.samples.size() == img.width * img.height * 3,
                "sample count mismatch");
  const std::string header = "P6\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.samples.begin(), img.samples.end());
  return out;
}

void SavePpm(const RgbImage& img, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodePpm(img));
}

std::vector<uint8_t> EncodePgm(size_t width, size_t height,
                               std::span<const uint8_t> gray) {
  SOFTBIT_CHECK(gray.size() == width * height, "sample count mismatch");
  const std::string header = "P5\n" + std::to_string(width) + " " +
                             std::to_string(height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), gray.begin(), gray.end());
  return out;
}

std::vector<uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kIo, "write failed: " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorCode::kIo, "rename failed: " + path.string());
  }
}

ImagePlanes RgbToYuv(const RgbImage& img) {
  ImagePlanes out(img.width, img.height);
  for (size_t y = 0; y < img.height; ++y) {
    for (size_t x = 0; x < img.width; ++x) {
      const uint8_t* px = img.Pixel(x, y);
      const double r = px[0] / 255.0;
      const double g = px[1] / 255.0;
      const double b = px[2] / 255.0;
      const double luma = std::clamp(kKr * r + kKg * g + kKb * b, 0.0, 1.0);
      out.planes[0].At(x, y) = luma;
      out.planes[1].At(x, y) =
          std::clamp(0.5 + (b - luma) / (2.0 * (1.0 - kKb)), 0.0, 1.0);
      out.planes[2].At(x, y) =
          std::clamp(0.5 + (r - luma) / (2.0 * (1.0 - kKr)), 0.0, 1.0);
    }
  }
  return out;
}

RgbImage YuvToRgb(const ImagePlanes& planes) {
  RgbImage out(planes.width, planes.height);
  for (size_t y = 0; y < planes.height; ++y) {
    for (size_t x = 0; x < planes.width; ++x) {
      const double luma = planes.planes[0].At(x, y);
      const double cb = planes.planes[1].At(x, y) - 0.5;
      const double cr = planes.planes[2].At(x, y) - 0.5;
      const double r = luma + 2.0 * (1.0 - kKr) * cr;
      const double b = luma + 2.0 * (1.0 - kKb) * cb;
      const double g = (luma - kKr * r - kKb * b) / kKg;
      uint8_t* px = out.Pixel(x, y);
      px[0] = ToByte(r);
      px[1] = ToByte(g);
      px[2] = ToByte(b);
    }
  }
  return out;
}

ImagePlanes PadToMultiple(const ImagePlanes& planes, size_t multiple) {
  SOFTBIT_CHECK(multiple >= 1, "padding multiple must be positive");
  SOFTBIT_CHECK(planes.width >= 1 && planes.height >= 1, "empty image");
  const size_t w = (planes.width + multiple - 1) / multiple * multiple;
  const size_t h = (planes.height + multiple - 1) / multiple * multiple;
  ImagePlanes out(w, h);
  for (size_t c = 0; c < 3; ++c) {
    const Plane& src = planes.planes[c];
    Plane& dst = out.planes[c];
    for (size_t y = 0; y < h; ++y) {
      const size_t sy = std::min(y, planes.height - 1);
      for (size_t x = 0; x < w; ++x) {
        dst.At(x, y) = src.At(std::min(x, planes.width - 1), sy);
      }
    }
  }
  return out;
}

ImagePlanes Extract(const ImagePlanes& planes, size_t x0, size_t y0,
                    size_t width, size_t height) {
  SOFTBIT_CHECK(x0 + width <= planes.width && y0 + height <= planes.height,
                "region out of bounds");
  ImagePlanes out(width, height);
  for (size_t c = 0; c < 3; ++c) {
    for (size_t y = 0; y < height; ++y) {
      for (size_t x = 0; x < width; ++x) {
        out.planes[c].At(x, y) = planes.planes[c].At(x0 + x, y0 + y);
      }
    }
  }
  return out;
}

ImagePlanes Crop(const ImagePlanes& planes, size_t width, size_t height) {
  return Extract(planes, 0, 0, width, height);
}

std::vector<PatchOrigin> SamplePatchOrigins(
    std::span<const ImagePlanes> images, size_t size, size_t count,
    uint64_t seed) {
  SOFTBIT_CHECK(size >= 8 && size % 8 == 0,
                "patch size must be a positive multiple of 8");
  if (count == 0) return {};
  SOFTBIT_CHECK(!images.empty(), "no source images");
  for (const ImagePlanes& img : images) {
    SOFTBIT_CHECK(img.width >= size && img.height >= size,
                  "source image smaller than patch size");
  }
  std::mt19937_64 rng(seed);
  std::vector<PatchOrigin> origins(count);
  for (PatchOrigin& o : origins) {
    o.image = std::uniform_int_distribution<size_t>(0, images.size() - 1)(rng);
    const ImagePlanes& img = images[o.image];
    o.x = std::uniform_int_distribution<size_t>(0, img.width - size)(rng);
    o.y = std::uniform_int_distribution<size_t>(0, img.height - size)(rng);
    o.flip_h = (rng() >> 63) != 0;
    o.flip_v = (rng() >> 63) != 0;
  }
  return origins;
}

PatchBatch SamplePatches(std::span<const ImagePlanes> images, size_t size,
                         size_t count, uint64_t seed) {
  PatchBatch batch;
  for (const PatchOrigin& o : SamplePatchOrigins(images, size, count, seed)) {
    const ImagePlanes& src = images[o.image];
    ImagePlanes patch(size, size);
    for (size_t c = 0; c < 3; ++c) {
      for (size_t y = 0; y < size; ++y) {
        const size_t sy = o.y + (o.flip_v ? size - 1 - y : y);
        for (size_t x = 0; x < size; ++x) {
          const size_t sx = o.x + (o.flip_h ? size - 1 - x : x);
          patch.planes[c].At(x, y) = src.planes[c].At(sx, sy);
        }
      }
    }
    batch.patches.push_back(std::move(patch));
  }
  return batch;
}

std::vector<ImagePlanes> SyntheticImages(size_t count, size_t width,
                                         size_t height, uint64_t seed) {
  SOFTBIT_CHECK(width >= 1 && height >= 1, "empty image");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = static_cast<double>(std::max(width, height));

  std::vector<ImagePlanes> images;
  images.reserve(count);
  for (size_t n = 0; n < count; ++n) {
    struct Blob {
      double cx, cy, radius;
      std::array<double, 3> color;
    };
    std::array<double, 3> base;
    std::array<double, 3> gx, gy;
    for (size_t c = 0; c < 3; ++c) {
      base[c] = 0.2 + 0.6 * unit(rng);
      gx[c] = 0.3 * (unit(rng) - 0.5);
      gy[c] = 0.3 * (unit(rng) - 0.5);
    }
    std::vector<Blob> blobs(4 + rng() % 5);
    for (Blob& b : blobs) {
      b.cx = unit(rng) * width;
      b.cy = unit(rng) * height;
      b.radius = scale * (0.08 + 0.25 * unit(rng));
      for (double& v : b.color) v = unit(rng) - 0.5;
    }

    RgbImage rgb(width, height);
    for (size_t y = 0; y < height; ++y) {
      for (size_t x = 0; x < width; ++x) {
        std::array<double, 3> v;
        for (size_t c = 0; c < 3; ++c) {
          v[c] = base[c] + gx[c] * (x / scale - 0.5) +
                 gy[c] * (y / scale - 0.5);
        }
        for (const Blob& b : blobs) {
          const double dx = (x - b.cx) / b.radius;
          const double dy = (y - b.cy) / b.radius;
          const double w = std::exp(-0.5 * (dx * dx + dy * dy));
          for (size_t c = 0; c < 3; ++c) v[c] += w * b.color[c];
        }
        const double texture = 0.02 * gauss(rng);
        uint8_t* px = rgb.Pixel(x, y);
        for (size_t c = 0; c < 3; ++c) px[c] = ToByte(v[c] + texture);
      }
    }
    images.push_back(RgbToYuv(rgb));
  }
  return images;
}

}  // namespace softbit
