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

#include "softbit/bitplane.h"

#include <algorithm>

#include "softbit/status.h"

namespace softbit {

ContextId ContextId::FromIndex(int index) {
  SOFTBIT_CHECK(index >= 0 && index < kNumContexts, "context index range");
  if (index < kNumSignificanceContexts) {
    return {BitKind::kSignificance, static_cast<uint8_t>(index)};
  }
  return {BitKind::kRefinement,
          static_cast<uint8_t>(index - kNumSignificanceContexts)};
}

bool SignificanceState::At(long x, long y) const {
  if (x < 0 || y < 0 || x >= static_cast<long>(width_) ||
      y >= static_cast<long>(height_)) {
    return false;
  }
  return flags_[y * width_ + x] != 0;
}

size_t SignificanceState::CountSignificant() const {
  return static_cast<size_t>(std::count(flags_.begin(), flags_.end(), 1));
}

int PlaneBits::At(long x, long y) const {
  if (x < 0 || y < 0 || x >= static_cast<long>(width_) ||
      y >= static_cast<long>(height_)) {
    return 0;
  }
  return bits_[y * width_ + x];
}

ContextId SignificanceContext(const SignificanceState& snapshot, size_t x,
                              size_t y) {
  SOFTBIT_CHECK(x < snapshot.width() && y < snapshot.height(),
                "position out of bounds");
  const long sx = static_cast<long>(x);
  const long sy = static_cast<long>(y);
  const int b = snapshot.At(sx, sy - 1);
  const int d = snapshot.At(sx - 1, sy);
  const int e = snapshot.At(sx + 1, sy);
  const int f = snapshot.At(sx, sy + 1);
  return {BitKind::kSignificance, static_cast<uint8_t>(b * 8 + d * 4 + e * 2 + f)};
}

ContextId RefinementContext(int plane, const PlaneBits& prev,
                            const PlaneBits& cur, size_t x, size_t y) {
  SOFTBIT_CHECK(plane > 0, "no refinement bits on the most significant plane");
  const long sx = static_cast<long>(x);
  const long sy = static_cast<long>(y);
  const int sum = prev.At(sx, sy - 1) + prev.At(sx - 1, sy) +
                  prev.At(sx + 1, sy) + prev.At(sx, sy + 1) +
                  cur.At(sx - 1, sy - 1) + cur.At(sx, sy - 1) +
                  cur.At(sx + 1, sy - 1) + cur.At(sx - 1, sy);
  return {BitKind::kRefinement, static_cast<uint8_t>(sum)};
}

MapScanner::MapScanner(size_t width, size_t height)
    : width_(width),
      height_(height),
      significance_(width, height),
      prev_(width, height),
      cur_(width, height) {}

void MapScanner::BeginPlane(int plane) {
  SOFTBIT_CHECK(plane == plane_ + 1, "planes must be visited in order");
  plane_ = plane;
}

ContextId MapScanner::Context(size_t x, size_t y) const {
  if (!significance_.At(static_cast<long>(x), static_cast<long>(y))) {
    return SignificanceContext(significance_, x, y);
  }
  return RefinementContext(plane_, prev_, cur_, x, y);
}

void MapScanner::Record(size_t x, size_t y, int bit) { cur_.Set(x, y, bit); }

void MapScanner::EndPlane() {
  for (size_t y = 0; y < height_; ++y) {
    for (size_t x = 0; x < width_; ++x) {
      if (cur_.At(static_cast<long>(x), static_cast<long>(y))) {
        significance_.Set(x, y);
      }
    }
  }
  std::swap(prev_, cur_);
  cur_ = PlaneBits(width_, height_);
}

void ForEachCodedBit(const QuantIndices& q,
                     const std::function<void(const CodedBit&)>& visit) {
  const TensorShape& s = q.shape;
  for (size_t c = 0; c < s.channels; ++c) {
    MapScanner scanner(s.width, s.height);
    for (int k = 0; k < q.bits; ++k) {
      scanner.BeginPlane(k);
      for (size_t y = 0; y < s.height; ++y) {
        for (size_t x = 0; x < s.width; ++x) {
          const int bit = HardBit(q.indices[s.Index(c, x, y)], k, q.bits);
          const ContextId ctx = scanner.Context(x, y);
          visit(CodedBit{c, k, x, y, bit, ctx});
          scanner.Record(x, y, bit);
        }
      }
      scanner.EndPlane();
    }
  }
}

std::vector<ContextId> AssignContexts(const QuantIndices& q) {
  std::vector<ContextId> contexts(q.indices.size() * q.bits);
  ForEachCodedBit(q, [&](const CodedBit& cb) {
    contexts[q.shape.Index(cb.channel, cb.x, cb.y) * q.bits + cb.plane] =
        cb.ctx;
  });
  return contexts;
}

}  // namespace softbit
