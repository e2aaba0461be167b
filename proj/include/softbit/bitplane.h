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

#ifndef SOFTBIT_BITPLANE_H_
#define SOFTBIT_BITPLANE_H_

// Bitplane scan and context formation shared by the entropy coder and the
// training-time rate model.
//
// Each feature map is coded on its own, most significant plane first, in
// raster order within a plane. Neighbor template around the coded sample X:
//
//     A B C
//     D X E
//       F
//
// A bit is a significance bit while its sample has not produced a one in an
// earlier plane; its context packs the significance of B, D, E, F (as of
// the start of the plane) into 4 bits. Otherwise it is a refinement bit
// whose context is the number of ones among B, D, E, F in the previous
// plane and A, B, C, D in the current plane (0..8). Neighbors outside the
// map count as insignificant / zero.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "softbit/quantizer.h"

namespace softbit {

constexpr int kNumSignificanceContexts = 16;
constexpr int kNumRefinementContexts = 9;
constexpr int kNumContexts = kNumSignificanceContexts + kNumRefinementContexts;

enum class BitKind : uint8_t { kSignificance, kRefinement };

struct ContextId {
  BitKind kind = BitKind::kSignificance;
  uint8_t value = 0;

  // Flat index: significance contexts first, then refinement.
  int Index() const {
    return kind == BitKind::kSignificance ? value
                                          : kNumSignificanceContexts + value;
  }
  static ContextId FromIndex(int index);

  bool operator==(const ContextId&) const = default;
};

// Per-sample significance flags of one feature map.
class SignificanceState {
 public:
  SignificanceState(size_t width, size_t height)
      : width_(width), height_(height), flags_(width * height, 0) {}

  // Out-of-bounds positions are insignificant.
  bool At(long x, long y) const;
  void Set(size_t x, size_t y) { flags_[y * width_ + x] = 1; }
  size_t CountSignificant() const;

  size_t width() const { return width_; }
  size_t height() const { return height_; }

 private:
  size_t width_;
  size_t height_;
  std::vector<uint8_t> flags_;
};

// Bits of one bitplane of one feature map.
class PlaneBits {
 public:
  PlaneBits(size_t width, size_t height)
      : width_(width), height_(height), bits_(width * height, 0) {}

  // Out-of-bounds positions read as zero.
  int At(long x, long y) const;
  void Set(size_t x, size_t y, int bit) {
    bits_[y * width_ + x] = static_cast<uint8_t>(bit);
  }

 private:
  size_t width_;
  size_t height_;
  std::vector<uint8_t> bits_;
};

// sig(B) * 8 + sig(D) * 4 + sig(E) * 2 + sig(F).
ContextId SignificanceContext(const SignificanceState& snapshot, size_t x,
                              size_t y);

// Sum of prev(B, D, E, F) and cur(A, B, C, D). `plane` is the index of the
// plane being coded; plane 0 has no refinement bits and is rejected.
ContextId RefinementContext(int plane, const PlaneBits& prev,
                            const PlaneBits& cur, size_t x, size_t y);

// Context bookkeeping for one feature map. Drive it in coding order:
// BeginPlane, then Context/Record for every position in raster order, then
// EndPlane. Only bits already recorded are ever consulted, so encoder and
// decoder stay in lockstep.
class MapScanner {
 public:
  MapScanner(size_t width, size_t height);

  void BeginPlane(int plane);
  ContextId Context(size_t x, size_t y) const;
  void Record(size_t x, size_t y, int bit);
  void EndPlane();

  const SignificanceState& significance() const { return significance_; }

 private:
  size_t width_;
  size_t height_;
  int plane_ = -1;
  SignificanceState significance_;  // frozen during a plane
  PlaneBits prev_;
  PlaneBits cur_;
};

struct CodedBit {
  size_t channel;
  int plane;
  size_t x;
  size_t y;
  int bit;
  ContextId ctx;
};

// Visits every bit of q in coding order with the context it is coded in.
void ForEachCodedBit(const QuantIndices& q,
                     const std::function<void(const CodedBit&)>& visit);

// Context of every bit, laid out like SoftBitTensor: [sample * bits + k].
std::vector<ContextId> AssignContexts(const QuantIndices& q);

}  // namespace softbit

#endif  // SOFTBIT_BITPLANE_H_
