#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "softbit/bitplane.h"
#include "softbit/entropy_codec.h"
#include "softbit/image.h"
#include "softbit/range_coder.h"
#include "softbit/status.h"
#include "test_util.h"

namespace softbit {
namespace {

ErrorCode DecodeError(const std::vector<uint8_t>& bytes) {
  try {
    Decode(ParseBitstream(bytes));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode unexpectedly succeeded");
  return ErrorCode::kPrecondition;
}

// Oracle: the coding traversal recomputed straight from the indices, with
// no scanner state. Significance before plane k means a 1 in planes < k.
struct OracleBit {
  size_t c;
  int k;
  size_t x, y;
  int bit;
  int ctx_index;
};

std::vector<OracleBit> OracleTraversal(const QuantIndices& q) {
  const TensorShape& s = q.shape;
  const int b = q.bits;
  auto in = [&](long x, long y) {
    return x >= 0 && y >= 0 && x < long(s.width) && y < long(s.height);
  };
  auto value = [&](size_t c, long x, long y) -> uint32_t {
    return in(x, y) ? q.indices[s.Index(c, size_t(x), size_t(y))] : 0u;
  };
  auto bit_of = [&](size_t c, long x, long y, int k) -> int {
    if (k < 0 || !in(x, y)) return 0;
    return (value(c, x, y) >> (b - 1 - k)) & 1;
  };
  auto sig_before = [&](size_t c, long x, long y, int k) -> int {
    return (value(c, x, y) >> (b - k)) != 0 ? 1 : 0;
  };
  std::vector<OracleBit> out;
  for (size_t c = 0; c < s.channels; ++c) {
    for (int k = 0; k < b; ++k) {
      for (long y = 0; y < long(s.height); ++y) {
        for (long x = 0; x < long(s.width); ++x) {
          int ctx;
          if (k == 0 || !sig_before(c, x, y, k)) {
            ctx = 8 * sig_before(c, x, y - 1, k) + 4 * sig_before(c, x - 1, y, k) +
                  2 * sig_before(c, x + 1, y, k) + sig_before(c, x, y + 1, k);
          } else {
            ctx = kNumSignificanceContexts +
                  bit_of(c, x, y - 1, k - 1) + bit_of(c, x - 1, y, k - 1) +
                  bit_of(c, x + 1, y, k - 1) + bit_of(c, x, y + 1, k - 1) +
                  bit_of(c, x - 1, y - 1, k) + bit_of(c, x, y - 1, k) +
                  bit_of(c, x + 1, y - 1, k) + bit_of(c, x - 1, y, k);
          }
          out.push_back({c, k, size_t(x), size_t(y), bit_of(c, x, y, k), ctx});
        }
      }
    }
  }
  return out;
}

TEST_CASE("significance context examples") {
  SignificanceState s(3, 3);
  CHECK(SignificanceContext(s, 1, 1).value == 0);
  s.Set(1, 0);  // B of (1,1)
  CHECK(SignificanceContext(s, 1, 1) == ContextId{BitKind::kSignificance, 8});
  s.Set(0, 1);  // D
  s.Set(2, 1);  // E
  s.Set(1, 2);  // F
  CHECK(SignificanceContext(s, 1, 1).value == 15);
  // Corner: B and D are outside the map.
  SignificanceState corner(2, 2);
  corner.Set(1, 0);
  CHECK(SignificanceContext(corner, 0, 0).value == 2);
  corner.Set(0, 1);
  CHECK(SignificanceContext(corner, 0, 0).value == 3);
  // Diagonal neighbours do not count.
  SignificanceState diag(3, 3);
  diag.Set(0, 0);
  diag.Set(2, 2);
  CHECK(SignificanceContext(diag, 1, 1).value == 0);
}

TEST_CASE("refinement context examples") {
  PlaneBits prev(3, 3), cur(3, 3);
  CHECK(RefinementContext(1, prev, cur, 1, 1).value == 0);
  // prev(B,D,E,F) = (1,1,0,1), cur(A,B,C,D) = (1,0,0,0) -> 4.
  prev.Set(1, 0, 1);
  prev.Set(0, 1, 1);
  prev.Set(1, 2, 1);
  cur.Set(0, 0, 1);
  const ContextId ctx = RefinementContext(2, prev, cur, 1, 1);
  CHECK(ctx.kind == BitKind::kRefinement);
  CHECK(ctx.value == 4);
  PlaneBits all_prev(3, 3), all_cur(3, 3);
  for (size_t y = 0; y < 3; ++y) {
    for (size_t x = 0; x < 3; ++x) {
      all_prev.Set(x, y, 1);
      all_cur.Set(x, y, 1);
    }
  }
  CHECK(RefinementContext(1, all_prev, all_cur, 1, 1).value == 8);
  CHECK_THROWS_AS(RefinementContext(0, prev, cur, 1, 1), Error);
}

TEST_CASE("context ids flatten and restore") {
  for (int i = 0; i < kNumContexts; ++i) {
    CHECK(ContextId::FromIndex(i).Index() == i);
  }
  CHECK(ContextId::FromIndex(16) == ContextId{BitKind::kRefinement, 0});
}

TEST_CASE("coding traversal matches the stateless oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const TensorShape s{1 + rng() % 9, 1 + rng() % 9, 1 + rng() % 3};
    const int b = 1 + int(rng() % 6);
    QuantIndices q = testing::RandomIndices(s, b, rng);
    // Sparse tensors exercise the significance path more.
    if (trial % 2) {
      for (uint32_t& v : q.indices) v >>= rng() % (b + 1);
    }
    const std::vector<OracleBit> oracle = OracleTraversal(q);
    std::vector<CodedBit> got;
    ForEachCodedBit(q, [&](const CodedBit& cb) { got.push_back(cb); });
    REQUIRE(got.size() == oracle.size());
    for (size_t i = 0; i < got.size(); ++i) {
      REQUIRE(got[i].channel == oracle[i].c);
      REQUIRE(got[i].plane == oracle[i].k);
      REQUIRE(got[i].x == oracle[i].x);
      REQUIRE(got[i].y == oracle[i].y);
      REQUIRE(got[i].bit == oracle[i].bit);
      REQUIRE(got[i].ctx.Index() == oracle[i].ctx_index);
    }
    const std::vector<ContextId> assigned = AssignContexts(q);
    REQUIRE(assigned.size() == s.size() * b);
    for (const OracleBit& o : oracle) {
      const size_t sample = s.Index(o.c, o.x, o.y);
      REQUIRE(assigned[sample * b + o.k].Index() == o.ctx_index);
    }
  }
}

TEST_CASE("significance grows monotonically across planes") {
  std::mt19937_64 rng(8);
  const QuantIndices q = testing::RandomIndices({6, 5, 1}, 5, rng);
  MapScanner scanner(6, 5);
  size_t prev = 0;
  for (int k = 0; k < 5; ++k) {
    scanner.BeginPlane(k);
    for (size_t y = 0; y < 5; ++y) {
      for (size_t x = 0; x < 6; ++x) {
        scanner.Context(x, y);
        scanner.Record(x, y, HardBit(q.indices[q.shape.Index(0, x, y)], k, 5));
      }
    }
    scanner.EndPlane();
    const size_t now = scanner.significance().CountSignificant();
    CHECK(now >= prev);
    prev = now;
  }
}

TEST_CASE("count model probabilities and rescaling") {
  BinaryContextModel m;
  CHECK(m.ProbOne() == 32768);
  // Oracle: replay the count rule.
  uint32_t c0 = 1, c1 = 1;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5000; ++i) {
    const int bit = (rng() % 10) < 3;
    m.Update(bit);
    (bit ? c1 : c0) += 1;
    if (c0 + c1 >= 1024) {
      c0 = (c0 + 1) / 2;
      c1 = (c1 + 1) / 2;
    }
    REQUIRE(m.c0() == c0);
    REQUIRE(m.c1() == c1);
    REQUIRE(m.c0() + m.c1() <= kCountLimit);
    const uint64_t p = (uint64_t(c1) << 16) / (c0 + c1);
    REQUIRE(m.ProbOne() == std::clamp<uint64_t>(p, 1, 65535));
  }
  BinaryContextModel ones;
  for (int i = 0; i < 100000; ++i) ones.Update(1);
  CHECK(ones.ProbOne() <= 65535);
  CHECK(ones.c0() >= 1);
}

TEST_CASE("range coder round trips fixed and adaptive probabilities") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = rng() % 3000;
    std::vector<int> bits(n);
    std::vector<uint32_t> probs(n);
    for (size_t i = 0; i < n; ++i) {
      probs[i] = 1 + uint32_t(rng() % 65535);
      bits[i] = (rng() % 65536) < probs[i];
    }
    RangeEncoder enc;
    BinaryContextModel em;
    for (size_t i = 0; i < n; ++i) {
      if (i % 2) {
        enc.Encode(bits[i], probs[i]);
      } else {
        enc.Encode(bits[i], em);
      }
    }
    const std::vector<uint8_t> out = enc.Finish();
    RangeDecoder dec(out);
    BinaryContextModel dm;
    for (size_t i = 0; i < n; ++i) {
      const int b = (i % 2) ? dec.Decode(probs[i]) : dec.Decode(dm);
      REQUIRE(b == bits[i]);
    }
    CHECK(dec.ExactlyConsumed());
  }
}

TEST_CASE("extreme probabilities survive carries") {
  RangeEncoder enc;
  std::vector<int> bits;
  for (int i = 0; i < 20000; ++i) bits.push_back(i % 97 == 0 ? 0 : 1);
  for (int b : bits) enc.Encode(b, 65535);
  for (int b : bits) enc.Encode(1 - b, 1);
  const std::vector<uint8_t> out = enc.Finish();
  RangeDecoder dec(out);
  for (int b : bits) REQUIRE(dec.Decode(65535) == b);
  for (int b : bits) REQUIRE(dec.Decode(1) == 1 - b);
}

TEST_CASE("code length is within 64 bits of the model's self-information") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const TensorShape s{1 + rng() % 17, 1 + rng() % 17, 1 + rng() % 8};
    const int b = 1 + int(rng() % 8);
    const QuantIndices q = testing::RandomIndices(s, b, rng);
    double info = 0.0;
    const Bitstream bs = Encode(q, uint32_t(s.width * 8), uint32_t(s.height * 8),
                                [&](const CodedBit& cb, uint32_t p1) {
                                  const double p = p1 / 65536.0;
                                  info -= std::log2(cb.bit ? p : 1.0 - p);
                                });
    CHECK(8.0 * bs.payload.size() <= info + 64.0);
  }
}

TEST_CASE("lossless round trip on random and degenerate tensors") {
  std::mt19937_64 rng(99);
  const size_t channel_choices[] = {1, 4, 8, 16};
  for (int trial = 0; trial < 300; ++trial) {
    const TensorShape s{1 + rng() % 17, 1 + rng() % 17, channel_choices[rng() % 4]};
    const int b = 1 + int(rng() % 8);
    QuantIndices q = testing::RandomIndices(s, b, rng);
    if (trial % 3 == 1) {
      for (uint32_t& v : q.indices) v >>= rng() % (b + 1);
    }
    const Bitstream bs = Encode(q);
    REQUIRE(Decode(ParseBitstream(bs.Serialize())) == q);
  }
  QuantIndices one({1, 1, 1}, 1);
  one.indices[0] = 1;
  CHECK(Decode(Encode(one)) == one);
  QuantIndices deep({3, 2, 1}, 16);
  deep.indices = {0, 65535, 1, 32768, 12345, 54321};
  CHECK(Decode(Encode(deep)) == deep);
}

TEST_CASE("all-zero tensors compress well") {
  QuantIndices zero({16, 16, 4}, 4);
  const Bitstream bs = Encode(zero);
  CHECK(bs.payload.size() < 512);
  CHECK(bs.payload.size() < 64);
  CHECK(Decode(bs) == zero);
}

TEST_CASE("uniform random indices are incompressible") {
  std::mt19937_64 rng(5);
  size_t payload = 0, raw_bits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const QuantIndices q = testing::RandomIndices({16, 16, 4}, 4, rng);
    payload += Encode(q).payload.size();
    raw_bits += q.shape.size() * 4;
  }
  CHECK(double(payload) >= 0.98 * double(raw_bits) / 8.0);
}

TEST_CASE("header layout and bpp arithmetic") {
  QuantIndices q({2, 3, 5}, 7);
  const Bitstream bs = Encode(q, 13, 20);
  const std::vector<uint8_t> bytes = bs.Serialize();
  REQUIRE(bytes.size() >= kBitstreamHeaderSize);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SBC1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 7);
  CHECK(bytes[6] == 5);
  CHECK(bytes[7] == 0);
  CHECK(bytes[8] == 16);   // padded W
  CHECK(bytes[12] == 24);  // padded H
  CHECK(bytes[16] == 13);  // original W
  CHECK(bytes[20] == 20);  // original H
  CHECK(ParseBitstream(bytes).header == bs.header);

  Bitstream fake;
  fake.header.bits = 4;
  fake.header.channels = 4;
  fake.header.padded_width = fake.header.original_width = 128;
  fake.header.padded_height = fake.header.original_height = 128;
  fake.payload.assign(512, 0);
  CHECK(ActualBpp(fake) == doctest::Approx(536.0 * 8 / 16384));
  CHECK(ActualBpp(fake) == doctest::Approx(0.2617).epsilon(1e-3));
}

TEST_CASE("bpp stays under the raw bound") {
  // Adaptive models pay a learning cost per context, so the 2% margin is
  // checked on 64x64 grids.
  std::mt19937_64 rng(31);
  for (int b = 1; b <= 8; ++b) {
    const QuantIndices q = testing::RandomIndices({64, 64, 4}, b, rng);
    const Bitstream bs = Encode(q);
    const double raw = double(4 * b) / 64.0;
    const double header = 8.0 * kBitstreamHeaderSize / (512.0 * 512.0);
    CHECK(ActualBpp(bs) <= raw * 1.02 + header);
  }
}

TEST_CASE("decode errors are distinct") {
  std::mt19937_64 rng(4);
  const QuantIndices q = testing::RandomIndices({5, 4, 3}, 6, rng);
  const std::vector<uint8_t> good = Encode(q).Serialize();

  std::vector<uint8_t> magic = good;
  magic[0] = 'X';
  CHECK(DecodeError(magic) == ErrorCode::kBadMagic);

  std::vector<uint8_t> version = good;
  version[4] = 2;
  CHECK(DecodeError(version) == ErrorCode::kBadVersion);

  std::vector<uint8_t> header_only(good.begin(), good.begin() + 10);
  CHECK(DecodeError(header_only) == ErrorCode::kTruncatedBitstream);

  std::vector<uint8_t> cut(good.begin(), good.end() - good.size() / 3);
  CHECK(DecodeError(cut) == ErrorCode::kTruncatedBitstream);

  std::vector<uint8_t> trailing = good;
  trailing.insert(trailing.end(), {1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(DecodeError(trailing) == ErrorCode::kInconsistentBitstream);

  std::vector<uint8_t> bad_bits = good;
  bad_bits[5] = 0;
  CHECK(DecodeError(bad_bits) == ErrorCode::kInconsistentBitstream);

  std::vector<uint8_t> bad_size = good;
  bad_size[8] = 12;  // padded width not a multiple of 8
  CHECK(DecodeError(bad_size) == ErrorCode::kInconsistentBitstream);

  std::vector<uint8_t> bad_orig = good;
  bad_orig[16] = 41;  // original width larger than padded width
  CHECK(DecodeError(bad_orig) == ErrorCode::kInconsistentBitstream);
}

// Golden vectors: fixed tensors and their expected streams, byte-exact.
struct GoldenCase {
  std::string name;
  QuantIndices q;
  uint32_t ow, oh;
};

std::vector<GoldenCase> GoldenCases() {
  std::vector<GoldenCase> cases;
  QuantIndices one({1, 1, 1}, 1);
  one.indices[0] = 1;
  cases.push_back({"single_bit", one, 8, 8});

  QuantIndices ramp({5, 3, 2}, 3);
  for (size_t c = 0; c < 2; ++c) {
    for (size_t y = 0; y < 3; ++y) {
      for (size_t x = 0; x < 5; ++x) {
        ramp.indices[ramp.shape.Index(c, x, y)] = uint32_t(c * 7 + x * 3 + y * 5) % 8;
      }
    }
  }
  cases.push_back({"ramp_5x3x2_b3", ramp, 37, 20});

  cases.push_back({"zeros_16x16x4_b4", QuantIndices({16, 16, 4}, 4), 128, 128});

  QuantIndices lcg({9, 7, 3}, 6);
  uint32_t state = 12345;
  for (uint32_t& v : lcg.indices) {
    state = state * 1103515245u + 12345u;
    v = (state >> 16) % 64;
  }
  cases.push_back({"lcg_9x7x3_b6", lcg, 72, 56});
  return cases;
}

TEST_CASE("golden bitstreams are byte-exact") {
  const std::filesystem::path dir = SOFTBIT_GOLDEN_DIR;
  const bool regenerate = std::getenv("SOFTBIT_WRITE_GOLDEN") != nullptr;
  for (const GoldenCase& g : GoldenCases()) {
    CAPTURE(g.name);
    const std::vector<uint8_t> bytes = Encode(g.q, g.ow, g.oh).Serialize();
    const std::filesystem::path file = dir / (g.name + ".sbc");
    if (regenerate) WriteFileAtomic(file, bytes);
    REQUIRE(std::filesystem::exists(file));
    CHECK(ReadFile(file) == bytes);
    CHECK(Decode(ParseBitstream(ReadFile(file))) == g.q);
  }
}

}  // namespace
}  // namespace softbit
