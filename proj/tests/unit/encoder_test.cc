// Copyright 2026 The LLSH Authors.
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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"
#include "llsh/encoder.h"
#include "test_support.h"

namespace llsh {
namespace {

constexpr double kPinnedWeightMean = -6.0127066664825146e-4;

EncoderConfig config(std::uint32_t d, std::uint32_t r, std::uint32_t b, std::uint64_t seed) {
  EncoderConfig c;
  c.feature_dim = d;
  c.code_len = r;
  c.num_tables = b;
  c.seed = seed;
  return c;
}

TEST(EncoderConfig, RejectsZeroSizes) {
  EXPECT_THROW(config(0, 1, 1, 0).validate(), UsageError);
  EXPECT_THROW(config(1, 0, 1, 0).validate(), UsageError);
  EXPECT_THROW(config(1, 1, 0, 0).validate(), UsageError);
  EXPECT_NO_THROW(config(1, 1, 1, 0).validate());
}

TEST(Encoder, RandomRowsHaveUnitNorm) {
  const HashEncoder e = HashEncoder::random(config(4, 2, 1, 7));
  for (std::uint32_t i = 0; i < 2; ++i) {
    double s = 0;
    for (float w : e.row(0, i)) s += double(w) * w;
    EXPECT_NEAR(std::sqrt(s), 1.0, 1e-6);
  }
  const HashEncoder big = HashEncoder::random(config(64, 32, 8, 3));
  for (std::uint32_t j = 0; j < 8; ++j) {
    for (std::uint32_t i = 0; i < 32; ++i) {
      double s = 0;
      for (float w : big.row(j, i)) s += double(w) * w;
      ASSERT_NEAR(std::sqrt(s), 1.0, 1e-6);
    }
  }
}

TEST(Encoder, SameSeedSameBytes) {
  const auto c = config(16, 8, 3, 99);
  EXPECT_EQ(HashEncoder::random(c).serialize(), HashEncoder::random(c).serialize());
  EXPECT_NE(HashEncoder::random(c).weights()[0], HashEncoder::random(config(16, 8, 3, 100)).weights()[0]);
}

TEST(Encoder, WeightMeanNearZero) {
  const HashEncoder e = HashEncoder::random(config(64, 32, 8, 0));
  ASSERT_EQ(e.weights().size(), 16384u);
  double sum = 0;
  for (float w : e.weights()) sum += w;
  const double mean = sum / 16384.0;
  EXPECT_LT(std::abs(mean), 0.05);
  EXPECT_NEAR(mean, kPinnedWeightMean, 1e-9);
}

TEST(Encoder, ZeroPreactivationGivesHalf) {
  const HashEncoder e(config(2, 2, 1, 0), {1, 0, 0, 1});
  const float x[] = {0.0f, 3.0f};
  const HashCode h = e.forward_layer(0, x);
  EXPECT_EQ(h[0], 0.5f);
  EXPECT_GT(h[1], 0.5f);
}

TEST(Encoder, HandEvaluatedSigmoid) {
  const HashEncoder e(config(2, 1, 1, 0), {1, 0});
  const float x[] = {3.0f, 4.0f};
  const HashCode h = e.forward_layer(0, x);
  EXPECT_NEAR(h[0], 1.0 / (1.0 + std::exp(-0.6)), 1e-7);
  EXPECT_NEAR(h[0], 0.6457, 5e-5);
}

TEST(Encoder, NoNormalizationUsesRawInput) {
  auto c = config(2, 1, 1, 0);
  c.normalize_input = false;
  const HashEncoder e(c, {1, 0});
  const float x[] = {3.0f, 4.0f};
  EXPECT_NEAR(e.forward_layer(0, x)[0], 1.0 / (1.0 + std::exp(-3.0)), 1e-7);
}

TEST(Encoder, ScaleInvariant) {
  const HashEncoder e = HashEncoder::random(config(32, 16, 4, 5));
  const FeatureMatrix xs = testing::random_features(50, 32, 6);
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    std::vector<float> x2(xs.row(i).begin(), xs.row(i).end());
    for (float& v : x2) v *= 2.0f;
    const ConcatCode a = e.encode(xs.row(i));
    const ConcatCode b = e.encode(x2);
    ASSERT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST(Encoder, ZeroVectorRejectedWhenNormalizing) {
  const HashEncoder e = HashEncoder::random(config(3, 2, 1, 0));
  const float zero[] = {0, 0, 0};
  EXPECT_THROW(e.encode(zero), DataError);
  const float wrong_dim[] = {1, 2};
  EXPECT_THROW(e.encode(wrong_dim), DataError);
}

TEST(Encoder, ConcatLayoutAndSlicing) {
  const HashEncoder one = HashEncoder::random(config(8, 5, 1, 1));
  const FeatureMatrix xs = testing::random_features(3, 8, 2);
  const ConcatCode c1 = one.encode(xs.row(0));
  EXPECT_EQ(c1.layer_code(0), one.forward_layer(0, xs.row(0)));

  const HashEncoder two = HashEncoder::random(config(8, 2, 2, 1));
  const ConcatCode c2 = two.encode(xs.row(1));
  ASSERT_EQ(c2.values().size(), 4u);
  EXPECT_EQ(c2.values()[0], two.forward_layer(0, xs.row(1))[0]);
  EXPECT_EQ(c2.values()[1], two.forward_layer(0, xs.row(1))[1]);

  const HashEncoder many = HashEncoder::random(config(8, 7, 5, 3));
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    const ConcatCode c = many.encode(xs.row(i));
    for (std::uint32_t j = 0; j < 5; ++j) EXPECT_EQ(c.layer_code(j), many.forward_layer(j, xs.row(i)));
  }
}

TEST(Encoder, CodesStrictlyInsideUnitInterval) {
  auto c = config(4, 3, 2, 0);
  c.normalize_input = false;
  const HashEncoder e(c, std::vector<float>(24, 1e6f));
  const float big[] = {1, 1, 1, 1};
  const float neg[] = {-1, -1, -1, -1};
  const ConcatCode up = e.encode(big), down = e.encode(neg);
  for (float v : up.values()) {
    EXPECT_GT(v, 0.0f);
    EXPECT_LT(v, 1.0f);
    EXPECT_GE(v, 0.5f);
  }
  for (float v : down.values()) {
    EXPECT_GT(v, 0.0f);
    EXPECT_LT(v, 0.5f);
  }
}

TEST(CodeValue, KeepsSignTest) {
  for (double a : {-1e9, -40.0, -1e-12, -1e-30, 0.0, 1e-30, 1e-12, 40.0, 1e9}) {
    const float v = code_value(a);
    EXPECT_GT(v, 0.0f) << a;
    EXPECT_LT(v, 1.0f) << a;
    EXPECT_EQ(v >= 0.5f, a >= 0.0) << a;
  }
}

TEST(Binarize, Boundary) {
  const float h[] = {0.7f, 0.5f, 0.49f};
  EXPECT_EQ(binarize(h).bits(), (std::vector<bool>{true, true, false}));
  const std::vector<float> halves(13, 0.5f);
  const BinaryKey k = binarize(halves);
  EXPECT_EQ(k.num_bits(), 13u);
  for (std::uint32_t i = 0; i < 13; ++i) EXPECT_TRUE(k.bit(i));
  EXPECT_EQ(k.bytes()[1], 0x1f);  // high bits of the last byte stay zero
}

TEST(Binarize, EqualsSignOfPreactivation) {
  const auto c = config(16, 12, 3, 21);
  const HashEncoder e = HashEncoder::random(c);
  const FeatureMatrix xs = testing::random_features(200, 16, 22);
  for (std::size_t n = 0; n < xs.rows(); ++n) {
    const double scale = e.input_scale(xs.row(n));
    const ConcatCode code = e.encode(xs.row(n));
    for (std::uint32_t j = 0; j < 3; ++j) {
      const BinaryKey key = binarize(code.layer(j));
      for (std::uint32_t i = 0; i < 12; ++i) {
        double a = 0;
        for (std::uint32_t k = 0; k < 16; ++k) a += double(e.row(j, i)[k]) * xs.row(n)[k];
        ASSERT_EQ(key.bit(i), a * scale >= 0.0);
      }
    }
  }
}

TEST(BinaryKey, PackingAndValidation) {
  const bool bits[] = {true, false, true, true, false, false, false, false, true};
  const BinaryKey k = BinaryKey::from_bits(bits);
  ASSERT_EQ(k.bytes().size(), 2u);
  EXPECT_EQ(k.bytes()[0], 0x0d);
  EXPECT_EQ(k.bytes()[1], 0x01);
  EXPECT_THROW(BinaryKey(9, {0x00, 0x02}), DataError);  // padding bit set
  EXPECT_THROW(BinaryKey(9, {0x00}), DataError);        // wrong byte count
}

TEST(EncoderIo, RoundTripScores) {
  testing::TempDir dir;
  const HashEncoder e = HashEncoder::random(config(10, 6, 3, 4));
  save_encoder(e, dir / "e.bin");
  const HashEncoder back = load_encoder(dir / "e.bin");
  EXPECT_EQ(back, e);
  EXPECT_EQ(back.serialize(), e.serialize());
  EXPECT_EQ(back.fingerprint(), e.fingerprint());
  const FeatureMatrix xs = testing::random_features(20, 10, 5);
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    const ConcatCode a = e.encode(xs.row(i)), b = back.encode(xs.row(i));
    ASSERT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST(EncoderIo, TruncatedAndBadMagic) {
  const HashEncoder e = HashEncoder::random(config(10, 6, 3, 4));
  auto bytes = e.serialize();
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{12}, bytes.size() - 1}) {
    std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + cut);
    EXPECT_THROW(HashEncoder::deserialize(part, "t"), DataError) << cut;
  }
  bytes[0] ^= 0xff;
  try {
    HashEncoder::deserialize(bytes, "bad.enc");
    FAIL();
  } catch (const DataError& err) {
    EXPECT_NE(std::string(err.what()).find("bad.enc"), std::string::npos);
  }
}

TEST(EncoderIo, FingerprintTracksWeights) {
  HashEncoder e = HashEncoder::random(config(5, 3, 2, 8));
  const auto before = e.fingerprint();
  e.mutable_weights()[4] += 1e-3f;
  EXPECT_NE(e.fingerprint(), before);
}

}  // namespace
}  // namespace llsh
