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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "llsh/common/error.h"
#include "llsh/common/rng.h"
#include "llsh/scoring.h"
#include "test_support.h"

namespace llsh {
namespace {

HashEncoder make_encoder(std::uint32_t d, std::uint32_t r, std::uint32_t b, std::uint64_t seed) {
  EncoderConfig c;
  c.feature_dim = d;
  c.code_len = r;
  c.num_tables = b;
  c.seed = seed;
  return HashEncoder::random(c);
}

QueryConfig raw_config() {
  QueryConfig qc;
  qc.smooth_sigma = 0.0;
  return qc;
}

TEST(BucketDistance, SelfAndHandArithmetic) {
  HashIndex idx(IndexVariant::kFull, 2, 1, 0);
  Bucket b;
  b.key = binarize(std::vector<float>{0.1f, 0.1f});
  b.count = 2;
  b.payload = {0.1f, 0.1f, 0.3f, 0.3f};
  idx.mutable_table(0).append(b);
  idx.set_total_count(2);
  const QueryConfig qc;
  const float h[] = {0.1f, 0.1f};
  const double expected = (0.0 + std::sqrt(2.0) * (0.3 - 0.1)) / 2.0;
  EXPECT_NEAR(bucket_distance(idx, 0, h, qc), expected, 1e-7);
  EXPECT_NEAR(bucket_distance(idx, 0, h, qc), 0.1414, 1e-4);

  const HashIndex light = lighten(idx);
  const float mean[] = {0.2f, 0.2f};
  EXPECT_NEAR(bucket_distance(light, 0, mean, qc), 0.0, 1e-7);

  const float miss[] = {0.9f, 0.1f};
  EXPECT_EQ(bucket_distance(idx, 0, miss, qc), std::sqrt(2.0));
}

TEST(BucketDistance, SentinelDefault) {
  const QueryConfig qc;
  EXPECT_NEAR(qc.sentinel_for(32), 5.657, 1e-3);
  QueryConfig custom;
  custom.sentinel = 9.0;
  EXPECT_EQ(custom.sentinel_for(32), 9.0);
  custom.sentinel = -1.0;
  EXPECT_THROW(custom.validate(), UsageError);
}

TEST(AnomalyScore, IndexedSingletonScoresZero) {
  const HashEncoder e = make_encoder(32, 32, 4, 1);
  const FeatureMatrix xs = testing::random_features(20, 32, 2);
  const HashIndex idx = build_index(e, xs, IndexVariant::kFull);
  const testing::BruteForceScorer oracle(e, xs);
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    bool singleton = false;
    for (std::uint32_t j = 0; j < 4; ++j) singleton |= oracle.group_size(xs.row(i), j) == 1;
    if (singleton) EXPECT_EQ(anomaly_score(idx, e, xs.row(i), QueryConfig{}), 0.0);
  }
}

TEST(AnomalyScore, AllMissGivesSentinel) {
  EncoderConfig c;
  c.feature_dim = 2;
  c.code_len = 1;
  c.num_tables = 2;
  const HashEncoder e(c, {1, 0, 0, 1});
  FeatureMatrix train(2);
  train.append(std::vector<float>{1.0f, 1.0f});
  const HashIndex idx = build_index(e, train, IndexVariant::kFull);
  const float y[] = {-1.0f, -1.0f};
  EXPECT_EQ(anomaly_score(idx, e, y, QueryConfig{}), 1.0);
  QueryConfig qc;
  qc.sentinel = 7.5;
  EXPECT_EQ(anomaly_score(idx, e, y, qc), 7.5);
}

TEST(AnomalyScore, MatchesBruteForceOracle) {
  const HashEncoder e = make_encoder(24, 6, 5, 3);
  const FeatureMatrix xs = testing::random_features(1500, 24, 4);
  const FeatureMatrix qs = testing::random_features(300, 24, 5);
  const testing::BruteForceScorer oracle(e, xs);
  for (IndexVariant v : {IndexVariant::kFull, IndexVariant::kLight}) {
    const HashIndex idx = build_index(e, xs, v);
    for (Metric m : {Metric::kEuclidean, Metric::kCosine}) {
      QueryConfig qc = raw_config();
      qc.metric = m;
      const auto scores = score_features(idx, e, qs, qc);
      for (std::size_t q = 0; q < qs.rows(); ++q) {
        ASSERT_NEAR(scores[q], oracle.score(qs.row(q), v, m, qc.sentinel_for(6)), 1e-5)
            << variant_name(v) << " " << metric_name(m) << " q=" << q;
      }
    }
  }
}

TEST(AnomalyScore, MinOverTables) {
  const HashEncoder e = make_encoder(16, 10, 6, 6);
  const FeatureMatrix xs = testing::random_features(300, 16, 7);
  const FeatureMatrix qs = testing::random_features(200, 16, 8);
  const HashIndex idx = build_index(e, xs, IndexVariant::kFull);
  const QueryConfig qc;
  const double sentinel = qc.sentinel_for(10);
  int misses = 0;
  for (std::size_t q = 0; q < qs.rows(); ++q) {
    const double s = anomaly_score(idx, e, qs.row(q), qc);
    const ConcatCode code = e.encode(qs.row(q));
    bool all_miss = true;
    for (std::uint32_t j = 0; j < 6; ++j) {
      ASSERT_LE(s, bucket_distance(idx, j, code.layer(j), qc));
      all_miss &= idx.table(j).find(binarize(code.layer(j))) == nullptr;
    }
    ASSERT_EQ(s == sentinel, all_miss);
    misses += all_miss;
  }
  EXPECT_GT(misses, 0);
  EXPECT_LT(misses, 200);
}

TEST(AnomalyScore, AddingTableNeverIncreasesScore) {
  const std::uint32_t d = 16, r = 8;
  const HashEncoder big = make_encoder(d, r, 6, 9);
  const FeatureMatrix xs = testing::random_features(400, d, 10);
  const FeatureMatrix qs = testing::random_features(200, d, 11);
  const QueryConfig qc;
  std::vector<double> prev;
  for (std::uint32_t b = 1; b <= 6; ++b) {
    EncoderConfig c = big.config();
    c.num_tables = b;
    const auto w = big.weights().first(std::size_t{b} * r * d);
    const HashEncoder e(c, std::vector<float>(w.begin(), w.end()));
    const HashIndex idx = build_index(e, xs, IndexVariant::kFull);
    std::vector<double> cur;
    for (std::size_t q = 0; q < qs.rows(); ++q) cur.push_back(anomaly_score(idx, e, qs.row(q), qc));
    for (std::size_t q = 0; q < prev.size(); ++q) ASSERT_LE(cur[q], prev[q]);
    prev = cur;
  }
}

TEST(AnomalyScore, FullEqualsLightOnSingletons) {
  const HashEncoder e = make_encoder(32, 24, 1, 12);
  const FeatureMatrix xs = testing::random_features(200, 32, 13);
  const HashIndex full = build_index(e, xs, IndexVariant::kFull);
  const HashIndex light = build_index(e, xs, IndexVariant::kLight);
  const QueryConfig qc;
  int checked = 0;
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    const ConcatCode code = e.encode(xs.row(i));
    const Bucket* b = full.table(0).find(binarize(code.layer(0)));
    ASSERT_NE(b, nullptr);
    if (b->count != 1) continue;
    ++checked;
    EXPECT_EQ(anomaly_score(full, e, xs.row(i), qc), anomaly_score(light, e, xs.row(i), qc));
  }
  EXPECT_GT(checked, 100);
}

TEST(AnomalyScore, ShapeMismatch) {
  const HashEncoder a = make_encoder(8, 4, 2, 1);
  const HashEncoder b = make_encoder(8, 5, 2, 1);
  const HashIndex idx = build_index(a, testing::random_features(5, 8, 1), IndexVariant::kFull);
  const float y[8] = {1};
  EXPECT_THROW(anomaly_score(idx, b, y, QueryConfig{}), DataError);
}

TEST(OpCounter, ChargesEncodingAndComparisons) {
  const HashEncoder e = make_encoder(8, 4, 2, 14);
  const FeatureMatrix xs = testing::random_features(50, 8, 15);
  const HashIndex idx = build_index(e, xs, IndexVariant::kFull);
  const testing::BruteForceScorer oracle(e, xs);
  OpCounter counter;
  anomaly_score(idx, e, xs.row(0), QueryConfig{}, &counter);
  const std::uint64_t n = oracle.group_size(xs.row(0), 0) + oracle.group_size(xs.row(0), 1);
  EXPECT_EQ(counter.codes_compared, n);
  EXPECT_EQ(counter.multiplications, 8u * 4 * 2 + 4 * n);
}

TEST(AssembleFrames, AveragesOverlaps) {
  const double scores[] = {1.0, 3.0};
  const FrameSpan spans[] = {{0, 4}, {2, 4}};
  EXPECT_EQ(assemble_frames(scores, spans, 6), (std::vector<double>{1, 1, 2, 2, 3, 3}));
}

TEST(AssembleFrames, UncoveredTakeNearestEarlierOnTies) {
  const double scores[] = {1.0, 5.0};
  const FrameSpan spans[] = {{2, 1}, {6, 1}};
  // frame 4 is 2 away from both; the earlier frame wins
  EXPECT_EQ(assemble_frames(scores, spans, 9), (std::vector<double>{1, 1, 1, 1, 1, 5, 5, 5, 5}));
}

TEST(AssembleFrames, Errors) {
  const double one[] = {1.0};
  const FrameSpan outside[] = {{5, 2}};
  EXPECT_THROW(assemble_frames(one, outside, 6), DataError);
  const FrameSpan ok[] = {{0, 1}};
  EXPECT_THROW(assemble_frames({}, ok, 3), DataError);
  EXPECT_THROW(assemble_frames({}, {}, 3), DataError);
}

TEST(Smooth, ImpulseCenter) {
  std::vector<double> impulse(21, 0.0);
  impulse[10] = 1.0;
  const auto out = smooth(impulse, 1.0);
  double norm = 0;
  for (int k = -3; k <= 3; ++k) norm += std::exp(-0.5 * k * k);
  EXPECT_NEAR(out[10], 1.0 / norm, 1e-12);
  EXPECT_NEAR(out[10], 0.39905, 1e-5);
  EXPECT_NEAR(out[13], std::exp(-4.5) / norm, 1e-12);
  EXPECT_EQ(out[14], 0.0);
}

TEST(Smooth, IdentityConstantAndMass) {
  const auto xs = testing::random_doubles(37, 3);
  EXPECT_EQ(smooth(xs, 0.0), xs);
  const std::vector<double> flat(25, 0.7);
  for (double v : smooth(flat, 4.0)) EXPECT_NEAR(v, 0.7, 1e-12);
  for (double sigma : {0.5, 1.0, 3.0, 10.0, 40.0}) {
    const auto out = smooth(xs, sigma);
    EXPECT_NEAR(std::accumulate(out.begin(), out.end(), 0.0), std::accumulate(xs.begin(), xs.end(), 0.0), 1e-9)
        << sigma;
  }
  EXPECT_THROW(smooth(xs, -1.0), UsageError);
}

TEST(ScoreVideo, IdentityPipeline) {
  const HashEncoder e = make_encoder(8, 6, 3, 16);
  const FeatureMatrix xs = testing::random_features(100, 8, 17);
  const FeatureMatrix ys = testing::random_features(30, 8, 18);
  const HashIndex idx = build_index(e, xs, IndexVariant::kFull);
  std::vector<FrameSpan> spans;
  for (std::uint64_t t = 0; t < 30; ++t) spans.push_back({t, 1});
  const QueryConfig qc = raw_config();
  const ScoreSeries s = score_video(idx, e, ys, spans, 30, qc, "v");
  EXPECT_EQ(s.video_id, "v");
  EXPECT_EQ(s.scores, score_features(idx, e, ys, qc));

  QueryConfig mm = qc;
  mm.per_video_minmax = true;
  mm.smooth_sigma = 2.0;
  const ScoreSeries n = score_video(idx, e, ys, spans, 30, mm);
  EXPECT_EQ(*std::min_element(n.scores.begin(), n.scores.end()), 0.0);
  EXPECT_EQ(*std::max_element(n.scores.begin(), n.scores.end()), 1.0);
}

TEST(MinMax, ConstantBecomesZero) {
  std::vector<double> v(5, 3.0);
  minmax_normalize(v);
  EXPECT_EQ(v, std::vector<double>(5, 0.0));
}

TEST(Metric, Names) {
  EXPECT_EQ(parse_metric("cosine"), Metric::kCosine);
  EXPECT_EQ(metric_name(Metric::kEuclidean), "euclidean");
  EXPECT_THROW(parse_metric("manhattan"), UsageError);
}

}  // namespace
}  // namespace llsh
