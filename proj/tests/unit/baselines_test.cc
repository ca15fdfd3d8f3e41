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
#include <limits>
#include <numeric>
#include <vector>

#include "llsh/baselines.h"
#include "llsh/common/error.h"
#include "llsh/common/rng.h"
#include "llsh/scoring.h"
#include "test_support.h"

namespace llsh {
namespace {

// Distances come from the shared kernel; selection and averaging are redone here.
double naive_knn(const FeatureMatrix& train, std::span<const float> y, std::uint32_t k) {
  std::vector<double> d;
  for (std::size_t i = 0; i < train.rows(); ++i) d.push_back(feature_distance(y, train.row(i), Metric::kEuclidean));
  std::sort(d.begin(), d.end());
  double total = 0;
  for (std::uint32_t i = 0; i < k; ++i) total += d[i];
  return total / k;
}

FeatureMatrix permuted(const FeatureMatrix& m, std::uint64_t seed) {
  std::vector<std::size_t> perm(m.rows());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  FeatureMatrix out(m.dim());
  for (std::size_t i : perm) out.append(m.row(i));
  return out;
}

TEST(Knn, SelfIsZero) {
  const FeatureMatrix xs = testing::random_features(30, 5, 1);
  for (std::size_t i = 0; i < xs.rows(); ++i) EXPECT_EQ(knn_score(xs, xs.row(i), 1), 0.0);
}

TEST(Knn, AllPointsIsMeanDistance) {
  const FeatureMatrix xs = testing::random_features(40, 5, 2);
  const FeatureMatrix ys = testing::random_features(5, 5, 3);
  for (std::size_t q = 0; q < ys.rows(); ++q) {
    double total = 0;
    for (std::size_t i = 0; i < xs.rows(); ++i) total += feature_distance(xs.row(i), ys.row(q), Metric::kEuclidean);
    EXPECT_NEAR(knn_score(xs, ys.row(q), 40), total / 40, 1e-12);
  }
}

TEST(Knn, MatchesSortOracle) {
  const FeatureMatrix xs = testing::random_features(100, 7, 4);
  const FeatureMatrix ys = testing::random_features(50, 7, 5);
  for (std::uint32_t k : {1u, 3u, 10u, 100u}) {
    const auto scores = knn_scores(xs, ys, k);
    for (std::size_t q = 0; q < ys.rows(); ++q) ASSERT_EQ(scores[q], naive_knn(xs, ys.row(q), k)) << k;
  }
}

TEST(Knn, PermutationInvariant) {
  const FeatureMatrix xs = testing::random_features(80, 6, 6);
  const FeatureMatrix ps = permuted(xs, 7);
  const FeatureMatrix ys = testing::random_features(20, 6, 8);
  EXPECT_EQ(knn_scores(xs, ys, 5), knn_scores(ps, ys, 5));
}

TEST(Knn, Errors) {
  const FeatureMatrix xs = testing::random_features(3, 2, 9);
  const float y[] = {0, 1};
  EXPECT_THROW(knn_score(xs, y, 0), UsageError);
  EXPECT_THROW(knn_score(xs, y, 4), UsageError);
  const float bad[] = {0, 1, 2};
  EXPECT_THROW(knn_score(xs, bad, 1), DataError);
}

TEST(KMeans, KEqualsNGivesThePoints) {
  const FeatureMatrix xs = testing::random_features(12, 3, 10);
  const KMeansModel m = kmeans_fit(xs, 12, 20, 11);
  ASSERT_EQ(m.centers.rows(), 12u);
  for (std::size_t i = 0; i < xs.rows(); ++i) EXPECT_EQ(kmeans_score(m.centers, xs.row(i)), 0.0);
  EXPECT_TRUE(m.converged);
  EXPECT_EQ(m.inertia.back(), 0.0);
}

TEST(KMeans, RecoversSeparatedBlobs) {
  Rng rng(12);
  FeatureMatrix xs(2);
  const double means[2][2] = {{-5, 0}, {5, 3}};
  for (int i = 0; i < 400; ++i) {
    const auto& m = means[i % 2];
    xs.append(std::vector<float>{float(m[0] + 0.5 * rng.normal()), float(m[1] + 0.5 * rng.normal())});
  }
  double emp[2][2] = {};
  for (int i = 0; i < 400; ++i) {
    emp[i % 2][0] += xs.row(i)[0] / 200.0;
    emp[i % 2][1] += xs.row(i)[1] / 200.0;
  }
  for (std::uint64_t seed : {1, 2, 3}) {
    const KMeansModel m = kmeans_fit(xs, 2, 50, seed);
    for (int b = 0; b < 2; ++b) {
      double best = 1e9;
      for (std::size_t c = 0; c < 2; ++c) {
        best = std::min(best, std::hypot(m.centers.row(c)[0] - emp[b][0], m.centers.row(c)[1] - emp[b][1]));
      }
      EXPECT_LT(best, 0.1) << "seed " << seed;
      EXPECT_LT(std::hypot(emp[b][0] - means[b][0], emp[b][1] - means[b][1]), 0.1);
    }
  }
}

TEST(KMeans, InertiaNonIncreasing) {
  const FeatureMatrix xs = testing::random_features(500, 8, 13);
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const KMeansModel m = kmeans_fit(xs, 16, 100, seed);
    ASSERT_GE(m.inertia.size(), 2u);
    for (std::size_t i = 1; i < m.inertia.size(); ++i) {
      ASSERT_LE(m.inertia[i], m.inertia[i - 1] * (1 + 1e-12)) << i;
    }
  }
}

TEST(KMeans, SeededAndValidated) {
  const FeatureMatrix xs = testing::random_features(100, 4, 14);
  EXPECT_EQ(kmeans_fit(xs, 5, 10, 7).centers, kmeans_fit(xs, 5, 10, 7).centers);
  EXPECT_THROW(kmeans_fit(xs, 0, 10, 7), UsageError);
  EXPECT_THROW(kmeans_fit(xs, 101, 10, 7), UsageError);
  EXPECT_THROW(kmeans_fit(xs, 5, 0, 7), UsageError);
}

TEST(KMeans, DuplicatePointsDoNotLeaveEmptyClusters) {
  FeatureMatrix xs(2);
  for (int i = 0; i < 10; ++i) xs.append(std::vector<float>{1.0f, 1.0f});
  xs.append(std::vector<float>{5.0f, 5.0f});
  xs.append(std::vector<float>{-5.0f, 5.0f});
  const KMeansModel m = kmeans_fit(xs, 3, 20, 1);
  for (std::size_t i = 0; i < xs.rows(); ++i) EXPECT_NEAR(kmeans_score(m.centers, xs.row(i)), 0.0, 1e-6);
}

TEST(KMeansScore, Definitions) {
  const FeatureMatrix centers = testing::random_features(6, 3, 15);
  const FeatureMatrix ys = testing::random_features(20, 3, 16);
  for (std::size_t i = 0; i < centers.rows(); ++i) EXPECT_EQ(kmeans_score(centers, centers.row(i)), 0.0);
  for (std::size_t q = 0; q < ys.rows(); ++q) {
    EXPECT_EQ(kmeans_score(centers, ys.row(q)), knn_score(centers, ys.row(q), 1));
  }
  FeatureMatrix one(3);
  one.append(centers.row(0));
  EXPECT_EQ(kmeans_score(one, ys.row(0)), feature_distance(one.row(0), ys.row(0), Metric::kEuclidean));
  EXPECT_EQ(kmeans_scores(centers, ys), kmeans_scores(permuted(centers, 17), ys));
}

TEST(Cost, Formulas) {
  CostInputs in;
  in.d = 10;
  in.N = 100;
  in.M = 7;
  in.K = 4;
  in.t = 3;
  in.r = 5;
  in.b = 2;
  in.n = 11;
  in.m = 13;
  EXPECT_EQ(cost(CostMethod::kKnn, in), 10u * 100 * 7);
  EXPECT_EQ(cost(CostMethod::kKmeans, in), 10u * 4 * 100 * 3 + 10 * 4 * 7);
  EXPECT_EQ(cost(CostMethod::kLsh, in), 10u * 5 * 2 * 107 + 5 * 11);
  EXPECT_EQ(cost(CostMethod::kLlsh, in), cost(CostMethod::kLsh, in));
  EXPECT_EQ(cost(CostMethod::kLightLlsh, in), 10u * 5 * 2 * 107 + 2 * 5 * 13 + 5 * 11);
  CostInputs missing = in;
  missing.K.reset();
  EXPECT_THROW(cost(CostMethod::kKmeans, missing), UsageError);
  EXPECT_NO_THROW(cost(CostMethod::kKnn, missing));
}

TEST(Cost, Overflow) {
  CostInputs in;
  in.d = std::numeric_limits<std::uint64_t>::max() / 2;
  in.N = 3;
  in.M = 1;
  EXPECT_THROW(cost(CostMethod::kKnn, in), NumericError);
}

TEST(Cost, PaperColumns) {
  CostInputs in;
  in.d = 9216;
  in.N = 792855;
  in.M = 112422;
  const std::uint64_t knn = cost(CostMethod::kKnn, in);
  EXPECT_EQ(knn, 9216ull * 792855 * 112422);
  EXPECT_NEAR(double(knn), 8.2146e14, 0.0001e14);
  EXPECT_EQ(format_magnitude(double(knn)), "821.5 Tera");
  in.K = 32;
  in.t = 300;
  EXPECT_NEAR(double(cost(CostMethod::kKmeans, in)), 7.02e13, 0.01e13);
  EXPECT_EQ(format_magnitude(double(cost(CostMethod::kKmeans, in))), "70.2 Tera");
  in.r = 32;
  in.b = 8;
  in.n = 38150830;
  EXPECT_NEAR(double(cost(CostMethod::kLsh, in)), 2.1e12, 0.05e12);
  EXPECT_EQ(format_magnitude(double(cost(CostMethod::kLsh, in))), "2.1 Tera");
}

TEST(Cost, PaperTable) {
  const auto rows = paper_cost_table();
  std::vector<std::string> printed;
  for (const auto& row : rows) {
    printed.push_back(row.printed);
    EXPECT_EQ(row.multiplications, cost(row.method, row.inputs)) << row.label;
  }
  const std::vector<std::string> expect = {"821.5 Tera", "2245.8 Tera", "70.2 Tera", "2.1 Tera",
                                           "5.5 Giga more than LSH", "0.8 Giga less than LSH"};
  EXPECT_EQ(printed, expect);
}

TEST(Magnitude, Formatting) {
  EXPECT_EQ(format_magnitude(999.0), "999.0");
  EXPECT_EQ(format_magnitude(1500.0), "1.5 Kilo");
  EXPECT_EQ(format_magnitude(2.25e6), "2.2 Mega");  // round half even on the binary value
  EXPECT_EQ(format_magnitude(3.0e9, Magnitude::kTera), "0.0 Tera");
  EXPECT_EQ(format_delta(5.5e9), "5.5 Giga more");
  EXPECT_EQ(format_delta(-8.4e8, Magnitude::kGiga), "0.8 Giga less");
  EXPECT_EQ(parse_cost_method("light-llsh"), CostMethod::kLightLlsh);
  EXPECT_EQ(cost_method_name(CostMethod::kKmeans), "kmeans");
  EXPECT_THROW(parse_cost_method("fast"), UsageError);
}

TEST(MeasureNM, MissesAndSingleton) {
  EncoderConfig c;
  c.feature_dim = 2;
  c.code_len = 1;
  c.num_tables = 2;
  const HashEncoder e(c, {1, 0, 0, 1});
  FeatureMatrix train(2);
  train.append(std::vector<float>{1.0f, 1.0f});
  const HashIndex idx = build_index(e, train, IndexVariant::kFull);
  FeatureMatrix miss(2);
  miss.append(std::vector<float>{-1.0f, -1.0f});
  miss.append(std::vector<float>{-2.0f, -0.5f});
  EXPECT_EQ(measure_n_m(idx, e, miss).n, 0u);
  FeatureMatrix one(2);
  one.append(std::vector<float>{1.0f, -1.0f});  // agrees in table 0 only
  EXPECT_EQ(measure_n_m(idx, e, one).n, 1u);
  EXPECT_EQ(measure_n_m(idx, e, one).m, 0u);
  const HashIndex light = build_index(e, train, IndexVariant::kLight);
  EXPECT_EQ(measure_n_m(light, e, one).n, 1u);
  EXPECT_EQ(measure_n_m(light, e, one).m, 2u);
}

TEST(MeasureNM, MatchesInstrumentedScorer) {
  const std::uint32_t d = 16, r = 6, b = 4;
  EncoderConfig c;
  c.feature_dim = d;
  c.code_len = r;
  c.num_tables = b;
  c.seed = 18;
  const HashEncoder e = HashEncoder::random(c);
  const FeatureMatrix train = testing::random_features(700, d, 19);
  const FeatureMatrix queries = testing::random_features(150, d, 20);
  for (IndexVariant v : {IndexVariant::kFull, IndexVariant::kLight}) {
    const HashIndex idx = build_index(e, train, v);
    OpCounter counter;
    for (std::size_t q = 0; q < queries.rows(); ++q) anomaly_score(idx, e, queries.row(q), QueryConfig{}, &counter);
    const MeasuredNM nm = measure_n_m(idx, e, queries);
    EXPECT_EQ(nm.n, counter.codes_compared);
    CostInputs in;
    in.d = d;
    in.N = train.rows();
    in.M = queries.rows();
    in.r = r;
    in.b = b;
    in.n = nm.n;
    in.m = nm.m;
    // The scorer does not see index-time encoding of the N training rows.
    const std::uint64_t index_time = std::uint64_t{d} * r * b * train.rows();
    if (v == IndexVariant::kFull) {
      EXPECT_EQ(cost(CostMethod::kLsh, in), counter.multiplications + index_time);
    } else {
      EXPECT_EQ(nm.m, b * train.rows());
      EXPECT_EQ(cost(CostMethod::kLightLlsh, in), counter.multiplications + index_time + 2 * r * nm.m);
    }
  }
}

}  // namespace
}  // namespace llsh
