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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llsh/encoder.h"
#include "llsh/features.h"
#include "llsh/index.h"
#include "llsh/scoring.h"

namespace llsh {

// Distance between two feature vectors under the scoring metrics.
double feature_distance(std::span<const float> a, std::span<const float> b, Metric metric);

// Mean distance from y to its K nearest rows of train (exhaustive scan).
double knn_score(const FeatureMatrix& train, std::span<const float> y, std::uint32_t k,
                 Metric metric = Metric::kEuclidean);
std::vector<double> knn_scores(const FeatureMatrix& train, const FeatureMatrix& queries,
                               std::uint32_t k, Metric metric = Metric::kEuclidean);

struct KMeansModel {
  FeatureMatrix centers;
  std::vector<double> inertia;  // sum of squared distances after each assignment
  std::uint32_t iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm (squared Euclidean) from K distinct seeded random points,
// at most max_iterations rounds, stopping once assignments repeat. A cluster
// left empty is re-seeded with the point farthest from its center.
KMeansModel kmeans_fit(const FeatureMatrix& train, std::uint32_t k, std::uint32_t max_iterations,
                       std::uint64_t seed);

// Distance to the nearest center.
double kmeans_score(const FeatureMatrix& centers, std::span<const float> y,
                    Metric metric = Metric::kEuclidean);
std::vector<double> kmeans_scores(const FeatureMatrix& centers, const FeatureMatrix& queries,
                                  Metric metric = Metric::kEuclidean);

enum class CostMethod { kKnn, kKmeans, kLsh, kLlsh, kLightLlsh };

std::string_view cost_method_name(CostMethod m);
CostMethod parse_cost_method(std::string_view name);

struct CostInputs {
  std::optional<std::uint64_t> d, N, M, K, t, r, b, n, m;
};

// Multiplication count:
//   knn         d N M
//   kmeans      d K N t + d K M
//   lsh, llsh   d r b (M + N) + r n
//   light-llsh  d r b (M + N) + 2 r m + r n
// UsageError when a needed field is missing, NumericError on 64-bit overflow.
std::uint64_t cost(CostMethod method, const CostInputs& inputs);

enum class Magnitude { kAuto, kTera, kGiga, kMega, kKilo };

// "821.5 Tera", "5.5 Giga", ... one decimal. kAuto picks the largest unit not
// exceeding the value.
std::string format_magnitude(double value, Magnitude unit = Magnitude::kAuto);
// "<magnitude> more" / "<magnitude> less" for a signed difference.
std::string format_delta(double difference, Magnitude unit = Magnitude::kAuto);

struct PaperCostRow {
  std::string label;
  CostMethod method;
  CostInputs inputs;
  std::uint64_t multiplications;
  std::string printed;  // as formatted for the table
};

// The efficiency table at its published parameters. The LLSH and light rows
// print their difference from the LSH row in Giga.
std::vector<PaperCostRow> paper_cost_table();

struct MeasuredNM {
  std::uint64_t n = 0;  // stored codes compared against at query time
  std::uint64_t m = 0;  // codes folded into bucket means at index time
};

MeasuredNM measure_n_m(const HashIndex& index, const HashEncoder& encoder,
                       const FeatureMatrix& queries);

}  // namespace llsh
