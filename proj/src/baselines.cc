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

#include "llsh/baselines.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "llsh/common/error.h"
#include "llsh/common/parallel.h"
#include "llsh/common/rng.h"
#include "llsh/simd/kernels.h"

namespace llsh {
namespace {

void check_queries(const FeatureMatrix& ref, std::span<const float> y, const char* who) {
  if (y.size() != ref.dim()) {
    throw DataError(std::string(who) + ": query has d=" + std::to_string(y.size()) +
                    ", reference set has d=" + std::to_string(ref.dim()));
  }
}

std::uint64_t need(const std::optional<std::uint64_t>& v, const char* name, CostMethod method) {
  if (!v) {
    throw UsageError("cost: method " + std::string(cost_method_name(method)) + " needs " + name);
  }
  return *v;
}

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw NumericError("cost: multiplication count overflows 64 bits");
  return out;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw NumericError("cost: multiplication count overflows 64 bits");
  return out;
}

double squared_distance(std::span<const double> center, std::span<const float> x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = center[k] - x[k];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

double feature_distance(std::span<const float> a, std::span<const float> b, Metric metric) {
  return code_distance(a, b, metric);
}

double knn_score(const FeatureMatrix& train, std::span<const float> y, std::uint32_t k,
                 Metric metric) {
  check_queries(train, y, "knn");
  if (k == 0 || k > train.rows()) {
    throw UsageError("knn: K=" + std::to_string(k) + " must be in [1, N=" +
                     std::to_string(train.rows()) + "]");
  }
  std::vector<double> dist(train.rows());
  for (std::size_t i = 0; i < train.rows(); ++i) dist[i] = feature_distance(y, train.row(i), metric);
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  std::sort(dist.begin(), dist.begin() + k);
  double total = 0.0;
  for (std::uint32_t i = 0; i < k; ++i) total += dist[i];
  return total / static_cast<double>(k);
}

std::vector<double> knn_scores(const FeatureMatrix& train, const FeatureMatrix& queries,
                               std::uint32_t k, Metric metric) {
  std::vector<double> out(queries.rows());
  parallel_for(queries.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = knn_score(train, queries.row(i), k, metric);
  });
  return out;
}

KMeansModel kmeans_fit(const FeatureMatrix& train, std::uint32_t k, std::uint32_t max_iterations,
                       std::uint64_t seed) {
  const std::size_t n = train.rows();
  const std::size_t d = train.dim();
  if (k == 0 || k > n) {
    throw UsageError("kmeans: K=" + std::to_string(k) + " must be in [1, N=" + std::to_string(n) + "]");
  }
  if (max_iterations == 0) throw UsageError("kmeans: max iterations t must be >= 1");

  // Partial Fisher-Yates for K distinct starting points.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::vector<double> centers(k * d);
  for (std::uint32_t c = 0; c < k; ++c) {
    const std::size_t pick = c + rng.below(n - c);
    std::swap(order[c], order[pick]);
    auto row = train.row(order[c]);
    std::copy(row.begin(), row.end(), centers.begin() + c * d);
  }

  KMeansModel model;
  std::vector<std::uint32_t> assign(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<std::uint32_t> next(n);
  std::vector<double> cost(n);
  std::vector<double> sums(k * d);
  std::vector<std::uint64_t> counts(k);

  for (std::uint32_t iter = 0; iter < max_iterations; ++iter) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        for (std::uint32_t c = 0; c < k; ++c) {
          const double dist = squared_distance(std::span<const double>(centers).subspan(c * d, d),
                                               train.row(i));
          if (dist < best) {
            best = dist;
            arg = c;
          }
        }
        next[i] = arg;
        cost[i] = best;
      }
    });
    model.inertia.push_back(std::accumulate(cost.begin(), cost.end(), 0.0));
    model.iterations = iter + 1;
    if (next == assign) {
      model.converged = true;
      break;
    }
    assign.swap(next);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = train.row(i);
      double* s = sums.data() + assign[i] * d;
      for (std::size_t q = 0; q < d; ++q) s[q] += row[q];
      ++counts[assign[i]];
    }
    std::vector<bool> taken(n, false);
    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t q = 0; q < d; ++q) {
          centers[c * d + q] = sums[c * d + q] / static_cast<double>(counts[c]);
        }
        continue;
      }
      // Empty: take the not-yet-used point with the largest current cost.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && (far == n || cost[i] > cost[far])) far = i;
      }
      taken[far] = true;
      auto row = train.row(far);
      std::copy(row.begin(), row.end(), centers.begin() + c * d);
    }
  }

  std::vector<float> out(centers.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(centers[i]);
  model.centers = FeatureMatrix(static_cast<std::uint32_t>(d), std::move(out));
  return model;
}

double kmeans_score(const FeatureMatrix& centers, std::span<const float> y, Metric metric) {
  if (centers.rows() == 0) throw DataError("kmeans: no centers");
  check_queries(centers, y, "kmeans");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    best = std::min(best, feature_distance(y, centers.row(c), metric));
  }
  return best;
}

std::vector<double> kmeans_scores(const FeatureMatrix& centers, const FeatureMatrix& queries,
                                  Metric metric) {
  std::vector<double> out(queries.rows());
  parallel_for(queries.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = kmeans_score(centers, queries.row(i), metric);
  });
  return out;
}

std::string_view cost_method_name(CostMethod m) {
  switch (m) {
    case CostMethod::kKnn: return "knn";
    case CostMethod::kKmeans: return "kmeans";
    case CostMethod::kLsh: return "lsh";
    case CostMethod::kLlsh: return "llsh";
    case CostMethod::kLightLlsh: return "light-llsh";
  }
  return "?";
}

CostMethod parse_cost_method(std::string_view name) {
  for (CostMethod m : {CostMethod::kKnn, CostMethod::kKmeans, CostMethod::kLsh, CostMethod::kLlsh,
                       CostMethod::kLightLlsh}) {
    if (cost_method_name(m) == name) return m;
  }
  throw UsageError("unknown cost method '" + std::string(name) +
                   "' (expected knn|kmeans|lsh|llsh|light-llsh)");
}

std::uint64_t cost(CostMethod method, const CostInputs& in) {
  const std::uint64_t d = need(in.d, "d", method);
  const std::uint64_t big_n = need(in.N, "N", method);
  const std::uint64_t big_m = need(in.M, "M", method);
  switch (method) {
    case CostMethod::kKnn:
      return mul(mul(d, big_n), big_m);
    case CostMethod::kKmeans: {
      const std::uint64_t k = need(in.K, "K", method);
      const std::uint64_t t = need(in.t, "t", method);
      return add(mul(mul(mul(d, k), big_n), t), mul(mul(d, k), big_m));
    }
    case CostMethod::kLsh:
    case CostMethod::kLlsh:
    case CostMethod::kLightLlsh: {
      const std::uint64_t r = need(in.r, "r", method);
      const std::uint64_t b = need(in.b, "b", method);
      const std::uint64_t n = need(in.n, "n", method);
      if (r == 0 || b == 0) throw UsageError("cost: r and b must be >= 1");
      std::uint64_t total = add(mul(mul(mul(d, r), b), add(big_m, big_n)), mul(r, n));
      if (method == CostMethod::kLightLlsh) {
        total = add(total, mul(mul(2, r), need(in.m, "m", method)));
      }
      return total;
    }
  }
  throw UsageError("cost: unknown method");
}

std::string format_magnitude(double value, Magnitude unit) {
  struct Unit {
    Magnitude id;
    double scale;
    const char* name;
  };
  static constexpr Unit kUnits[] = {{Magnitude::kTera, 1e12, "Tera"},
                                    {Magnitude::kGiga, 1e9, "Giga"},
                                    {Magnitude::kMega, 1e6, "Mega"},
                                    {Magnitude::kKilo, 1e3, "Kilo"}};
  char buf[64];
  for (const Unit& u : kUnits) {
    if (unit == u.id || (unit == Magnitude::kAuto && value >= u.scale)) {
      std::snprintf(buf, sizeof buf, "%.1f %s", value / u.scale, u.name);
      return buf;
    }
  }
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

std::string format_delta(double difference, Magnitude unit) {
  return format_magnitude(std::fabs(difference), unit) + (difference < 0 ? " less" : " more");
}

std::vector<PaperCostRow> paper_cost_table() {
  CostInputs base;
  base.d = 9216;
  base.N = 792855;
  base.M = 112422;

  auto with = [&](auto fn) {
    CostInputs in = base;
    fn(in);
    return in;
  };
  std::vector<PaperCostRow> rows;
  auto push = [&](std::string label, CostMethod method, CostInputs in) {
    const std::uint64_t count = cost(method, in);
    rows.push_back({std::move(label), method, in, count, format_magnitude(static_cast<double>(count))});
  };
  push("KNN", CostMethod::kKnn, base);
  push("K-means (K=1024)", CostMethod::kKmeans, with([](CostInputs& c) { c.K = 1024; c.t = 300; }));
  push("K-means (K=32)", CostMethod::kKmeans, with([](CostInputs& c) { c.K = 32; c.t = 300; }));
  push("LSH", CostMethod::kLsh, with([](CostInputs& c) { c.r = 32; c.b = 8; c.n = 38150830; }));
  push("LLSH", CostMethod::kLlsh, with([](CostInputs& c) { c.r = 32; c.b = 8; c.n = 209872075; }));
  push("light-LLSH", CostMethod::kLightLlsh,
       with([](CostInputs& c) { c.r = 32; c.b = 8; c.n = 490433; c.m = 5650569; }));

  const double lsh = static_cast<double>(rows[3].multiplications);
  for (std::size_t i = 4; i < rows.size(); ++i) {
    rows[i].printed =
        format_delta(static_cast<double>(rows[i].multiplications) - lsh, Magnitude::kGiga) +
        " than LSH";
  }
  return rows;
}

MeasuredNM measure_n_m(const HashIndex& index, const HashEncoder& encoder,
                       const FeatureMatrix& queries) {
  if (encoder.code_len() != index.code_len() || encoder.num_tables() != index.num_tables()) {
    throw DataError("measure_n_m: encoder and index disagree on r or b");
  }
  std::vector<std::uint64_t> per_query(queries.rows());
  parallel_for(queries.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const ConcatCode code = encoder.encode(queries.row(i));
      std::uint64_t hits = 0;
      for (std::uint32_t j = 0; j < index.num_tables(); ++j) {
        const Bucket* bucket = index.table(j).find(binarize(code.layer(j)));
        if (bucket == nullptr) continue;
        hits += index.variant() == IndexVariant::kLight ? 1 : bucket->count;
      }
      per_query[i] = hits;
    }
  });
  MeasuredNM out;
  for (std::uint64_t h : per_query) out.n += h;
  if (index.variant() == IndexVariant::kLight) {
    for (std::uint32_t j = 0; j < index.num_tables(); ++j) {
      for (const Bucket& bucket : index.table(j).buckets()) out.m += bucket.count;
    }
  }
  return out;
}

}  // namespace llsh
