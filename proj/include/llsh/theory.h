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
#include <span>
#include <vector>

namespace llsh {

// Angle between two non-zero vectors, in [0, pi].
double angle(std::span<const float> y, std::span<const float> x);

// s = (pi - alpha) / pi and its inverse.
double similarity_from_angle(double alpha);
double angle_from_similarity(double s);

// Probability that one sign bit agrees: (pi - alpha) / pi.
double per_bit_prob(double alpha);
// All r bits agree.
double table_prob(double alpha, std::uint32_t r);
// At least one of b tables agrees: 1 - (1 - p^r)^b.
double multi_table_prob(double alpha, std::uint32_t r, std::uint32_t b);
// Same three, parameterized by similarity s in [0, 1].
double multi_table_prob_s(double s, std::uint32_t r, std::uint32_t b);

// (1/b)^(1/r)
double similarity_threshold(std::uint32_t r, std::uint32_t b);

struct CurvePoint {
  double s;
  double p;
};

struct CurveSpec {
  std::uint32_t r;
  std::uint32_t b;
};

// The four (r, b) configurations plotted together: (1,1), (16,1), (1,8), (16,8).
std::vector<CurveSpec> preset_curves();

// num_points uniformly spaced s values on [0, 1], both ends included.
std::vector<CurvePoint> curve_points(std::uint32_t r, std::uint32_t b, std::uint32_t num_points);

// s at which dP/ds is largest, located by a central-difference scan over
// grid_points evenly spaced interior points.
double steepest_slope_similarity(std::uint32_t r, std::uint32_t b,
                                 std::uint32_t grid_points = 100001);

struct MonteCarloConfig {
  double alpha = 0.0;
  std::uint32_t r = 1;
  std::uint32_t b = 1;
  std::uint32_t d = 64;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
};

struct MonteCarloResult {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double probability = 0.0;
  double theory = 0.0;
  // Binomial standard deviation of the estimate under the theoretical p.
  double standard_error = 0.0;
};

// Per trial: a fresh randomly initialized encoder (d, r, b), a unit vector y
// and a unit vector x at exactly angle alpha from y (x = y cos a + y' sin a
// with y' orthogonal to y). A hit is any table where both keys agree.
MonteCarloResult monte_carlo_collision(const MonteCarloConfig& config);

}  // namespace llsh
