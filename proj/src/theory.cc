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

#include "llsh/theory.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "llsh/common/error.h"
#include "llsh/common/parallel.h"
#include "llsh/common/rng.h"
#include "llsh/encoder.h"
#include "llsh/simd/kernels.h"

namespace llsh {
namespace {

constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= kPi)) {
    throw UsageError("angle " + std::to_string(alpha) + " outside [0, pi]");
  }
}

void check_rb(std::uint32_t r, std::uint32_t b) {
  if (r == 0 || b == 0) throw UsageError("r and b must be >= 1");
}

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw UsageError("similarity " + std::to_string(s) + " outside [0, 1]");
}

// 1 - (1 - q)^b with q = s^r, stable near q = 0.
double amplify(double s, std::uint32_t r, std::uint32_t b) {
  const double q = std::pow(s, static_cast<double>(r));
  if (b == 1) return q;
  if (q >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(b) * std::log1p(-q));
}

void unit_gaussian(Rng& rng, std::vector<double>& v) {
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
}

}  // namespace

double angle(std::span<const float> y, std::span<const float> x) {
  if (y.size() != x.size()) throw DataError("angle: vectors differ in dimension");
  const double yy = simd::dot(y, y);
  const double xx = simd::dot(x, x);
  if (!(yy > 0.0) || !(xx > 0.0)) throw DataError("angle: zero vector");
  const double c = std::clamp(simd::dot(y, x) / std::sqrt(yy * xx), -1.0, 1.0);
  return std::acos(c);
}

double similarity_from_angle(double alpha) {
  check_alpha(alpha);
  return (kPi - alpha) / kPi;
}

double angle_from_similarity(double s) {
  check_s(s);
  return kPi * (1.0 - s);
}

double per_bit_prob(double alpha) { return similarity_from_angle(alpha); }

double table_prob(double alpha, std::uint32_t r) {
  check_rb(r, 1);
  return std::pow(per_bit_prob(alpha), static_cast<double>(r));
}

double multi_table_prob(double alpha, std::uint32_t r, std::uint32_t b) {
  check_rb(r, b);
  return amplify(per_bit_prob(alpha), r, b);
}

double multi_table_prob_s(double s, std::uint32_t r, std::uint32_t b) {
  check_rb(r, b);
  check_s(s);
  return amplify(s, r, b);
}

double similarity_threshold(std::uint32_t r, std::uint32_t b) {
  check_rb(r, b);
  return std::pow(1.0 / static_cast<double>(b), 1.0 / static_cast<double>(r));
}

std::vector<CurveSpec> preset_curves() { return {{1, 1}, {16, 1}, {1, 8}, {16, 8}}; }

std::vector<CurvePoint> curve_points(std::uint32_t r, std::uint32_t b, std::uint32_t num_points) {
  check_rb(r, b);
  if (num_points < 2) throw UsageError("curve: need at least 2 points");
  std::vector<CurvePoint> out(num_points);
  for (std::uint32_t i = 0; i < num_points; ++i) {
    const double s = i == num_points - 1 ? 1.0 : static_cast<double>(i) / (num_points - 1);
    out[i] = {s, amplify(s, r, b)};
  }
  return out;
}

double steepest_slope_similarity(std::uint32_t r, std::uint32_t b, std::uint32_t grid_points) {
  check_rb(r, b);
  if (grid_points < 3) throw UsageError("slope scan: need at least 3 grid points");
  const double h = 1.0 / (grid_points + 1);
  double best_s = 0.0;
  double best_slope = -1.0;
  for (std::uint32_t i = 1; i <= grid_points; ++i) {
    const double s = i * h;
    const double slope = (amplify(std::min(s + h, 1.0), r, b) - amplify(s - h, r, b)) / (2.0 * h);
    if (slope > best_slope) {
      best_slope = slope;
      best_s = s;
    }
  }
  return best_s;
}

MonteCarloResult monte_carlo_collision(const MonteCarloConfig& config) {
  check_alpha(config.alpha);
  check_rb(config.r, config.b);
  if (config.d < 2) throw UsageError("monte carlo: d must be >= 2");
  if (config.trials == 0) throw UsageError("monte carlo: trials must be >= 1");

  const std::size_t d = config.d;
  const double ca = std::cos(config.alpha);
  const double sa = std::sin(config.alpha);
  std::vector<std::uint8_t> hit(config.trials, 0);

  parallel_for(config.trials, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> y(d), perp(d);
    std::vector<float> yf(d), xf(d);
    for (std::size_t t = lo; t < hi; ++t) {
      Rng rng = Rng::substream(config.seed, 2 * t);
      unit_gaussian(rng, y);
      // Orthonormal completion; redraw in the measure-zero degenerate case.
      for (;;) {
        unit_gaussian(rng, perp);
        double proj = 0.0;
        for (std::size_t k = 0; k < d; ++k) proj += perp[k] * y[k];
        double norm2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          perp[k] -= proj * y[k];
          norm2 += perp[k] * perp[k];
        }
        if (norm2 > 1e-12) {
          const double inv = 1.0 / std::sqrt(norm2);
          for (double& v : perp) v *= inv;
          break;
        }
      }
      for (std::size_t k = 0; k < d; ++k) {
        yf[k] = static_cast<float>(y[k]);
        xf[k] = static_cast<float>(y[k] * ca + perp[k] * sa);
      }
      if (config.alpha == 0.0) xf = yf;

      EncoderConfig ec;
      ec.feature_dim = config.d;
      ec.code_len = config.r;
      ec.num_tables = config.b;
      ec.seed = splitmix64(config.seed ^ splitmix64(2 * t + 1));
      const HashEncoder encoder = HashEncoder::random(ec);
      const ConcatCode cy = encoder.encode(yf);
      const ConcatCode cx = encoder.encode(xf);
      for (std::uint32_t j = 0; j < config.b; ++j) {
        if (binarize(cy.layer(j)) == binarize(cx.layer(j))) {
          hit[t] = 1;
          break;
        }
      }
    }
  });

  MonteCarloResult result;
  result.trials = config.trials;
  for (std::uint8_t h : hit) result.hits += h;
  result.probability = static_cast<double>(result.hits) / static_cast<double>(result.trials);
  result.theory = multi_table_prob(config.alpha, config.r, config.b);
  result.standard_error =
      std::sqrt(result.theory * (1.0 - result.theory) / static_cast<double>(result.trials));
  return result;
}

}  // namespace llsh
