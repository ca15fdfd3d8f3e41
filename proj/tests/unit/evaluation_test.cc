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
#include <limits>
#include <vector>

#include "llsh/common/error.h"
#include "llsh/common/rng.h"
#include "llsh/evaluation.h"
#include "llsh/scoring.h"
#include "test_support.h"

namespace llsh {
namespace {

using Labels = std::vector<std::uint8_t>;

// Scores drawn from a few levels so ties are frequent.
LabeledVideo random_video(Rng& rng, std::size_t n, std::string id, int levels = 0) {
  LabeledVideo v{std::move(id), {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t label = rng.uniform() < 0.3 ? 1 : 0;
    double s = rng.normal() + label;
    if (levels > 0) s = std::floor(s * levels) / levels;
    v.scores.push_back(s);
    v.labels.push_back(label);
  }
  v.labels[0] = 0;
  v.labels[1] = 1;
  return v;
}

TEST(RocAuc, Examples) {
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, Labels{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.2, 0.9, 0.5, 0.4}, Labels{0, 1, 0, 1}), 0.75);
  EXPECT_EQ(roc_auc(std::vector<double>(6, 0.3), Labels{0, 1, 1, 0, 0, 1}), 0.5);
  EXPECT_EQ(roc_auc(std::vector<double>{0.9, 0.1}, Labels{0, 1}), 0.0);
}

TEST(RocAuc, Errors) {
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, Labels{1, 1}), DataError);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, Labels{0, 0}), DataError);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1}, Labels{0, 1}), DataError);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, Labels{0, 2}), DataError);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, std::nan("")}, Labels{0, 1}), NumericError);
}

TEST(RocAuc, MatchesPairwiseOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    const LabeledVideo v = random_video(rng, n, "v", trial % 2 ? 4 : 0);
    EXPECT_NEAR(roc_auc(v.scores, v.labels), testing::pairwise_auc(v.scores, v.labels), 1e-12) << trial;
  }
}

TEST(RocAuc, MonotoneInvariance) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const LabeledVideo v = random_video(rng, 150, "v", 5);
    const double a = 0.5 + rng.uniform(), c = rng.normal();
    std::vector<double> mapped;
    for (double s : v.scores) mapped.push_back(std::exp(a * s) + c + std::atan(s));
    EXPECT_EQ(roc_auc(mapped, v.labels), roc_auc(v.scores, v.labels));
  }
}

TEST(RocAuc, NegationComplements) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const LabeledVideo v = random_video(rng, 120, "v");
    std::vector<double> neg;
    for (double s : v.scores) neg.push_back(-s);
    EXPECT_NEAR(roc_auc(v.scores, v.labels) + roc_auc(neg, v.labels), 1.0, 1e-12);
  }
}

TEST(MicroAuc, SingleVideoEqualsMacro) {
  Rng rng(4);
  const std::vector<LabeledVideo> run = {random_video(rng, 80, "a")};
  EXPECT_EQ(micro_auc(run), macro_auc(run).auc);
}

TEST(MicroAuc, DuplicationInvariant) {
  Rng rng(5);
  const LabeledVideo v = random_video(rng, 90, "a", 3);
  const std::vector<LabeledVideo> run = {v, LabeledVideo{"b", v.scores, v.labels}};
  EXPECT_NEAR(micro_auc(run), roc_auc(v.scores, v.labels), 1e-12);
}

TEST(MicroAuc, MatchesPairwiseOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<LabeledVideo> run;
    std::vector<double> all_s;
    Labels all_l;
    for (int v = 0; v < 3; ++v) {
      run.push_back(random_video(rng, 20 + rng.below(100), "v" + std::to_string(v), 6));
      all_s.insert(all_s.end(), run.back().scores.begin(), run.back().scores.end());
      all_l.insert(all_l.end(), run.back().labels.begin(), run.back().labels.end());
    }
    EXPECT_NEAR(micro_auc(run), testing::pairwise_auc(all_s, all_l), 1e-12);
  }
}

TEST(MacroAuc, MeanAndSkipping) {
  const std::vector<LabeledVideo> run = {
      {"perfect", {0.1, 0.9}, {0, 1}},
      {"normal", {0.3, 0.4, 0.5}, {0, 0, 0}},
      {"chance", {0.5, 0.5}, {1, 0}},
  };
  const MacroAuc m = macro_auc(run);
  EXPECT_EQ(m.auc, 0.75);
  EXPECT_EQ(m.used, (std::vector<std::string>{"perfect", "chance"}));
  EXPECT_EQ(m.per_video, (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(m.skipped, (std::vector<std::string>{"normal"}));
  const std::vector<LabeledVideo> none = {{"normal", {0.3}, {0}}};
  EXPECT_THROW(macro_auc(none), DataError);
}

TEST(MacroAuc, InvariantToPerVideoMinMax) {
  Rng rng(7);
  std::vector<LabeledVideo> run, scaled;
  for (int v = 0; v < 4; ++v) {
    run.push_back(random_video(rng, 60, "v" + std::to_string(v)));
    LabeledVideo s = run.back();
    for (double& x : s.scores) x = x * (v + 1) + 10 * v;
    minmax_normalize(s.scores);
    scaled.push_back(std::move(s));
  }
  EXPECT_NEAR(macro_auc(run).auc, macro_auc(scaled).auc, 1e-12);
}

TEST(MicroAuc, NotInvariantToPerVideoMinMax) {
  // Video a lives on [0, 10], video b on [0, 1]: min-max reorders across videos.
  const std::vector<LabeledVideo> raw = {
      {"a", {0.0, 2.0, 10.0}, {0, 1, 0}},
      {"b", {0.0, 0.5, 1.0}, {0, 0, 1}},
  };
  std::vector<LabeledVideo> scaled = raw;
  for (auto& v : scaled) minmax_normalize(v.scores);
  EXPECT_NEAR(micro_auc(raw), 6.0 / 8, 1e-12);
  EXPECT_NEAR(micro_auc(scaled), 5.5 / 8, 1e-12);
  EXPECT_EQ(macro_auc(raw).auc, macro_auc(scaled).auc);
}

}  // namespace
}  // namespace llsh
