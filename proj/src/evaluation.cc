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

#include "llsh/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "llsh/common/error.h"

namespace llsh {
namespace {

bool has_both_classes(std::span<const std::uint8_t> labels) {
  bool pos = false, neg = false;
  for (std::uint8_t l : labels) (l ? pos : neg) = true;
  return pos && neg;
}

void check_video(const LabeledVideo& v) {
  if (v.scores.size() != v.labels.size()) {
    throw DataError("video '" + v.video_id + "': " + std::to_string(v.scores.size()) +
                    " scores but " + std::to_string(v.labels.size()) + " labels");
  }
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("auc: " + std::to_string(scores.size()) + " scores but " +
                    std::to_string(labels.size()) + " labels");
  }
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw DataError("auc: label at " + std::to_string(i) + " is not 0 or 1");
    if (std::isnan(scores[i])) throw NumericError("auc: score at " + std::to_string(i) + " is NaN");
    positives += labels[i];
  }
  const std::uint64_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("auc: undefined with a single class (" + std::to_string(positives) +
                    " positive, " + std::to_string(negatives) + " negative frames)");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of positive ranks, doubled so midranks stay integral.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos_in_group = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) pos_in_group += labels[order[j++]];
    // Ranks i+1 .. j, midrank (i+1+j)/2.
    twice_rank_sum += pos_in_group * (i + 1 + j);
    i = j;
  }
  const double u = static_cast<double>(twice_rank_sum) / 2.0 -
                   static_cast<double>(positives) * static_cast<double>(positives + 1) / 2.0;
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double micro_auc(std::span<const LabeledVideo> run) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (const LabeledVideo& v : run) {
    check_video(v);
    scores.insert(scores.end(), v.scores.begin(), v.scores.end());
    labels.insert(labels.end(), v.labels.begin(), v.labels.end());
  }
  return roc_auc(scores, labels);
}

MacroAuc macro_auc(std::span<const LabeledVideo> run) {
  MacroAuc out;
  for (const LabeledVideo& v : run) {
    check_video(v);
    if (!has_both_classes(v.labels)) {
      out.skipped.push_back(v.video_id);
      continue;
    }
    out.per_video.push_back(roc_auc(v.scores, v.labels));
    out.used.push_back(v.video_id);
  }
  if (out.per_video.empty()) throw DataError("macro auc: no video contains both classes");
  double total = 0.0;
  for (double a : out.per_video) total += a;
  out.auc = total / static_cast<double>(out.per_video.size());
  return out;
}

}  // namespace llsh
