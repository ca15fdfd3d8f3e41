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
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"
#include "llsh/data/feature_file.h"
#include "llsh/data/labels.h"
#include "llsh/data/manifest.h"
#include "llsh/data/score_csv.h"
#include "llsh/data/synth.h"
#include "test_support.h"

namespace llsh {
namespace {

namespace fs = std::filesystem;

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

TEST(FeatureFile, RoundTripWithAndWithoutSpans) {
  testing::TempDir dir;
  FeatureFile plain{testing::random_features(7, 5, 1), std::nullopt};
  save_features(plain, dir / "a.fvs");
  const FeatureFile a = load_features(dir / "a.fvs");
  EXPECT_EQ(a.features, plain.features);
  EXPECT_FALSE(a.spans.has_value());
  EXPECT_EQ(a.serialize(), plain.serialize());
  EXPECT_EQ(a.spans_or_identity()[3], (FrameSpan{3, 1}));

  FeatureFile timed{testing::random_features(3, 2, 2), std::vector<FrameSpan>{{0, 16}, {8, 16}, {1ull << 40, 1}}};
  const auto bytes = timed.serialize();
  EXPECT_EQ(bytes.size(), 8u + 4 + 8 + 1 + 3 * (2 * 4 + 8 + 4));
  const FeatureFile b = FeatureFile::deserialize(bytes, "t");
  EXPECT_EQ(b.features, timed.features);
  EXPECT_EQ(b.spans, timed.spans);
  EXPECT_EQ(b.serialize(), bytes);
}

TEST(FeatureFile, TruncatedPayloadNamesOffset) {
  FeatureFile f{testing::random_features(4, 3, 3), std::nullopt};
  auto bytes = f.serialize();
  bytes.resize(bytes.size() - 5);
  const std::string msg = error_of([&] { FeatureFile::deserialize(bytes, "cut.fvs"); });
  EXPECT_NE(msg.find("cut.fvs"), std::string::npos) << msg;
  EXPECT_NE(msg.find("offset 21"), std::string::npos) << msg;
}

TEST(FeatureFile, RejectsMalformedHeaders) {
  FeatureFile f{testing::random_features(2, 3, 4), std::vector<FrameSpan>{{0, 1}, {1, 1}}};
  const auto good = f.serialize();
  auto magic = good;
  magic[7] = '2';
  EXPECT_NE(error_of([&] { FeatureFile::deserialize(magic, "m"); }), "");
  auto flags = good;
  flags[20] |= 0x80;
  EXPECT_NE(error_of([&] { FeatureFile::deserialize(flags, "f"); }), "");
  auto extra = good;
  extra.push_back(0);
  EXPECT_NE(error_of([&] { FeatureFile::deserialize(extra, "x"); }), "");
  auto zero_span = good;
  zero_span[good.size() - 4] = 0;  // last record's span field
  EXPECT_NE(error_of([&] { FeatureFile::deserialize(zero_span, "z"); }), "");
}

TEST(FeatureFile, MissingFile) {
  EXPECT_THROW(load_features("/nonexistent/x.fvs"), DataError);
}

TEST(Labels, ParseFormatRoundTrip) {
  const std::vector<std::uint8_t> labels = {0, 0, 1, 1, 0};
  const std::string text = format_labels(labels);
  EXPECT_EQ(text, "frame_index,label\n0,0\n1,0\n2,1\n3,1\n4,0\n");
  EXPECT_EQ(parse_labels(text, "mem"), labels);
  EXPECT_EQ(parse_labels("frame_index,label\r\n0,1\r\n1,0\r\n", "crlf"), (std::vector<std::uint8_t>{1, 0}));
}

TEST(Labels, Errors) {
  EXPECT_NE(error_of([] { parse_labels("frame,label\n0,0\n", "h"); }), "");
  EXPECT_NE(error_of([] { parse_labels("frame_index,label\n0,2\n", "v"); }), "");
  const std::string gap = error_of([] { parse_labels("frame_index,label\n0,0\n2,1\n", "gap.csv"); });
  EXPECT_NE(gap.find("gap.csv"), std::string::npos);
  EXPECT_NE(gap.find("gap.csv:3:"), std::string::npos) << gap;
  EXPECT_NE(error_of([] { parse_labels("frame_index,label\n0,x\n", "x"); }), "");

  testing::TempDir dir;
  save_labels(std::vector<std::uint8_t>{0, 1, 0}, dir / "l.csv");
  EXPECT_EQ(load_labels(dir / "l.csv", 3).size(), 3u);
  EXPECT_THROW(load_labels(dir / "l.csv", 4), DataError);
}

TEST(ScoreCsv, ExactRoundTrip) {
  const auto scores = testing::random_doubles(50, 5, 1e3);
  EXPECT_EQ(parse_scores(format_scores(scores), "s"), scores);
  testing::TempDir dir;
  save_scores(scores, dir / "s.csv");
  EXPECT_EQ(load_scores(dir / "s.csv"), scores);
  EXPECT_THROW(parse_scores("frame_index,score\n0,abc\n", "bad"), DataError);
}

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    save_features(FeatureFile{testing::random_features(10, 4, 6), std::nullopt}, dir_ / "train.fvs");
    save_features(FeatureFile{testing::random_features(3, 4, 7), std::vector<FrameSpan>{{0, 4}, {4, 4}, {8, 4}}},
                  dir_ / "v.fvs");
    save_labels(std::vector<std::uint8_t>(12, 0), dir_ / "v.csv");
  }

  nlohmann::json document() const {
    return {{"dataset", "toy"},
            {"feature_dim", 4},
            {"train", {{{"id", "train"}, {"features", "train.fvs"}}}},
            {"test", {{{"id", "v"}, {"features", "v.fvs"}, {"frame_count", 12}, {"labels", "v.csv"}}}}};
  }

  fs::path write(const nlohmann::json& j) const {
    write_text(dir_ / "m.json", j.dump());
    return dir_ / "m.json";
  }

  testing::TempDir dir_;
};

TEST_F(ManifestTest, LoadsAndResolvesPaths) {
  const DatasetManifest m = load_manifest(write(document()));
  EXPECT_EQ(m.dataset, "toy");
  EXPECT_EQ(m.feature_dim, 4u);
  ASSERT_EQ(m.test.size(), 1u);
  EXPECT_EQ(m.test[0].features, dir_ / "v.fvs");
  EXPECT_EQ(load_train_features(m).rows(), 10u);
  const auto videos = load_test_videos(m);
  EXPECT_EQ(videos[0].frame_count, 12u);
  EXPECT_EQ(videos[0].labels.size(), 12u);

  save_manifest(m, dir_ / "copy.json");
  const DatasetManifest again = load_manifest(dir_ / "copy.json");
  EXPECT_EQ(again.test[0].features, m.test[0].features);
  EXPECT_EQ(again.test[0].labels, m.test[0].labels);
}

TEST_F(ManifestTest, MissingLabelsForTestVideo) {
  auto j = document();
  j["test"][0].erase("labels");
  const std::string msg = error_of([&] { load_manifest(write(j)); });
  EXPECT_NE(msg.find("labels"), std::string::npos) << msg;
}

TEST_F(ManifestTest, MissingReferencedFile) {
  auto j = document();
  j["test"][0]["labels"] = "nope.csv";
  EXPECT_NE(error_of([&] { load_manifest(write(j)); }).find("nope.csv"), std::string::npos);
}

TEST_F(ManifestTest, DuplicateIdsAndBadJson) {
  auto j = document();
  j["train"].push_back({{"id", "v"}, {"features", "train.fvs"}});
  EXPECT_NE(error_of([&] { load_manifest(write(j)); }), "");
  write_text(dir_ / "broken.json", "{\"dataset\": ");
  EXPECT_THROW(load_manifest(dir_ / "broken.json"), DataError);
}

TEST_F(ManifestTest, CrossChecksLoadedVideos) {
  auto j = document();
  j["test"][0]["frame_count"] = 10;  // spans reach frame 12; labels have 12 rows
  EXPECT_THROW(load_test_videos(load_manifest(write(j))), DataError);
  j = document();
  j["feature_dim"] = 5;
  EXPECT_THROW(load_train_features(load_manifest(write(j))), DataError);
}

TEST(Synth, Deterministic) {
  SynthConfig c = synth_preset("small");
  c.seed = 17;
  testing::TempDir a, b;
  write_synthetic(generate_synthetic(c), a.path());
  write_synthetic(generate_synthetic(c), b.path());
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    ++files;
    EXPECT_EQ(read_file(entry.path()), read_file(b.path() / entry.path().filename())) << entry.path();
  }
  EXPECT_EQ(files, 2 + 2 * 4);
  c.seed = 18;
  EXPECT_NE(generate_synthetic(c).train, generate_synthetic(synth_preset("small")).train);
}

TEST(Synth, RoundTripThroughManifest) {
  const SynthCorpus corpus = generate_synthetic(synth_preset("small"));
  testing::TempDir dir;
  const fs::path manifest = write_synthetic(corpus, dir.path());
  const DatasetManifest m = load_manifest(manifest);
  EXPECT_EQ(m.feature_dim, 32u);
  EXPECT_EQ(load_train_features(m), corpus.train);
  const auto videos = load_test_videos(m);
  ASSERT_EQ(videos.size(), corpus.test.size());
  for (std::size_t i = 0; i < videos.size(); ++i) {
    EXPECT_EQ(videos[i].file.features, corpus.test[i].features);
    EXPECT_EQ(*videos[i].file.spans, corpus.test[i].spans);
    EXPECT_EQ(videos[i].labels, corpus.test[i].labels);
  }
}

TEST(Synth, StructureOfVideos) {
  const SynthConfig c = synth_preset("small");
  const SynthCorpus corpus = generate_synthetic(c);
  EXPECT_EQ(corpus.train.rows(), c.train_count);
  for (const SynthVideo& v : corpus.test) {
    std::size_t ones = 0, first = v.labels.size(), last = 0;
    for (std::size_t t = 0; t < v.labels.size(); ++t) {
      if (v.labels[t]) {
        ++ones;
        first = std::min(first, t);
        last = t;
      }
    }
    EXPECT_EQ(ones, static_cast<std::size_t>(std::llround(c.anomaly_rate * c.frames_per_video)));
    EXPECT_EQ(last - first + 1, ones);  // one contiguous segment
    EXPECT_EQ(v.spans.back().start_frame + v.spans.back().length, v.frame_count);
    for (std::size_t i = 0; i < v.features.rows(); ++i) {
      double n = 0;
      for (float x : v.features.row(i)) n += double(x) * x;
      ASSERT_NEAR(n, 1.0, 1e-5);
    }
  }
}

TEST(Synth, TinyRateGivesNoAnomalies) {
  SynthConfig c = synth_preset("small");
  c.anomaly_rate = 0.001;
  for (const SynthVideo& v : generate_synthetic(c).test) {
    EXPECT_EQ(v.labels, std::vector<std::uint8_t>(v.frame_count, 0));
  }
}

TEST(Synth, Validation) {
  SynthConfig c;
  c.anomaly_rate = 0.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.anomaly_shift = c.mode_spread;
  EXPECT_THROW(c.validate(), UsageError);
  EXPECT_THROW(synth_preset("huge"), UsageError);
}

}  // namespace
}  // namespace llsh
