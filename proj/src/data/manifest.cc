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

#include "llsh/data/manifest.h"

#include <json.hpp>
#include <set>

#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"
#include "llsh/common/parallel.h"
#include "llsh/data/labels.h"

namespace llsh {
namespace {

using nlohmann::json;

std::string where(const std::filesystem::path& path, const std::string& field) {
  return path.string() + ": " + field;
}

template <typename T>
T required(const json& obj, const char* key, const std::filesystem::path& path,
           const std::string& ctx) {
  if (!obj.contains(key)) throw DataError(where(path, ctx + " is missing \"" + key + "\""));
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(where(path, ctx + " field \"" + key + "\" has the wrong type"));
  }
}

std::vector<VideoEntry> parse_split(const json& doc, const char* split,
                                    const std::filesystem::path& path, bool is_test) {
  std::vector<VideoEntry> out;
  if (!doc.contains(split)) return out;
  if (!doc.at(split).is_array()) throw DataError(where(path, std::string("\"") + split + "\" must be an array"));
  const auto base = path.parent_path();
  std::size_t i = 0;
  for (const json& item : doc.at(split)) {
    const std::string ctx = std::string(split) + "[" + std::to_string(i++) + "]";
    if (!item.is_object()) throw DataError(where(path, ctx + " must be an object"));
    VideoEntry e;
    e.id = required<std::string>(item, "id", path, ctx);
    e.features = base / required<std::string>(item, "features", path, ctx);
    if (item.contains("frame_count")) e.frame_count = required<std::uint64_t>(item, "frame_count", path, ctx);
    if (item.contains("labels")) e.labels = base / required<std::string>(item, "labels", path, ctx);
    if (is_test && !e.frame_count) {
      throw DataError(where(path, "test video '" + e.id + "' needs \"frame_count\""));
    }
    if (is_test && !e.labels) throw DataError(where(path, "test video '" + e.id + "' needs \"labels\""));
    if (!std::filesystem::exists(e.features)) {
      throw DataError(where(path, "video '" + e.id + "' references missing feature file " +
                                      e.features.string()));
    }
    if (e.labels && !std::filesystem::exists(*e.labels)) {
      throw DataError(where(path, "video '" + e.id + "' references missing label file " +
                                      e.labels->string()));
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.is_relative() && base.empty()) return p.generic_string();
  std::error_code ec;
  auto rel = std::filesystem::relative(p, base.empty() ? std::filesystem::path(".") : base, ec);
  return ec || rel.empty() ? p.generic_string() : rel.generic_string();
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw DataError(path.string() + ": manifest must be a JSON object");
  DatasetManifest m;
  m.dataset = required<std::string>(doc, "dataset", path, "manifest");
  m.feature_dim = required<std::uint32_t>(doc, "feature_dim", path, "manifest");
  if (m.feature_dim == 0) throw DataError(path.string() + ": feature_dim must be >= 1");
  m.train = parse_split(doc, "train", path, false);
  m.test = parse_split(doc, "test", path, true);
  std::set<std::string> ids;
  for (const auto* split : {&m.train, &m.test}) {
    for (const VideoEntry& e : *split) {
      if (!ids.insert(e.id).second) throw DataError(path.string() + ": duplicate video id '" + e.id + "'");
    }
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  const auto base = path.parent_path();
  auto entries = [&](const std::vector<VideoEntry>& split) {
    json arr = json::array();
    for (const VideoEntry& e : split) {
      json item = {{"id", e.id}, {"features", relative_to(e.features, base)}};
      if (e.frame_count) item["frame_count"] = *e.frame_count;
      if (e.labels) item["labels"] = relative_to(*e.labels, base);
      arr.push_back(std::move(item));
    }
    return arr;
  };
  json doc = {{"dataset", manifest.dataset},
              {"feature_dim", manifest.feature_dim},
              {"train", entries(manifest.train)},
              {"test", entries(manifest.test)}};
  const std::string text = doc.dump(2) + "\n";
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

LoadedVideo load_video(const VideoEntry& entry, std::uint32_t feature_dim) {
  LoadedVideo v;
  v.id = entry.id;
  v.file = load_features(entry.features);
  if (v.file.features.dim() != feature_dim) {
    throw DataError(entry.features.string() + ": d=" + std::to_string(v.file.features.dim()) +
                    ", manifest declares feature_dim=" + std::to_string(feature_dim));
  }
  v.frame_count = entry.frame_count.value_or(v.file.features.rows());
  for (const FrameSpan& s : v.file.spans_or_identity()) {
    if (s.start_frame >= v.frame_count || s.length > v.frame_count - s.start_frame) {
      throw DataError(entry.features.string() + ": a record spans frames past frame_count=" +
                      std::to_string(v.frame_count));
    }
  }
  if (entry.labels) v.labels = load_labels(*entry.labels, v.frame_count);
  return v;
}

FeatureMatrix load_train_features(const DatasetManifest& manifest) {
  if (manifest.train.empty()) throw DataError("manifest '" + manifest.dataset + "' has no train videos");
  FeatureMatrix out(manifest.feature_dim);
  for (const VideoEntry& e : manifest.train) {
    const LoadedVideo v = load_video(e, manifest.feature_dim);
    for (std::size_t i = 0; i < v.file.features.rows(); ++i) out.append(v.file.features.row(i));
  }
  return out;
}

std::vector<LoadedVideo> load_test_videos(const DatasetManifest& manifest) {
  std::vector<LoadedVideo> out(manifest.test.size());
  parallel_for(out.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = load_video(manifest.test[i], manifest.feature_dim);
  });
  return out;
}

}  // namespace llsh
