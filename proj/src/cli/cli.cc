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

#include "llsh/cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json_config.h"
#include "llsh/baselines.h"
#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"
#include "llsh/common/parallel.h"
#include "llsh/data/feature_file.h"
#include "llsh/data/labels.h"
#include "llsh/data/manifest.h"
#include "llsh/data/score_csv.h"
#include "llsh/data/synth.h"
#include "llsh/encoder.h"
#include "llsh/evaluation.h"
#include "llsh/index.h"
#include "llsh/scoring.h"
#include "llsh/theory.h"
#include "llsh/training.h"
#include "run_record.h"

namespace llsh {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  bool quiet = false;
  unsigned workers = 0;
  std::string run_record = "llsh-run.json";
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  Globals& globals;
  cli::RunRecord& record;

  void info(const std::string& msg) const {
    if (!globals.quiet) out << msg << "\n";
  }
  void warn(const std::string& msg) const { err << "warning: " << msg << "\n"; }
};

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string percent(double auc) { return format("%.1f%%", 100.0 * auc); }

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory (" + ec.message() + ")");
}

std::uint64_t file_fingerprint(const fs::path& path) { return fnv1a64(read_file(path)); }

// ---------------------------------------------------------------------------
// Feature sources

struct TrainSource {
  FeatureMatrix all;
  std::vector<TimedSequence> timed;  // filled only if every file has spans
};

TimedSequence sorted_sequence(const FeatureFile& file) {
  const auto& spans = *file.spans;
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spans[a].start_frame < spans[b].start_frame;
  });
  TimedSequence seq{FeatureMatrix(file.features.dim()), {}};
  for (std::size_t i : order) {
    seq.features.append(file.features.row(i));
    seq.start_frames.push_back(spans[i].start_frame);
  }
  return seq;
}

TrainSource load_train_source(const std::string& manifest_path, const std::string& features_path,
                              Context& ctx) {
  std::vector<FeatureFile> files;
  if (!features_path.empty()) {
    files.push_back(load_features(features_path));
    ctx.record.fingerprint("features", file_fingerprint(features_path));
  } else {
    const DatasetManifest m = load_manifest(manifest_path);
    ctx.record.fingerprint("manifest", file_fingerprint(manifest_path));
    if (m.train.empty()) throw DataError(manifest_path + ": manifest has no train videos");
    for (const VideoEntry& e : m.train) files.push_back(load_video(e, m.feature_dim).file);
  }
  TrainSource src{FeatureMatrix(files.front().features.dim()), {}};
  bool all_timed = true;
  for (const FeatureFile& f : files) {
    if (f.features.dim() != src.all.dim()) throw DataError("training files disagree on d");
    for (std::size_t i = 0; i < f.features.rows(); ++i) src.all.append(f.features.row(i));
    all_timed = all_timed && f.spans.has_value();
  }
  if (src.all.rows() == 0) throw DataError("no training features");
  if (all_timed) {
    for (const FeatureFile& f : files) src.timed.push_back(sorted_sequence(f));
  }
  return src;
}

// ---------------------------------------------------------------------------
// Shared scoring options

struct QueryOptions {
  std::string metric = "euclidean";
  double sigma = 10.0;
  std::optional<double> sentinel;
  bool minmax = false;

  void add(CLI::App* app, bool with_sentinel) {
    app->add_option("--metric", metric, "Distance: euclidean|cosine")->capture_default_str();
    app->add_option("--sigma", sigma, "Gaussian smoothing width in frames (0 = off)")
        ->capture_default_str();
    if (with_sentinel) app->add_option("--sentinel", sentinel, "Score for a miss in every table (default sqrt(r))");
    app->add_flag("--minmax", minmax, "Min-max normalize each video's scores");
  }

  QueryConfig build() const {
    QueryConfig q;
    q.metric = parse_metric(metric);
    q.smooth_sigma = sigma;
    q.sentinel = sentinel;
    q.per_video_minmax = minmax;
    q.validate();
    return q;
  }
};

void write_series(const ScoreSeries& s, const fs::path& dir, Context& ctx) {
  const fs::path path = dir / (s.video_id + ".scores.csv");
  save_scores(s.scores, path);
  ctx.record.output(path);
}

// ---------------------------------------------------------------------------
// synth

void add_synth(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string preset = "default";
    std::string out;
    std::optional<std::uint32_t> d, modes, train_count, videos, frames, snippet_len, snippet_stride;
    std::optional<double> spread, anomaly_rate, anomaly_shift, correlation, switch_prob, skew;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("synth", "Generate a synthetic corpus (features, labels, manifest)");
  sub->add_option("--preset", o->preset, "default|small")->capture_default_str();
  sub->add_option("--out", o->out, "Output directory")->required();
  sub->add_option("--d", o->d, "Feature dimension");
  sub->add_option("--modes", o->modes, "Number of normal modes");
  sub->add_option("--spread", o->spread, "Within-mode spread");
  sub->add_option("--skew", o->skew, "Mode weight exponent");
  sub->add_option("--train-count", o->train_count, "Training features");
  sub->add_option("--videos", o->videos, "Test videos");
  sub->add_option("--frames", o->frames, "Frames per test video");
  sub->add_option("--anomaly-rate", o->anomaly_rate, "Fraction of frames in the anomalous segment");
  sub->add_option("--anomaly-shift", o->anomaly_shift, "Displacement of anomalous snippets");
  sub->add_option("--correlation", o->correlation, "AR(1) coefficient between snippets");
  sub->add_option("--switch-prob", o->switch_prob, "Per-snippet mode switch probability");
  sub->add_option("--snippet-len", o->snippet_len, "Frames per snippet");
  sub->add_option("--snippet-stride", o->snippet_stride, "Frames between snippet starts");
  handlers[sub] = [o](Context& ctx) {
    SynthConfig c = synth_preset(o->preset);
    if (o->d) c.d = *o->d;
    if (o->modes) c.num_modes = *o->modes;
    if (o->spread) c.mode_spread = *o->spread;
    if (o->skew) c.mode_skew = *o->skew;
    if (o->train_count) c.train_count = *o->train_count;
    if (o->videos) c.videos = *o->videos;
    if (o->frames) c.frames_per_video = *o->frames;
    if (o->anomaly_rate) c.anomaly_rate = *o->anomaly_rate;
    if (o->anomaly_shift) c.anomaly_shift = *o->anomaly_shift;
    if (o->correlation) c.temporal_correlation = *o->correlation;
    if (o->switch_prob) c.mode_switch_prob = *o->switch_prob;
    if (o->snippet_len) c.snippet_len = *o->snippet_len;
    if (o->snippet_stride) c.snippet_stride = *o->snippet_stride;
    c.seed = ctx.globals.seed;
    const SynthCorpus corpus = generate_synthetic(c);
    const fs::path manifest = write_synthetic(corpus, o->out);
    ctx.record.output(manifest);
    ctx.record.fingerprint("manifest", file_fingerprint(manifest));
    ctx.record.results() = {{"train_count", corpus.train.rows()},
                            {"videos", corpus.test.size()},
                            {"feature_dim", c.d}};
    ctx.info("wrote " + std::to_string(corpus.train.rows()) + " training features and " +
             std::to_string(corpus.test.size()) + " test videos; manifest " + manifest.string());
  };
}

// ---------------------------------------------------------------------------
// train

void add_train(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string manifest, features, out, loss_log;
    std::optional<std::uint32_t> d;
    std::uint32_t r = 32, b = 8;
    bool no_normalize = false;
    TrainConfig train;
    std::uint32_t similarity_pairs = 2000;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("train", "Train the hash encoder contrastively");
  auto* man = sub->add_option("--manifest", o->manifest, "Dataset manifest (train split is used)");
  auto* feat = sub->add_option("--features", o->features, "Feature file");
  man->excludes(feat);
  sub->add_option("--d", o->d, "Expected feature dimension");
  sub->add_option("--r", o->r, "Bits per hash layer")->capture_default_str();
  sub->add_option("--b", o->b, "Number of hash layers / tables")->capture_default_str();
  sub->add_flag("--no-normalize-input", o->no_normalize, "Do not scale inputs to unit norm");
  sub->add_option("--queue-len", o->train.queue_len, "Negative queue length l")->capture_default_str();
  sub->add_option("--batch", o->train.batch_size, "Pairs per step")->capture_default_str();
  sub->add_option("--tau", o->train.temperature, "Temperature")->capture_default_str();
  sub->add_option("--momentum", o->train.momentum, "Key encoder momentum m")->capture_default_str();
  sub->add_option("--lr", o->train.learning_rate, "SGD learning rate")->capture_default_str();
  sub->add_option("--iters", o->train.iterations, "Training steps")->capture_default_str();
  sub->add_option("--jitter", o->train.pair_jitter, "Relative noise for positives of untimed features")
      ->capture_default_str();
  sub->add_option("--max-offset", o->train.max_offset, "Frame offset bound for timed positives")
      ->capture_default_str();
  sub->add_option("--similarity-pairs", o->similarity_pairs, "Pairs used to report code similarity")
      ->capture_default_str();
  sub->add_option("--out", o->out, "Encoder file to write")->required();
  sub->add_option("--loss-log", o->loss_log, "Per-step loss CSV (default <out>.loss.csv)");
  handlers[sub] = [o](Context& ctx) {
    if (o->manifest.empty() && o->features.empty()) throw UsageError("train: give --manifest or --features");
    TrainSource src = load_train_source(o->manifest, o->features, ctx);
    if (o->d && *o->d != src.all.dim()) {
      throw DataError("train: features have d=" + std::to_string(src.all.dim()) + ", --d is " +
                      std::to_string(*o->d));
    }
    EncoderConfig ec;
    ec.feature_dim = src.all.dim();
    ec.code_len = o->r;
    ec.num_tables = o->b;
    ec.normalize_input = !o->no_normalize;
    ec.seed = ctx.globals.seed;
    TrainConfig tc = o->train;
    tc.seed = ctx.globals.seed;

    const bool timed = !src.timed.empty();
    const PairSampler sampler = timed ? PairSampler::temporal(std::move(src.timed), tc.max_offset)
                                      : PairSampler::jittered(src.all, tc.pair_jitter);
    ctx.info(std::string("positives: ") + (timed ? "temporal offsets" : "jittered copies") + ", " +
             std::to_string(sampler.size()) + " features, d=" + std::to_string(sampler.dim()));

    const std::string log_path = o->loss_log.empty() ? o->out + ".loss.csv" : o->loss_log;
    std::string log = "step,loss\n";
    const std::uint32_t every = std::max<std::uint32_t>(1, tc.iterations / 10);
    const TrainResult result =
        train(sampler, ec, tc, [&](std::uint32_t step, double loss, const EncoderParams&, const EncoderParams&) {
          char line[64];
          std::snprintf(line, sizeof line, "%u,%.17g\n", step, loss);
          log += line;
          if ((step + 1) % every == 0 || step + 1 == tc.iterations) {
            ctx.info("step " + std::to_string(step + 1) + "/" + std::to_string(tc.iterations) +
                     "  loss " + format("%.6f", loss));
          }
        });
    save_encoder(result.encoder, o->out);
    write_text(log_path, log);
    ctx.record.output(o->out);
    ctx.record.output(log_path);
    ctx.record.fingerprint("encoder", result.encoder.fingerprint());

    json res = {{"iterations", tc.iterations},
                {"positives", timed ? "temporal" : "jitter"},
                {"losses", result.losses}};
    if (o->similarity_pairs > 0) {
      const auto pairs = sample_pairs(sampler, o->similarity_pairs, splitmix64(tc.seed ^ 0x5eedULL));
      const HashEncoder initial = HashEncoder::random(ec);
      const double before = mean_positive_similarity(initial, pairs);
      const double after = mean_positive_similarity(result.encoder, pairs);
      res["positive_similarity"] = {{"before", before}, {"after", after}};
      ctx.info("positive-pair similarity (centered codes): " + format("%.4f", before) + " -> " +
               format("%.4f", after));
    }
    ctx.record.results() = res;
    ctx.info("wrote encoder " + o->out + " (fingerprint " + cli::hex64(result.encoder.fingerprint()) + ")");
  };
}

// ---------------------------------------------------------------------------
// index

void add_index(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string encoder, manifest, features, variant = "full", out;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("index", "Hash training features into b tables");
  sub->add_option("--encoder", o->encoder, "Encoder file")->required();
  auto* man = sub->add_option("--manifest", o->manifest, "Dataset manifest (train split)");
  auto* feat = sub->add_option("--features", o->features, "Feature file");
  man->excludes(feat);
  sub->add_option("--variant", o->variant, "full|light")->capture_default_str();
  sub->add_option("--out", o->out, "Index file to write")->required();
  handlers[sub] = [o](Context& ctx) {
    if (o->manifest.empty() && o->features.empty()) throw UsageError("index: give --manifest or --features");
    const IndexVariant variant = parse_variant(o->variant);
    const HashEncoder encoder = load_encoder(o->encoder);
    const TrainSource src = load_train_source(o->manifest, o->features, ctx);
    const HashIndex index = build_index(encoder, src.all, variant);
    const auto bytes = index.serialize();
    write_file(o->out, bytes);
    ctx.record.output(o->out);
    ctx.record.fingerprint("encoder", encoder.fingerprint());
    ctx.record.fingerprint("index", fnv1a64(bytes));
    const IndexStats stats = index_stats(index);
    json tables = json::array();
    for (const TableStats& t : stats.tables) tables.push_back(t.num_buckets);
    ctx.record.results() = {{"variant", o->variant}, {"total_count", stats.total_count}, {"buckets", tables}};
    ctx.info("indexed " + std::to_string(stats.total_count) + " features into " +
             std::to_string(stats.tables.size()) + " " + o->variant + " tables; wrote " + o->out);
  };
}

// ---------------------------------------------------------------------------
// score

void add_score(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string encoder, index, manifest, out_dir, fingerprint_check = "warn";
    QueryOptions query;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("score", "Score every test video of a manifest");
  sub->add_option("--encoder", o->encoder, "Encoder file")->required();
  sub->add_option("--index", o->index, "Index file")->required();
  sub->add_option("--manifest", o->manifest, "Dataset manifest (test split)")->required();
  sub->add_option("--out-dir", o->out_dir, "Directory for <video>.scores.csv")->required();
  sub->add_option("--fingerprint-check", o->fingerprint_check, "ignore|warn|strict")->capture_default_str();
  o->query.add(sub, true);
  handlers[sub] = [o](Context& ctx) {
    const QueryConfig qc = o->query.build();
    const HashEncoder encoder = load_encoder(o->encoder);
    const HashIndex index = load_index(o->index, nullptr, FingerprintCheck::kIgnore);
    if (encoder.code_len() != index.code_len() || encoder.num_tables() != index.num_tables()) {
      throw DataError(o->index + ": index has r=" + std::to_string(index.code_len()) +
                      ", b=" + std::to_string(index.num_tables()) + " but the encoder has r=" +
                      std::to_string(encoder.code_len()) + ", b=" + std::to_string(encoder.num_tables()));
    }
    if (encoder.fingerprint() != index.encoder_fingerprint()) {
      const std::string msg = o->index + " was built with a different encoder (fingerprint " +
                              cli::hex64(index.encoder_fingerprint()) + ", encoder is " +
                              cli::hex64(encoder.fingerprint()) + ")";
      if (o->fingerprint_check == "strict") throw DataError(msg);
      if (o->fingerprint_check == "warn") ctx.warn(msg);
      else if (o->fingerprint_check != "ignore") throw UsageError("--fingerprint-check must be ignore|warn|strict");
    }
    const DatasetManifest manifest = load_manifest(o->manifest);
    const auto videos = load_test_videos(manifest);
    make_dir(o->out_dir);
    for (const LoadedVideo& v : videos) {
      const ScoreSeries s = score_video(index, encoder, v.file.features, v.file.spans_or_identity(),
                                        v.frame_count, qc, v.id);
      write_series(s, o->out_dir, ctx);
    }
    ctx.record.fingerprint("encoder", encoder.fingerprint());
    ctx.record.fingerprint("index", file_fingerprint(o->index));
    ctx.record.fingerprint("manifest", file_fingerprint(o->manifest));
    ctx.record.results() = {{"videos", videos.size()}};
    ctx.info("scored " + std::to_string(videos.size()) + " videos into " + o->out_dir);
  };
}

// ---------------------------------------------------------------------------
// eval

void add_eval(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string scores_dir, labels_dir, manifest, protocol = "both";
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("eval", "Frame-level ROC-AUC of score files");
  sub->add_option("--scores-dir", o->scores_dir, "Directory of <video>.scores.csv")->required();
  auto* lab = sub->add_option("--labels-dir", o->labels_dir, "Directory of <video>.labels.csv");
  auto* man = sub->add_option("--manifest", o->manifest, "Manifest naming test videos and labels");
  lab->excludes(man);
  sub->add_option("--protocol", o->protocol, "micro|macro|both")->capture_default_str();
  handlers[sub] = [o](Context& ctx) {
    if (o->protocol != "micro" && o->protocol != "macro" && o->protocol != "both") {
      throw UsageError("--protocol must be micro|macro|both");
    }
    std::vector<LabeledVideo> run;
    auto add = [&](const std::string& id, const fs::path& labels_path) {
      LabeledVideo v{id, load_scores(fs::path(o->scores_dir) / (id + ".scores.csv")), {}};
      v.labels = load_labels(labels_path, v.scores.size());
      run.push_back(std::move(v));
    };
    if (!o->manifest.empty()) {
      const DatasetManifest m = load_manifest(o->manifest);
      for (const VideoEntry& e : m.test) add(e.id, *e.labels);
    } else if (!o->labels_dir.empty()) {
      std::vector<std::string> ids;
      std::error_code ec;
      for (const auto& entry : fs::directory_iterator(o->scores_dir, ec)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = ".scores.csv";
        if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
          ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
      }
      if (ec) throw DataError(o->scores_dir + ": cannot list directory (" + ec.message() + ")");
      std::sort(ids.begin(), ids.end());
      for (const std::string& id : ids) add(id, fs::path(o->labels_dir) / (id + ".labels.csv"));
    } else {
      throw UsageError("eval: give --manifest or --labels-dir");
    }
    if (run.empty()) throw DataError(o->scores_dir + ": no score files found");

    json res = {{"videos", run.size()}};
    if (o->protocol != "macro") {
      const double micro = micro_auc(run);
      res["micro_auc"] = micro;
      ctx.out << "micro-AUC: " << percent(micro) << "\n";
    }
    if (o->protocol != "micro") {
      const MacroAuc macro = macro_auc(run);
      for (const std::string& id : macro.skipped) {
        ctx.warn("video '" + id + "' has a single label class; excluded from macro-AUC");
      }
      res["macro_auc"] = macro.auc;
      res["per_video"] = json::object();
      for (std::size_t i = 0; i < macro.used.size(); ++i) res["per_video"][macro.used[i]] = macro.per_video[i];
      res["skipped"] = macro.skipped;
      ctx.out << "macro-AUC: " << percent(macro.auc) << "\n";
    }
    ctx.record.results() = res;
  };
}

// ---------------------------------------------------------------------------
// baseline knn|kmeans

void add_baseline(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string manifest, out_dir;
    QueryOptions query;
    std::uint32_t k = 5;
    std::uint32_t clusters = 32;
    std::uint32_t max_iters = 300;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* base = app.add_subcommand("baseline", "Exact KNN or K-means anomaly scores");
  base->require_subcommand(1);
  base->add_option("--manifest", o->manifest, "Dataset manifest")->required();
  base->add_option("--out-dir", o->out_dir, "Directory for <video>.scores.csv")->required();
  o->query.add(base, false);
  CLI::App* knn = base->add_subcommand("knn", "Mean distance to the K nearest training features");
  knn->add_option("--k", o->k, "Neighbours")->capture_default_str();
  CLI::App* km = base->add_subcommand("kmeans", "Distance to the nearest K-means center");
  km->add_option("--clusters", o->clusters, "Number of centers K")->capture_default_str();
  km->add_option("--max-iters", o->max_iters, "Lloyd iteration limit t")->capture_default_str();

  auto run = [o](Context& ctx, bool use_knn) {
    const QueryConfig qc = o->query.build();
    const DatasetManifest manifest = load_manifest(o->manifest);
    ctx.record.fingerprint("manifest", file_fingerprint(o->manifest));
    const FeatureMatrix train = load_train_features(manifest);
    const auto videos = load_test_videos(manifest);
    FeatureMatrix centers;
    if (!use_knn) {
      const KMeansModel model = kmeans_fit(train, o->clusters, o->max_iters, ctx.globals.seed);
      centers = model.centers;
      ctx.record.results()["kmeans"] = {{"iterations", model.iterations},
                                        {"converged", model.converged},
                                        {"inertia", model.inertia}};
      ctx.info("k-means: " + std::to_string(model.iterations) + " iterations" +
               (model.converged ? " (converged)" : ""));
    }
    make_dir(o->out_dir);
    for (const LoadedVideo& v : videos) {
      const std::vector<double> raw = use_knn ? knn_scores(train, v.file.features, o->k, qc.metric)
                                              : kmeans_scores(centers, v.file.features, qc.metric);
      write_series(finalize_series(v.id, raw, v.file.spans_or_identity(), v.frame_count, qc), o->out_dir, ctx);
    }
    ctx.record.results()["videos"] = videos.size();
    ctx.info("scored " + std::to_string(videos.size()) + " videos into " + o->out_dir);
  };
  handlers[knn] = [run](Context& ctx) { run(ctx, true); };
  handlers[km] = [run](Context& ctx) { run(ctx, false); };
}

// ---------------------------------------------------------------------------
// cost

CostInputs parse_cost_params(const std::string& text) {
  CostInputs in;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--params: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw UsageError("--params: '" + key + "' needs a non-negative integer, got '" + value + "'");
    }
    std::optional<std::uint64_t>* slot = nullptr;
    if (key == "d") slot = &in.d;
    else if (key == "N") slot = &in.N;
    else if (key == "M") slot = &in.M;
    else if (key == "K") slot = &in.K;
    else if (key == "t") slot = &in.t;
    else if (key == "r") slot = &in.r;
    else if (key == "b") slot = &in.b;
    else if (key == "n") slot = &in.n;
    else if (key == "m") slot = &in.m;
    else throw UsageError("--params: unknown key '" + key + "' (expected d,N,M,K,t,r,b,n,m)");
    *slot = v;
  }
  return in;
}

void add_cost(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string method, params;
    bool paper_table = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("cost", "Multiplication counts of each method");
  auto* method = sub->add_option("--method", o->method, "knn|kmeans|lsh|llsh|light-llsh");
  sub->add_option("--params", o->params, "Comma-separated d=,N=,M=,K=,t=,r=,b=,n=,m=");
  auto* table = sub->add_flag("--paper-table", o->paper_table, "Evaluate the published efficiency table");
  method->excludes(table);
  handlers[sub] = [o](Context& ctx) {
    if (o->paper_table) {
      json rows = json::array();
      for (const PaperCostRow& row : paper_cost_table()) {
        char line[160];
        std::snprintf(line, sizeof line, "%-18s %-24s %llu multiplications\n", row.label.c_str(),
                      row.printed.c_str(), static_cast<unsigned long long>(row.multiplications));
        ctx.out << line;
        rows.push_back({{"label", row.label}, {"multiplications", row.multiplications}, {"printed", row.printed}});
      }
      ctx.record.results() = {{"rows", rows}};
      return;
    }
    if (o->method.empty()) throw UsageError("cost: give --method or --paper-table");
    const CostMethod m = parse_cost_method(o->method);
    const std::uint64_t count = cost(m, parse_cost_params(o->params));
    ctx.out << o->method << ": " << count << " multiplications ("
            << format_magnitude(static_cast<double>(count)) << ")\n";
    ctx.record.results() = {{"method", o->method}, {"multiplications", count}};
  };
}

// ---------------------------------------------------------------------------
// theory curve|threshold|mc

void emit_csv(const std::string& text, const std::string& out, Context& ctx) {
  if (out.empty()) {
    ctx.out << text;
    return;
  }
  write_text(out, text);
  ctx.record.output(out);
}

void add_theory(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::optional<std::uint32_t> r, b;
    std::uint32_t points = 101;
    std::string out;
    std::optional<double> alpha, similarity;
    std::uint32_t mc_r = 1, mc_b = 1, d = 64;
    std::uint64_t trials = 100000;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* theory = app.add_subcommand("theory", "Collision probability curves and Monte-Carlo checks");
  theory->require_subcommand(1);

  CLI::App* curve = theory->add_subcommand("curve", "CSV of P(s) for (r, b); the four standard curves by default");
  curve->add_option("--r", o->r, "Bits per table");
  curve->add_option("--b", o->b, "Tables");
  curve->add_option("--points", o->points, "Grid points on [0, 1]")->capture_default_str();
  curve->add_option("--out", o->out, "CSV file (default stdout)");

  CLI::App* thr = theory->add_subcommand("threshold", "Similarity threshold and steepest-slope point");
  thr->add_option("--r", o->r, "Bits per table");
  thr->add_option("--b", o->b, "Tables");

  CLI::App* mc = theory->add_subcommand("mc", "Monte-Carlo collision rate of random encoders");
  auto* alpha = mc->add_option("--alpha", o->alpha, "Angle in radians");
  auto* sim = mc->add_option("--similarity", o->similarity, "Angular similarity s (alternative to --alpha)");
  alpha->excludes(sim);
  mc->add_option("--r", o->mc_r, "Bits per table")->capture_default_str();
  mc->add_option("--b", o->mc_b, "Tables")->capture_default_str();
  mc->add_option("--d", o->d, "Input dimension")->capture_default_str();
  mc->add_option("--trials", o->trials, "Trials")->capture_default_str();
  mc->add_option("--out", o->out, "CSV file (default stdout)");

  auto specs = [o]() {
    if (o->r.has_value() != o->b.has_value()) throw UsageError("theory: give both --r and --b, or neither");
    return o->r ? std::vector<CurveSpec>{{*o->r, *o->b}} : preset_curves();
  };

  handlers[curve] = [o, specs](Context& ctx) {
    std::string csv = "r,b,s,p\n";
    char line[96];
    for (const CurveSpec& c : specs()) {
      for (const CurvePoint& p : curve_points(c.r, c.b, o->points)) {
        std::snprintf(line, sizeof line, "%u,%u,%.10g,%.10g\n", c.r, c.b, p.s, p.p);
        csv += line;
      }
    }
    emit_csv(csv, o->out, ctx);
  };
  handlers[thr] = [specs](Context& ctx) {
    json rows = json::array();
    for (const CurveSpec& c : specs()) {
      const double s_hat = similarity_threshold(c.r, c.b);
      const double steep = steepest_slope_similarity(c.r, c.b);
      char line[128];
      std::snprintf(line, sizeof line, "r=%u b=%u threshold=%.4f steepest=%.4f\n", c.r, c.b, s_hat, steep);
      ctx.out << line;
      rows.push_back({{"r", c.r}, {"b", c.b}, {"threshold", s_hat}, {"steepest", steep}});
    }
    ctx.record.results() = {{"rows", rows}};
  };
  handlers[mc] = [o](Context& ctx) {
    if (o->alpha.has_value() == o->similarity.has_value()) throw UsageError("theory mc: give --alpha or --similarity");
    MonteCarloConfig mcc;
    mcc.alpha = o->alpha ? *o->alpha : angle_from_similarity(*o->similarity);
    mcc.r = o->mc_r;
    mcc.b = o->mc_b;
    mcc.d = o->d;
    mcc.trials = o->trials;
    mcc.seed = ctx.globals.seed;
    const MonteCarloResult res = monte_carlo_collision(mcc);
    char line[256];
    std::snprintf(line, sizeof line, "%.10g,%.10g,%u,%u,%u,%llu,%llu,%.10g,%.10g,%.10g\n", mcc.alpha,
                  similarity_from_angle(mcc.alpha), mcc.r, mcc.b, mcc.d,
                  static_cast<unsigned long long>(res.trials), static_cast<unsigned long long>(res.hits),
                  res.probability, res.theory, res.standard_error);
    emit_csv(std::string("alpha,s,r,b,d,trials,hits,empirical,theory,std_error\n") + line, o->out, ctx);
    ctx.record.results() = {{"empirical", res.probability}, {"theory", res.theory}, {"hits", res.hits},
                            {"trials", res.trials}, {"std_error", res.standard_error}};
  };
}

// ---------------------------------------------------------------------------
// stats

void add_stats(CLI::App& app, std::map<const CLI::App*, std::function<void(Context&)>>& handlers) {
  struct Opts {
    std::string index, encoder, features;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("stats", "Summarize an index, encoder or feature file");
  sub->add_option("--index", o->index, "Index file");
  sub->add_option("--encoder", o->encoder, "Encoder file");
  sub->add_option("--features", o->features, "Feature file");
  handlers[sub] = [o](Context& ctx) {
    if (o->index.empty() && o->encoder.empty() && o->features.empty()) {
      throw UsageError("stats: give --index, --encoder or --features");
    }
    json res = json::object();
    std::optional<HashEncoder> encoder;
    if (!o->encoder.empty()) {
      encoder = load_encoder(o->encoder);
      const EncoderConfig& c = encoder->config();
      ctx.out << "encoder: d=" << c.feature_dim << " r=" << c.code_len << " b=" << c.num_tables
              << " normalize_input=" << (c.normalize_input ? "yes" : "no") << " seed=" << c.seed
              << " fingerprint=" << cli::hex64(encoder->fingerprint()) << "\n";
      ctx.record.fingerprint("encoder", encoder->fingerprint());
    }
    if (!o->index.empty()) {
      const HashIndex index =
          load_index(o->index, nullptr, FingerprintCheck::kIgnore);
      if (encoder && encoder->fingerprint() != index.encoder_fingerprint()) {
        ctx.warn(o->index + " was built with a different encoder");
      }
      const IndexStats st = index_stats(index);
      ctx.out << "index: variant=" << variant_name(st.variant) << " r=" << st.code_len
              << " b=" << st.tables.size() << " N=" << st.total_count
              << " encoder=" << cli::hex64(index.encoder_fingerprint()) << "\n";
      json tables = json::array();
      for (std::size_t j = 0; j < st.tables.size(); ++j) {
        const TableStats& t = st.tables[j];
        char line[160];
        std::snprintf(line, sizeof line, "  table %zu: %llu buckets, size min %llu / mean %.2f / max %llu\n", j,
                      static_cast<unsigned long long>(t.num_buckets), static_cast<unsigned long long>(t.min_size),
                      t.mean_size, static_cast<unsigned long long>(t.max_size));
        ctx.out << line;
        tables.push_back({{"buckets", t.num_buckets}, {"min", t.min_size}, {"mean", t.mean_size}, {"max", t.max_size}});
      }
      res["tables"] = tables;
      ctx.record.fingerprint("index", file_fingerprint(o->index));
    }
    if (!o->features.empty()) {
      const FeatureFile f = load_features(o->features);
      ctx.out << "features: " << f.features.rows() << " records, d=" << f.features.dim()
              << ", timestamps " << (f.spans ? "yes" : "no") << "\n";
      res["records"] = f.features.rows();
      res["feature_dim"] = f.features.dim();
      ctx.record.fingerprint("features", file_fingerprint(o->features));
    }
    ctx.record.results() = res;
  };
}

// ---------------------------------------------------------------------------

// Numbers stay numbers in the record when the option is numeric.
json typed_value(const CLI::Option* opt, const std::string& text) {
  const std::string type = opt->get_type_name();
  if (type == "UINT" || type == "INT" || type == "FLOAT") {
    try {
      const json v = json::parse(text);
      if (v.is_number()) return v;
    } catch (const json::exception&) {
    }
  }
  return text;
}

json option_value(const CLI::Option* opt) {
  if (opt->get_expected_max() == 0) return opt->count() > 0;
  if (opt->count() == 0) {
    const std::string def = opt->get_default_str();
    return def.empty() ? json(nullptr) : typed_value(opt, def);
  }
  return typed_value(opt, opt->results().back());
}

json resolved_config(const CLI::App& root, const CLI::App* leaf) {
  json cfg = json::object();
  std::vector<const CLI::App*> chain;
  for (const CLI::App* a = leaf; a != nullptr; a = a->get_parent()) chain.push_back(a);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    json section = json::object();
    for (const CLI::Option* opt : (*it)->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
      section[opt->get_lnames().front()] = option_value(opt);
    }
    cfg[*it == &root ? std::string("global") : (*it)->get_name()] = section;
  }
  return cfg;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Globals globals;
  cli::RunRecord record;
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  record.set_argv(args);

  CLI::App app{"Learnable locality-sensitive hashing for video anomaly detection", "llsh"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", globals.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--config", globals.config, "JSON file of option defaults");
  app.add_flag("--quiet", globals.quiet, "Suppress progress output");
  app.add_option("--workers", globals.workers, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--run-record", globals.run_record, "Where to write the JSON run record")
      ->capture_default_str();

  std::map<const CLI::App*, std::function<void(Context&)>> handlers;
  add_synth(app, handlers);
  add_train(app, handlers);
  add_index(app, handlers);
  add_score(app, handlers);
  add_eval(app, handlers);
  add_baseline(app, handlers);
  add_cost(app, handlers);
  add_theory(app, handlers);
  add_stats(app, handlers);

  // Early so a record still lands in the right place when parsing fails.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--run-record" && i + 1 < args.size()) globals.run_record = args[i + 1];
    if (args[i].rfind("--run-record=", 0) == 0) globals.run_record = args[i].substr(13);
  }

  Context ctx{out, err, globals, record};
  int code = kExitOk;
  std::string error;
  const CLI::App* leaf = &app;
  try {
    std::vector<std::string> expanded = cli::expand_config(args, app);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
    while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
    std::string command;
    for (const CLI::App* a = leaf; a != &app; a = a->get_parent()) {
      command = command.empty() ? a->get_name() : a->get_name() + " " + command;
    }
    record.set_command(command);
    record.config() = resolved_config(app, leaf);
    set_worker_count(globals.workers);
    auto it = handlers.find(leaf);
    if (it == handlers.end()) throw UsageError("no action for '" + command + "'");
    it->second(ctx);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    err << "error: " << e.what() << "\n\n" << target->help();
    code = kExitUsage;
    error = e.what();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    code = kExitUsage;
    error = e.what();
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    code = kExitNumeric;
    error = e.what();
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    code = kExitData;
    error = e.what();
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    code = kExitData;
    error = e.what();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kExitData;
    error = e.what();
  }
  if (!globals.run_record.empty() && !record.write(globals.run_record, code, error)) {
    err << "warning: could not write run record " << globals.run_record << "\n";
  }
  return code;
}

}  // namespace llsh
