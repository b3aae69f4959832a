/*
 * Copyright 2026 The cdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CDP_PIPELINE_HPP_
#define CDP_PIPELINE_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdp/baselines.hpp"
#include "cdp/core.hpp"
#include "cdp/graph_core.hpp"
#include "cdp/procrustes.hpp"
#include "cdp/spectral.hpp"

namespace cdp {

enum class Method { kCdp, kAct, kActm };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::kCdp: return "cdp";
    case Method::kAct: return "act";
    case Method::kActm: return "actm";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  if (name == "cdp") return Method::kCdp;
  if (name == "act") return Method::kAct;
  if (name == "actm") return Method::kActm;
  throw UnknownName("unknown method '" + std::string(name) + "' (expected cdp, act or actm)");
}

inline constexpr double kDefaultZscoreThreshold = 5.0;

struct CdpConfig {
  int window = 1;
  double epsilon_rank = kDefaultRankEpsilon;
  double zscore_threshold = kDefaultZscoreThreshold;
  /// Base seed for the randomized rank test; snapshot t uses derive_seed(seed, t).
  std::uint64_t seed = 0;
  NormMethod norm_method = NormMethod::kPowerIteration;
  GpaOptions gpa{};

  void validate() const {
    if (window < 1) throw InvalidArgument("window must be >= 1");
    if (!(epsilon_rank > 0.0)) throw InvalidArgument("epsilon must be > 0");
  }
};

struct Detection {
  Vector zscores;
  std::vector<Index> detected;
  bool degenerate = false;
};

/**
 * Standardizes scores with the sample standard deviation (n - 1) and flags
 * vertices whose z-score is strictly above the threshold. A zero spread
 * gives no detections and sets `degenerate`.
 */
inline Detection normalize_and_detect(const Vector& z, double threshold) {
  const Index n = z.size();
  if (n < 2) throw InvalidArgument("normalize_and_detect: need at least two scores");
  Detection out;
  const double mean = z.mean();
  const double sd = std::sqrt((z.array() - mean).square().sum() / static_cast<double>(n - 1));
  if (!(sd >= 1e-14)) {
    out.zscores = Vector::Zero(n);
    out.degenerate = true;
    return out;
  }
  out.zscores = (z.array() - mean) / sd;
  for (Index i = 0; i < n; ++i) {
    if (out.zscores(i) > threshold) out.detected.push_back(i);
  }
  return out;
}

struct StepTiming {
  double embed_seconds = 0.0;
  double score_seconds = 0.0;
};

/// Scores exist only for positions after the first `window` snapshots.
struct ScoreSeries {
  int window = 1;
  std::map<int, ScoreVector> scores;
  std::map<int, Vector> zscores;
  std::map<int, std::vector<Index>> detections;
  std::map<int, bool> degenerate;
  std::map<int, int> dims;
  std::map<int, StepTiming> timings;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline void check_sequence(std::span<const SnapshotMatrix> snapshots, int window) {
  if (snapshots.empty()) throw InvalidArgument("empty snapshot sequence");
  if (static_cast<std::size_t>(window) >= snapshots.size()) {
    throw InvalidArgument("sequence length " + std::to_string(snapshots.size()) +
                          " must exceed window " + std::to_string(window));
  }
  for (const SnapshotMatrix& s : snapshots) {
    if (s.n() != snapshots.front().n()) {
      throw DimensionError("snapshots differ in vertex count", s.t());
    }
  }
}

inline void record_detection(ScoreSeries& series, ScoreVector scores, double threshold) {
  const int t = scores.t;
  Detection det = normalize_and_detect(scores.z, threshold);
  series.zscores[t] = std::move(det.zscores);
  series.detections[t] = std::move(det.detected);
  series.degenerate[t] = det.degenerate;
  series.scores[t] = std::move(scores);
}

}  // namespace detail

inline RankOptions rank_options_for(const CdpConfig& config, int t) {
  RankOptions opts;
  opts.epsilon = config.epsilon_rank;
  opts.seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
  opts.norm_method = config.norm_method;
  return opts;
}

inline Embedding embed_snapshot(const SnapshotMatrix& snapshot, const CdpConfig& config) {
  try {
    const RepresentationMatrix rep = representation_matrix(snapshot);
    return embed(rep.M, rank_options_for(config, snapshot.t()), snapshot.t());
  } catch (Error& e) {
    if (!e.time()) e.set_time(snapshot.t());
    throw;
  }
}

/// Embeds every snapshot; per-snapshot seconds are appended to `seconds` if given.
inline std::vector<Embedding> embed_sequence(std::span<const SnapshotMatrix> snapshots,
                                             const CdpConfig& config,
                                             std::vector<double>* seconds = nullptr) {
  config.validate();
  std::vector<Embedding> out;
  out.reserve(snapshots.size());
  for (const SnapshotMatrix& s : snapshots) {
    const auto start = std::chrono::steady_clock::now();
    out.push_back(embed_snapshot(s, config));
    if (seconds) seconds->push_back(detail::seconds_since(start));
  }
  return out;
}

/// Window profiles and change scores over precomputed embeddings.
inline ScoreSeries score_embeddings(std::span<const Embedding> embeddings, const CdpConfig& config) {
  config.validate();
  const std::size_t w = static_cast<std::size_t>(config.window);
  if (embeddings.size() <= w) throw InvalidArgument("sequence must be longer than the window");
  ScoreSeries series;
  series.window = config.window;
  for (const Embedding& e : embeddings) series.dims[e.t] = static_cast<int>(e.d());

  for (std::size_t pos = w; pos < embeddings.size(); ++pos) {
    const Embedding& current = embeddings[pos];
    const auto start = std::chrono::steady_clock::now();
    try {
      const Embedding profile = profile_embedding(embeddings.subspan(pos - w, w), config.gpa);
      ScoreVector z = change_scores(current, profile, config.gpa);
      series.timings[current.t].score_seconds = detail::seconds_since(start);
      detail::record_detection(series, std::move(z), config.zscore_threshold);
    } catch (Error& e) {
      if (!e.time()) e.set_time(current.t);
      throw;
    }
  }
  return series;
}

/**
 * Full change detection over a snapshot sequence: embed every snapshot,
 * build a profile from the preceding `window` embeddings, and score each
 * later snapshot against it.
 */
inline ScoreSeries run_cdp(std::span<const SnapshotMatrix> snapshots, const CdpConfig& config) {
  config.validate();
  detail::check_sequence(snapshots, config.window);
  std::vector<double> seconds;
  const std::vector<Embedding> embeddings = embed_sequence(snapshots, config, &seconds);
  ScoreSeries series = score_embeddings(embeddings, config);
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    series.timings[snapshots[i].t()].embed_seconds = seconds[i];
  }
  return series;
}

inline ScoreSeries run_cdp(const std::vector<SnapshotMatrix>& snapshots, const CdpConfig& config) {
  return run_cdp(std::span<const SnapshotMatrix>(snapshots), config);
}

inline ScoreSeries score_activities(std::span<const ActivityVector> activities, Method method,
                                    int window, double threshold) {
  if (method == Method::kCdp) throw InvalidArgument("score_activities: not an activity method");
  if (window < 1) throw InvalidArgument("window must be >= 1");
  const std::size_t w = static_cast<std::size_t>(window);
  if (activities.size() <= w) throw InvalidArgument("sequence must be longer than the window");
  ScoreSeries series;
  series.window = window;
  for (std::size_t pos = w; pos < activities.size(); ++pos) {
    const auto start = std::chrono::steady_clock::now();
    const auto past = activities.subspan(pos - w, w);
    ScoreVector z = method == Method::kAct ? act_scores(past, activities[pos])
                                           : actm_scores(past, activities[pos]);
    series.timings[activities[pos].t].score_seconds = detail::seconds_since(start);
    detail::record_detection(series, std::move(z), threshold);
  }
  return series;
}

/// ACT or ACTM over a snapshot sequence.
inline ScoreSeries run_baseline(std::span<const SnapshotMatrix> snapshots, Method method, int window,
                                double threshold = kDefaultZscoreThreshold, bool preprocess = false) {
  detail::check_sequence(snapshots, window);
  std::vector<ActivityVector> activities;
  std::vector<double> seconds;
  activities.reserve(snapshots.size());
  for (const SnapshotMatrix& s : snapshots) {
    const auto start = std::chrono::steady_clock::now();
    activities.push_back(activity(s, preprocess));
    seconds.push_back(detail::seconds_since(start));
  }
  ScoreSeries series = score_activities(activities, method, window, threshold);
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    series.timings[snapshots[i].t()].embed_seconds = seconds[i];
  }
  return series;
}

inline ScoreSeries run_baseline(const std::vector<SnapshotMatrix>& snapshots, Method method,
                                int window, double threshold = kDefaultZscoreThreshold,
                                bool preprocess = false) {
  return run_baseline(std::span<const SnapshotMatrix>(snapshots), method, window, threshold,
                      preprocess);
}

}  // namespace cdp

#endif  // CDP_PIPELINE_HPP_
