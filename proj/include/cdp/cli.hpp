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

#ifndef CDP_CLI_HPP_
#define CDP_CLI_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdp/core.hpp"
#include "cdp/dcsbm.hpp"
#include "cdp/evaluation.hpp"
#include "cdp/io.hpp"
#include "cdp/pipeline.hpp"

#ifndef CDP_VERSION
#define CDP_VERSION "0.0.0"
#endif

namespace cdp::cli {

using nlohmann::json;

/// Failure of one command stage; carries the stage name and time index.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, const std::string& message, std::optional<int> t)
      : Error(message, t), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

  /// One-line diagnostic such as "embed failed at t=4: ...".
  std::string diagnostic() const {
    std::string s = stage_ + " failed";
    if (time()) s += " at t=" + std::to_string(*time());
    return s + ": " + what();
  }

 private:
  std::string stage_;
};

/// Record of one command invocation, written next to its outputs.
class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  json& config() { return config_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const std::string& path) { inputs_.push_back(path); }
  void add_output(const std::string& path) { outputs_.push_back(path); }
  void add_timing(const std::string& stage, double seconds) { timings_[stage] = seconds; }
  const std::vector<std::string>& outputs() const { return outputs_; }

  template <typename F>
  auto stage(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
        body();
        add_timing(name, detail::seconds_since(start));
      } else {
        auto result = body();
        add_timing(name, detail::seconds_since(start));
        return result;
      }
    } catch (const StageFailure&) {
      throw;
    } catch (const Error& e) {
      throw StageFailure(name, e.what(), e.time());
    }
  }

  json to_json() const {
    json j;
    j["command"] = command_;
    j["tool_version"] = CDP_VERSION;
    j["config"] = config_;
    if (seed_) j["seed"] = *seed_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["timings_seconds"] = timings_;
    return j;
  }

  void write(const std::filesystem::path& dir) const {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write manifest in '" + dir.string() + "'");
    out << to_json().dump(2) << '\n';
  }

 private:
  std::string command_;
  json config_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::map<std::string, double> timings_;
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StageFailure("setup", "cannot create output directory '" + out + "': " + ec.message(), std::nullopt);
  return dir;
}

inline ChangeType make_change(const std::string& kind, int t_star, int t_end) {
  if (kind == "point") return ChangePoint{t_star};
  if (kind == "interval") return ChangeInterval{t_star, t_end};
  throw UnknownName("unknown change type '" + kind + "' (expected point or interval)");
}

/// Linear-interpolation quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string scenario = "group-change";
  std::string change_type = "point";
  int T = 30;
  int t_star = 21;
  int t_end = 30;
  std::uint64_t seed = 0;
  double scale = 1.0;
  bool freeze_theta = false;
  std::string out = "out";
};

inline json truth_to_json(const GroundTruth& truth) {
  json j;
  j["scenario"] = truth.scenario;
  j["n"] = truth.n;
  j["T"] = truth.T;
  if (const auto* p = std::get_if<ChangePoint>(&truth.change)) {
    j["change_type"] = "point";
    j["t_star"] = p->t_star;
  } else {
    const auto& iv = std::get<ChangeInterval>(truth.change);
    j["change_type"] = "interval";
    j["t_start"] = iv.t_start;
    j["t_end"] = iv.t_end;
  }
  j["vertex_index_base"] = 0;
  j["changed_vertices"] = truth.changed_vertices;
  return j;
}

/// Same stream as run 0 of an experiment with the same base seed.
inline GeneratedSequence simulate_sequence(const SimulateOptions& opts) {
  const ScenarioSpec spec = scenario(opts.scenario, detail::make_change(opts.change_type, opts.t_star, opts.t_end),
                                     opts.T, opts.scale);
  Rng rng(derive_seed(run_seed(opts.seed, 0), kStreamSimulate));
  return generate_sequence(spec, rng, opts.freeze_theta);
}

inline RunManifest cmd_simulate(const SimulateOptions& opts) {
  RunManifest manifest("simulate");
  manifest.set_seed(opts.seed);
  manifest.config() = {{"scenario", opts.scenario}, {"change_type", opts.change_type}, {"T", opts.T},
                       {"t_star", opts.t_star},     {"t_end", opts.t_end},             {"seed", opts.seed},
                       {"scale", opts.scale},       {"freeze_theta", opts.freeze_theta}, {"out", opts.out}};
  const auto dir = detail::prepare_out_dir(opts.out);
  const GeneratedSequence seq = manifest.stage("simulate", [&] { return simulate_sequence(opts); });
  manifest.stage("write", [&] {
    write_sequence((dir / "sequence.edges").string(), seq.snapshots);
    std::ofstream truth(dir / "truth.json", std::ios::binary);
    truth << truth_to_json(seq.truth).dump(2) << '\n';
  });
  manifest.add_output((dir / "sequence.edges").string());
  manifest.add_output((dir / "truth.json").string());
  manifest.add_output((dir / "manifest.json").string());
  manifest.write(dir);
  return manifest;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectOptions {
  std::string input;
  std::optional<Index> n;
  std::string method = "cdp";
  int window = 1;
  double epsilon = kDefaultRankEpsilon;
  double threshold = kDefaultZscoreThreshold;
  std::uint64_t seed = 0;
  bool baseline_preprocess = false;
  std::string out = "out";
};

inline ScoreSeries detect_series(const std::vector<SnapshotMatrix>& snapshots, const DetectOptions& opts) {
  const Method method = parse_method(opts.method);
  if (method == Method::kCdp) {
    CdpConfig config;
    config.window = opts.window;
    config.epsilon_rank = opts.epsilon;
    config.zscore_threshold = opts.threshold;
    config.seed = opts.seed;
    return run_cdp(snapshots, config);
  }
  return run_baseline(snapshots, method, opts.window, opts.threshold, opts.baseline_preprocess);
}

inline RunManifest cmd_detect(const DetectOptions& opts) {
  RunManifest manifest("detect");
  manifest.set_seed(opts.seed);
  manifest.config() = {{"input", opts.input},       {"method", opts.method}, {"window", opts.window},
                       {"epsilon", opts.epsilon},   {"threshold", opts.threshold}, {"seed", opts.seed},
                       {"baseline_preprocess", opts.baseline_preprocess}, {"out", opts.out}};
  if (opts.n) manifest.config()["n"] = *opts.n;
  manifest.add_input(opts.input);
  parse_method(opts.method);
  const auto dir = detail::prepare_out_dir(opts.out);

  const auto snapshots = manifest.stage("ingest", [&] { return ingest_sequence(opts.input, opts.n); });
  const ScoreSeries series = manifest.stage("detect", [&] { return detect_series(snapshots, opts); });

  manifest.stage("write", [&] {
    CsvWriter scores((dir / "scores.csv").string(), {"t", "vertex", "z", "zscore", "detected"});
    CsvWriter summary((dir / "summary.csv").string(), {"t", "n_detected", "fraction", "degenerate"});
    for (const auto& [t, sv] : series.scores) {
      const Vector& zs = series.zscores.at(t);
      const auto& det = series.detections.at(t);
      std::vector<bool> flagged(static_cast<std::size_t>(sv.z.size()), false);
      for (Index i : det) flagged[static_cast<std::size_t>(i)] = true;
      for (Index i = 0; i < sv.z.size(); ++i) {
        scores.write(t, i, sv.z(i), zs(i), static_cast<bool>(flagged[static_cast<std::size_t>(i)]));
      }
      summary.write(t, det.size(), static_cast<double>(det.size()) / static_cast<double>(sv.z.size()),
                    series.degenerate.at(t));
    }
    CsvWriter dims((dir / "dims.csv").string(), {"t", "d"});
    for (const SnapshotMatrix& s : snapshots) {
      const auto it = series.dims.find(s.t());
      dims.write(s.t(), it == series.dims.end() ? 1 : it->second);
    }
  });
  double embed_total = 0.0, score_total = 0.0;
  for (const auto& [t, timing] : series.timings) {
    embed_total += timing.embed_seconds;
    score_total += timing.score_seconds;
  }
  manifest.add_timing("embed_total", embed_total);
  manifest.add_timing("profile_and_score_total", score_total);
  for (const char* f : {"scores.csv", "summary.csv", "dims.csv", "manifest.json"}) {
    manifest.add_output((dir / f).string());
  }
  manifest.write(dir);
  return manifest;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOptions {
  std::string scenario = "group-change";
  std::string change_type = "point";
  int T = 30;
  int t_star = 21;
  int t_end = 30;
  std::vector<std::string> methods{"cdp", "act", "actm"};
  std::vector<int> windows{1, 5, 10};
  int runs = 100;
  std::uint64_t seed = 0;
  double scale = 1.0;
  int samples = kDefaultPhiSamples;
  double epsilon = kDefaultRankEpsilon;
  bool baseline_preprocess = false;
  bool freeze_theta = false;
  std::string out = "out";
};

inline ExperimentResult evaluate(const EvaluateOptions& opts) {
  const ScenarioSpec spec = scenario(opts.scenario, detail::make_change(opts.change_type, opts.t_star, opts.t_end),
                                     opts.T, opts.scale);
  ExperimentConfig config;
  config.methods.clear();
  for (const std::string& m : opts.methods) config.methods.push_back(parse_method(m));
  config.windows = opts.windows;
  config.runs = opts.runs;
  config.seed = opts.seed;
  config.samples = opts.samples;
  config.epsilon_rank = opts.epsilon;
  config.baseline_preprocess = opts.baseline_preprocess;
  config.freeze_theta = opts.freeze_theta;
  return run_experiment(spec, config);
}

inline std::string hypothesis_label(const SignTestRow& row) {
  const std::string op = row.alternative == Alternative::kGreater ? " > " : " < ";
  return "eta" + std::to_string(row.t) + "_" + std::string(method_name(row.lhs)) + op + "eta" +
         std::to_string(row.t) + "_" + std::string(method_name(row.rhs));
}

inline void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir, RunManifest& manifest) {
  {
    CsvWriter perf((dir / "performance.csv").string(),
                   {"scenario", "method", "window", "run", "t", "phi", "eta", "eta_bar"});
    for (const PerformanceSeries& p : result.performance) {
      for (const auto& [key, phi] : p.phi) {
        const auto eb = p.eta_bar.find(key);
        perf.write(result.scenario, method_name(p.method), p.window, key.first, key.second, phi, p.eta.at(key),
                   eb == p.eta_bar.end() ? std::string() : format_double(eb->second));
      }
    }
  }
  {
    CsvWriter agg((dir / "aggregate.csv").string(),
                  {"scenario", "method", "window", "t", "runs", "eta_q1", "eta_median", "eta_q3", "eta_bar_q1",
                   "eta_bar_median", "eta_bar_q3"});
    for (const PerformanceSeries& p : result.performance) {
      std::vector<int> times;
      for (const auto& [key, v] : p.eta) times.push_back(key.second);
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      for (int t : times) {
        const auto eta = p.at(p.eta, t);
        const auto eta_bar = p.at(p.eta_bar, t);
        auto q = [](const std::vector<double>& v, double f) {
          return v.empty() ? std::string() : format_double(detail::quantile(v, f));
        };
        agg.write(result.scenario, method_name(p.method), p.window, t, eta.size(), q(eta, 0.25), q(eta, 0.5),
                  q(eta, 0.75), q(eta_bar, 0.25), q(eta_bar, 0.5), q(eta_bar, 0.75));
      }
    }
  }
  {
    CsvWriter signs((dir / "sign_tests.csv").string(),
                    {"scenario", "window", "t", "hypothesis", "alternative", "runs", "p_value"});
    CsvWriter props((dir / "proportions.csv").string(), {"scenario", "window", "t", "hypothesis", "proportion"});
    for (const SignTestRow& row : result.sign_tests) {
      signs.write(result.scenario, row.window, row.t, hypothesis_label(row), alternative_name(row.alternative),
                  row.runs, row.p_value ? format_double(*row.p_value) : std::string("NA"));
      props.write(result.scenario, row.window, row.t, hypothesis_label(row), row.proportion);
    }
  }
  {
    CsvWriter timing((dir / "timing.csv").string(),
                     {"method", "window", "embed_seconds_per_snapshot", "score_seconds_per_instant"});
    for (const TimingRow& row : result.timing) {
      timing.write(method_name(row.method), row.window, row.embed_seconds, row.score_seconds);
    }
  }
  for (const char* f : {"performance.csv", "aggregate.csv", "sign_tests.csv", "proportions.csv", "timing.csv"}) {
    manifest.add_output((dir / f).string());
  }
}

inline RunManifest cmd_evaluate(const EvaluateOptions& opts) {
  RunManifest manifest("evaluate");
  manifest.set_seed(opts.seed);
  manifest.config() = {{"scenario", opts.scenario}, {"change_type", opts.change_type}, {"T", opts.T},
                       {"t_star", opts.t_star},     {"t_end", opts.t_end},             {"methods", opts.methods},
                       {"windows", opts.windows},   {"runs", opts.runs},               {"seed", opts.seed},
                       {"scale", opts.scale},       {"samples", opts.samples},         {"epsilon", opts.epsilon},
                       {"baseline_preprocess", opts.baseline_preprocess},
                       {"freeze_theta", opts.freeze_theta}, {"out", opts.out}};
  const auto dir = detail::prepare_out_dir(opts.out);
  const ExperimentResult result = manifest.stage("evaluate", [&] { return evaluate(opts); });
  manifest.stage("write", [&] { write_experiment(result, dir, manifest); });
  manifest.add_output((dir / "manifest.json").string());
  manifest.write(dir);
  return manifest;
}

}  // namespace cdp::cli

#endif  // CDP_CLI_HPP_
