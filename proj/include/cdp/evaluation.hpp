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

#ifndef CDP_EVALUATION_HPP_
#define CDP_EVALUATION_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdp/core.hpp"
#include "cdp/dcsbm.hpp"
#include "cdp/pipeline.hpp"

namespace cdp {

inline constexpr int kDefaultPhiSamples = 100000;

/**
 * Sampling estimate of P[changed score > unchanged score]: N independent
 * draws with replacement from each partition, paired by position, counting
 * strict exceedances. The result is clamped to [1/(2N), 1 - 1/(2N)] so the
 * log odds stay finite.
 */
inline double estimate_phi(const Vector& z_changed, const Vector& z_unchanged, int N, Rng& rng) {
  if (z_changed.size() == 0 || z_unchanged.size() == 0) throw EmptyPartition("estimate_phi: empty partition");
  if (N < 1) throw InvalidArgument("estimate_phi: N must be >= 1");
  const auto nc = static_cast<std::uint64_t>(z_changed.size());
  const auto nu = static_cast<std::uint64_t>(z_unchanged.size());
  long long hits = 0;
  for (int i = 0; i < N; ++i) {
    const double a = z_changed(static_cast<Index>(uniform_index(rng, nc)));
    const double b = z_unchanged(static_cast<Index>(uniform_index(rng, nu)));
    if (a > b) ++hits;
  }
  const double lo = 1.0 / (2.0 * N);
  return std::clamp(static_cast<double>(hits) / N, lo, 1.0 - lo);
}

inline double log_odds(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) throw InvalidArgument("log_odds: phi must lie in (0,1)");
  return std::log(phi / (1.0 - phi));
}

inline double log_odds_ratio(double phi_t, double phi_prev) { return log_odds(phi_t) - log_odds(phi_prev); }

enum class Alternative { kGreater, kLess, kTwoSided };

inline std::string_view alternative_name(Alternative a) {
  switch (a) {
    case Alternative::kGreater: return "greater";
    case Alternative::kLess: return "less";
    case Alternative::kTwoSided: return "two_sided";
  }
  return "?";
}

namespace detail {

/// log C(n, k) - n log 2.
inline double log_binom_half(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0);
}

/// P[X >= k] for X ~ Binomial(n, 1/2), summed in log space.
inline double binom_half_upper(int n, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (int i = k; i <= n; ++i) top = std::max(top, log_binom_half(n, i));
  double acc = 0.0;
  for (int i = k; i <= n; ++i) acc += std::exp(log_binom_half(n, i) - top);
  return std::min(1.0, std::exp(top) * acc);
}

}  // namespace detail

struct SignTestResult {
  double p_value = 1.0;
  int positives = 0;
  int negatives = 0;
  int ties = 0;
};

/**
 * Exact sign test on the paired differences a_i - b_i. Ties are dropped;
 * "greater" tests whether a tends to exceed b. The two-sided p-value is twice
 * the smaller tail, capped at 1. Throws UndefinedTest when every pair ties.
 */
inline SignTestResult sign_test(const std::vector<double>& a, const std::vector<double>& b, Alternative alt) {
  if (a.size() != b.size()) throw InvalidArgument("sign_test: length mismatch");
  SignTestResult r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) ++r.positives;
    else if (a[i] < b[i]) ++r.negatives;
    else ++r.ties;
  }
  const int n = r.positives + r.negatives;
  if (n == 0) throw UndefinedTest("sign_test: all pairs tie");
  const double upper = detail::binom_half_upper(n, r.positives);       // P[X >= pos]
  const double lower = detail::binom_half_upper(n, n - r.positives);   // P[X <= pos]
  switch (alt) {
    case Alternative::kGreater: r.p_value = upper; break;
    case Alternative::kLess: r.p_value = lower; break;
    case Alternative::kTwoSided: r.p_value = std::min(1.0, 2.0 * std::min(upper, lower)); break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Simulation experiment
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::vector<Method> methods{Method::kCdp, Method::kAct, Method::kActm};
  std::vector<int> windows{1, 5, 10};
  int runs = 100;
  std::uint64_t seed = 0;
  int samples = kDefaultPhiSamples;
  double epsilon_rank = kDefaultRankEpsilon;
  NormMethod norm_method = NormMethod::kPowerIteration;
  bool baseline_preprocess = false;
  bool freeze_theta = false;
};

/// phi, eta and eta_bar keyed by (run, t). eta_bar needs t - 1 scored too.
struct PerformanceSeries {
  Method method = Method::kCdp;
  int window = 1;
  int N = kDefaultPhiSamples;
  std::map<std::pair<int, int>, double> phi;
  std::map<std::pair<int, int>, double> eta;
  std::map<std::pair<int, int>, double> eta_bar;

  /// Values of `field` at time t across runs, in run order.
  std::vector<double> at(const std::map<std::pair<int, int>, double>& field, int t) const {
    std::vector<double> out;
    for (const auto& [key, v] : field) {
      if (key.second == t) out.push_back(v);
    }
    return out;
  }
};

struct SignTestRow {
  int window = 0;
  int t = 0;
  Method lhs = Method::kCdp;
  Method rhs = Method::kAct;
  Alternative alternative = Alternative::kGreater;
  std::optional<double> p_value;  // empty when every run ties
  double proportion = 0.0;        // share of runs in the alternative's direction
  int runs = 0;
};

struct TimingRow {
  Method method = Method::kCdp;
  int window = 0;
  double embed_seconds = 0.0;  // mean per snapshot
  double score_seconds = 0.0;  // mean per scored instant
};

struct ExperimentResult {
  std::string scenario;
  int change_time = 0;
  std::vector<PerformanceSeries> performance;
  std::vector<SignTestRow> sign_tests;
  std::vector<TimingRow> timing;

  const PerformanceSeries& series(Method m, int window) const {
    for (const PerformanceSeries& p : performance) {
      if (p.method == m && p.window == window) return p;
    }
    throw InvalidArgument("no performance series for " + std::string(method_name(m)) + " w=" +
                          std::to_string(window));
  }
};

/// Seed of run r. Every stochastic stage of the run derives from it.
inline std::uint64_t run_seed(std::uint64_t base, int run) {
  return base ^ static_cast<std::uint64_t>(run);
}

enum : std::uint64_t { kStreamSimulate = 1, kStreamEmbed = 2, kStreamPhi = 3 };

namespace detail {

inline void split_scores(const Vector& z, const std::vector<bool>& changed, Vector& zc, Vector& zu) {
  Index nc = 0;
  for (bool b : changed) nc += b ? 1 : 0;
  zc.resize(nc);
  zu.resize(z.size() - nc);
  Index ic = 0, iu = 0;
  for (Index i = 0; i < z.size(); ++i) {
    if (changed[static_cast<std::size_t>(i)]) zc(ic++) = z(i);
    else zu(iu++) = z(i);
  }
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/**
 * Repeats the scenario `runs` times. Each run simulates a sequence, scores
 * it with every method and window, and turns the per-instant scores into
 * phi, eta and eta_bar. Sign tests compare eta at the change onset across
 * methods for each window.
 */
inline ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentConfig& config) {
  if (config.runs < 1) throw InvalidArgument("run_experiment: runs must be >= 1");
  if (config.methods.empty() || config.windows.empty()) throw InvalidArgument("run_experiment: nothing to run");
  const int w_max = *std::max_element(config.windows.begin(), config.windows.end());
  spec.validate(w_max);

  ExperimentResult result;
  result.scenario = spec.name;
  result.change_time = change_onset(spec.change);

  const auto uses = [&](Method m) {
    return std::find(config.methods.begin(), config.methods.end(), m) != config.methods.end();
  };
  const bool need_activity = uses(Method::kAct) || uses(Method::kActm);

  std::vector<bool> changed(static_cast<std::size_t>(spec.f0.n()), false);
  for (Index v : spec.changed_vertices) changed[static_cast<std::size_t>(v)] = true;

  for (int w : config.windows) {
    for (Method m : config.methods) {
      PerformanceSeries p;
      p.method = m;
      p.window = w;
      p.N = config.samples;
      result.performance.push_back(std::move(p));
    }
  }
  auto series_for = [&](Method m, int w) -> PerformanceSeries& {
    for (PerformanceSeries& p : result.performance) {
      if (p.method == m && p.window == w) return p;
    }
    throw InvalidArgument("internal: missing series");
  };

  std::map<std::pair<Method, int>, std::vector<double>> embed_times, score_times;

  for (int run = 0; run < config.runs; ++run) {
    const std::uint64_t seed = run_seed(config.seed, run);
    Rng sim_rng(derive_seed(seed, kStreamSimulate));
    const GeneratedSequence seq = generate_sequence(spec, sim_rng, config.freeze_theta);

    std::vector<Embedding> embeddings;
    if (uses(Method::kCdp)) {
      CdpConfig cc;
      cc.epsilon_rank = config.epsilon_rank;
      cc.norm_method = config.norm_method;
      cc.seed = derive_seed(seed, kStreamEmbed);
      std::vector<double> secs;
      embeddings = embed_sequence(seq.snapshots, cc, &secs);
      auto& bucket = embed_times[{Method::kCdp, 0}];
      bucket.insert(bucket.end(), secs.begin(), secs.end());
    }
    std::vector<ActivityVector> activities;
    if (need_activity) {
      for (const SnapshotMatrix& s : seq.snapshots) {
        const auto start = std::chrono::steady_clock::now();
        activities.push_back(activity(s, config.baseline_preprocess));
        embed_times[{Method::kAct, 0}].push_back(detail::seconds_since(start));
      }
    }

    for (int w : config.windows) {
      for (Method m : config.methods) {
        ScoreSeries scores;
        if (m == Method::kCdp) {
          CdpConfig cc;
          cc.window = w;
          scores = score_embeddings(embeddings, cc);
        } else {
          scores = score_activities(activities, m, w, kDefaultZscoreThreshold);
        }
        PerformanceSeries& perf = series_for(m, w);
        for (const auto& [t, sv] : scores.scores) {
          score_times[{m, w}].push_back(scores.timings[t].score_seconds);
          Vector zc, zu;
          detail::split_scores(sv.z, changed, zc, zu);
          Rng phi_rng(derive_seed(seed, kStreamPhi, static_cast<std::uint64_t>(m),
                                  static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(t)));
          const double phi = estimate_phi(zc, zu, config.samples, phi_rng);
          perf.phi[{run, t}] = phi;
          perf.eta[{run, t}] = log_odds(phi);
          if (auto prev = perf.phi.find({run, t - 1}); prev != perf.phi.end()) {
            perf.eta_bar[{run, t}] = log_odds_ratio(phi, prev->second);
          }
        }
      }
    }
  }

  // Cross-method comparisons of eta at the change onset.
  const int t_star = result.change_time;
  const std::pair<Method, Method> pairs[] = {
      {Method::kCdp, Method::kAct}, {Method::kCdp, Method::kActm}, {Method::kActm, Method::kAct}};
  for (int w : config.windows) {
    for (const auto& [lhs, rhs] : pairs) {
      if (!uses(lhs) || !uses(rhs)) continue;
      const std::vector<double> a = series_for(lhs, w).at(series_for(lhs, w).eta, t_star);
      const std::vector<double> b = series_for(rhs, w).at(series_for(rhs, w).eta, t_star);
      for (Alternative alt : {Alternative::kGreater, Alternative::kLess}) {
        SignTestRow row;
        row.window = w;
        row.t = t_star;
        row.lhs = lhs;
        row.rhs = rhs;
        row.alternative = alt;
        row.runs = static_cast<int>(a.size());
        int favourable = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          favourable += alt == Alternative::kGreater ? (a[i] > b[i]) : (a[i] < b[i]);
        }
        row.proportion = a.empty() ? 0.0 : static_cast<double>(favourable) / static_cast<double>(a.size());
        try {
          row.p_value = sign_test(a, b, alt).p_value;
        } catch (const UndefinedTest&) {
          row.p_value.reset();
        }
        result.sign_tests.push_back(row);
      }
    }
  }

  for (int w : config.windows) {
    for (Method m : config.methods) {
      TimingRow row;
      row.method = m;
      row.window = w;
      row.embed_seconds = detail::mean_of(embed_times[{m == Method::kCdp ? Method::kCdp : Method::kAct, 0}]);
      row.score_seconds = detail::mean_of(score_times[{m, w}]);
      result.timing.push_back(row);
    }
  }
  return result;
}

}  // namespace cdp

#endif  // CDP_EVALUATION_HPP_
