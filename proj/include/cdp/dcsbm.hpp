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

#ifndef CDP_DCSBM_HPP_
#define CDP_DCSBM_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "cdp/core.hpp"
#include "cdp/graph_core.hpp"

namespace cdp {

/// Pareto law with density (shape-1)/theta_min * (theta/theta_min)^(-shape).
struct PowerLawTheta {
  double theta_min = 1.0;
  double shape = 2.5;
};

/// Every vertex of the block gets the same degree parameter.
struct ConstantTheta {};

using ThetaLaw = std::variant<PowerLawTheta, ConstantTheta>;

/**
 * Degree-corrected stochastic block model with contiguous blocks.
 *
 * Block probabilities are B = lambda * planted + (1 - lambda) * nu * 11^T and
 * edge weights are Poisson with mean theta_i theta_j psi(c_i, c_j), where
 * psi(r, s) = B(r, s) g_r g_s. theta is normalized to sum to one per block.
 */
struct DcsbmModel {
  std::string name;
  std::vector<Index> block_sizes;
  Matrix planted;
  double nu = 0.0;
  double lambda = 1.0;
  std::vector<ThetaLaw> theta_laws;  // one per block

  Index k() const noexcept { return static_cast<Index>(block_sizes.size()); }
  Index n() const noexcept { return std::accumulate(block_sizes.begin(), block_sizes.end(), Index{0}); }

  /// Block label (0-based) of every vertex.
  std::vector<Index> memberships() const {
    std::vector<Index> c;
    c.reserve(static_cast<std::size_t>(n()));
    for (Index r = 0; r < k(); ++r) c.insert(c.end(), static_cast<std::size_t>(block_sizes[static_cast<std::size_t>(r)]), r);
    return c;
  }

  void validate() const {
    if (block_sizes.empty()) throw InvalidArgument("dcsbm: no blocks");
    if (planted.rows() != k() || planted.cols() != k()) throw InvalidArgument("dcsbm: planted matrix must be k x k");
    if (theta_laws.size() != block_sizes.size()) throw InvalidArgument("dcsbm: need one theta law per block");
    if (std::any_of(block_sizes.begin(), block_sizes.end(), [](Index g) { return g < 0; })) {
      throw InvalidArgument("dcsbm: negative block size");
    }
    if (n() < 2) throw InvalidArgument("dcsbm: need at least two vertices");
    if (lambda < 0.0 || lambda > 1.0) throw InvalidProbability("dcsbm: lambda outside [0,1]");
    if (nu < 0.0 || nu > 1.0) throw InvalidProbability("dcsbm: nu outside [0,1]");
  }
};

inline Matrix block_matrix(const DcsbmModel& model) {
  const Index k = model.k();
  Matrix b = model.lambda * model.planted + (1.0 - model.lambda) * model.nu * Matrix::Ones(k, k);
  if ((b.array() < 0.0).any() || (b.array() > 1.0).any() || !b.allFinite()) {
    throw InvalidProbability("block matrix has entries outside [0,1]");
  }
  return b;
}

/// Expected edge count between blocks: psi(r, s) = B(r, s) g_r g_s.
inline Matrix psi(const DcsbmModel& model) {
  const Matrix b = block_matrix(model);
  Matrix out(model.k(), model.k());
  for (Index r = 0; r < model.k(); ++r) {
    for (Index s = 0; s < model.k(); ++s) {
      out(r, s) = b(r, s) * static_cast<double>(model.block_sizes[static_cast<std::size_t>(r)]) *
                  static_cast<double>(model.block_sizes[static_cast<std::size_t>(s)]);
    }
  }
  return out;
}

/// One inverse-CDF draw from the power law, before any normalization.
inline double draw_power_law(const PowerLawTheta& law, Rng& rng) {
  return law.theta_min * std::pow(1.0 - uniform01(rng), -1.0 / (law.shape - 1.0));
}

inline Vector sample_theta(const DcsbmModel& model, Rng& rng) {
  model.validate();
  Vector theta(model.n());
  Index start = 0;
  for (std::size_t r = 0; r < model.block_sizes.size(); ++r) {
    const Index g = model.block_sizes[r];
    if (g == 0) continue;
    auto block = theta.segment(start, g);
    if (const auto* pl = std::get_if<PowerLawTheta>(&model.theta_laws[r])) {
      if (!(pl->shape > 1.0)) throw InvalidShape("power-law shape must exceed 1");
      if (!(pl->theta_min > 0.0)) throw InvalidShape("power-law theta_min must be positive");
      for (Index i = 0; i < g; ++i) block(i) = draw_power_law(*pl, rng);
      block /= block.sum();
    } else {
      block.setConstant(1.0 / static_cast<double>(g));
    }
    start += g;
  }
  return theta;
}

namespace detail {

/// Poisson draw; the standard library uses inversion for small means and
/// rejection for large ones.
inline double draw_poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0.0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(rng));
}

}  // namespace detail

/// Draws W_ij ~ Poisson(theta_i theta_j psi) for i < j, mirrored, zero diagonal.
inline SnapshotMatrix sample_snapshot(const DcsbmModel& model, const Vector& theta, Rng& rng, int t = 1) {
  const Index n = model.n();
  if (theta.size() != n) throw DimensionError("sample_snapshot: theta length differs from n");
  const Matrix p = psi(model);
  const std::vector<Index> c = model.memberships();
  Matrix w = Matrix::Zero(n, n);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double mean = theta(i) * theta(j) * p(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]);
      const double x = detail::draw_poisson(mean, rng);
      w(i, j) = x;
      w(j, i) = x;
    }
  }
  return SnapshotMatrix(std::move(w), t);
}

// ---------------------------------------------------------------------------
// Model catalog
// ---------------------------------------------------------------------------

struct CatalogConstants {
  static constexpr Index n = 900;
  static constexpr double lambda = 0.8;
  static constexpr double alpha = 0.01;
  static constexpr double beta = 0.02;
  static constexpr double gamma = 0.03;
  static constexpr double nu = 0.0025;
  static constexpr double theta_min = 1.0;
  static constexpr double shape = 2.5;
};

namespace detail {

inline std::vector<Index> scale_sizes(std::vector<Index> sizes, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");
  // Round cumulative boundaries so models sharing a total keep sharing it.
  Index total = 0;
  Index prev = 0;
  for (Index& g : sizes) {
    total += g;
    const Index edge = static_cast<Index>(std::llround(static_cast<double>(total) * scale));
    g = edge - prev;
    prev = edge;
  }
  return sizes;
}

inline Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

}  // namespace detail

/// Models M1..M6. `scale` multiplies block sizes (cumulative boundaries rounded to nearest).
inline DcsbmModel catalog(std::string_view name, double scale = 1.0) {
  using C = CatalogConstants;
  const PowerLawTheta pl{C::theta_min, C::shape};
  DcsbmModel m;
  m.name = std::string(name);
  m.lambda = C::lambda;
  m.nu = C::nu;
  if (name == "M1") {
    m.block_sizes = {300, 300, 300};
    m.planted = detail::diag3(C::alpha, C::beta, C::gamma);
  } else if (name == "M2") {
    m.block_sizes = {150, 150, 300, 300};
    m.planted = Matrix::Zero(4, 4);
    m.planted.diagonal() << C::alpha, C::alpha, C::beta, C::gamma;
  } else if (name == "M3") {
    m.block_sizes = {300, 300, 300};
    m.planted = detail::diag3(C::alpha, C::beta, 0.1 * C::gamma);
  } else if (name == "M4") {
    m.block_sizes = {150, 450, 300};
    m.planted = detail::diag3(C::alpha, C::beta, C::gamma);
  } else if (name == "M5") {
    m.block_sizes = {300, 300, 300};
    m.planted = detail::diag3(C::alpha, C::beta, C::gamma);
  } else if (name == "M6") {
    m.block_sizes = {300, 300, 300};
    m.planted = Matrix::Zero(3, 3);
    m.planted(0, 0) = 0.5 * C::alpha;
    m.planted(0, 1) = m.planted(1, 0) = 0.5 * C::alpha;
    m.planted(1, 1) = C::beta - 0.5 * C::alpha;
    m.planted(2, 2) = C::gamma;
  } else {
    throw UnknownName("unknown model '" + std::string(name) + "' (expected M1..M6)");
  }
  m.theta_laws.assign(m.block_sizes.size(), pl);
  if (name == "M5") m.theta_laws[0] = ConstantTheta{};  // homogeneous first block
  m.block_sizes = detail::scale_sizes(std::move(m.block_sizes), scale);
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Change scenarios
// ---------------------------------------------------------------------------

struct ChangePoint {
  int t_star = 21;
};

struct ChangeInterval {
  int t_start = 21;
  int t_end = 30;
};

using ChangeType = std::variant<ChangePoint, ChangeInterval>;

/// First instant at which f1 is active.
inline int change_onset(const ChangeType& change) {
  return std::visit(
      [](const auto& c) {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ChangePoint>) {
          return c.t_star;
        } else {
          return c.t_start;
        }
      },
      change);
}

/// True when the snapshot at time t is drawn from f1.
inline bool uses_changed_model(const ChangeType& change, int t) {
  if (const auto* p = std::get_if<ChangePoint>(&change)) return t == p->t_star;
  const auto& iv = std::get<ChangeInterval>(change);
  return iv.t_start <= t && t <= iv.t_end;
}

struct ScenarioSpec {
  std::string name;
  DcsbmModel f0;
  DcsbmModel f1;
  ChangeType change = ChangePoint{};
  int T = 30;
  std::vector<Index> changed_vertices;  // 0-based, ascending

  /// Checks the change window; `window` is the largest window that will score it.
  void validate(int window = 0) const {
    f0.validate();
    f1.validate();
    if (f0.n() != f1.n()) throw InvalidArgument("scenario: f0 and f1 differ in vertex count");
    if (const auto* p = std::get_if<ChangePoint>(&change)) {
      if (!(window < p->t_star && p->t_star <= T)) {
        throw InvalidArgument("scenario: need window < t* <= T");
      }
    } else {
      const auto& iv = std::get<ChangeInterval>(change);
      if (!(window < iv.t_start && iv.t_start < iv.t_end && iv.t_end <= T)) {
        throw InvalidArgument("scenario: need window < t1 < t2 <= T");
      }
    }
    for (Index v : changed_vertices) {
      if (v < 0 || v >= f0.n()) throw InvalidArgument("scenario: changed vertex out of range");
    }
  }
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{
      "group-change",   "split",          "merge",
      "form",           "fragment",       "hetero-to-homo",
      "homo-to-hetero", "simple-to-complex", "complex-to-simple"};
  return names;
}

/**
 * Catalog scenario with its model pair and changed-vertex set. Vertex ranges
 * follow the M1 block layout at the same scale: the first block, the first
 * two blocks, or the last block.
 */
inline ScenarioSpec scenario(std::string_view name, ChangeType change = ChangePoint{}, int T = 30,
                             double scale = 1.0) {
  struct Row {
    std::string_view name, f0, f1;
    enum { kFirst, kFirstTwo, kLast } vertices;
  };
  static constexpr Row rows[] = {
      {"group-change", "M1", "M4", Row::kFirstTwo},
      {"split", "M1", "M2", Row::kFirst},
      {"merge", "M2", "M1", Row::kFirst},
      {"form", "M3", "M1", Row::kLast},
      {"fragment", "M1", "M3", Row::kLast},
      {"hetero-to-homo", "M1", "M5", Row::kFirst},
      {"homo-to-hetero", "M5", "M1", Row::kFirst},
      {"simple-to-complex", "M1", "M6", Row::kFirstTwo},
      {"complex-to-simple", "M6", "M1", Row::kFirstTwo},
  };
  const auto it = std::find_if(std::begin(rows), std::end(rows), [&](const Row& r) { return r.name == name; });
  if (it == std::end(rows)) throw UnknownName("unknown scenario '" + std::string(name) + "'");

  ScenarioSpec spec;
  spec.name = std::string(name);
  spec.f0 = catalog(it->f0, scale);
  spec.f1 = catalog(it->f1, scale);
  spec.change = change;
  spec.T = T;

  const std::vector<Index> g = catalog("M1", scale).block_sizes;
  Index lo = 0, hi = 0;
  switch (it->vertices) {
    case Row::kFirst: hi = g[0]; break;
    case Row::kFirstTwo: hi = g[0] + g[1]; break;
    case Row::kLast: lo = g[0] + g[1]; hi = lo + g[2]; break;
  }
  spec.changed_vertices.resize(static_cast<std::size_t>(hi - lo));
  std::iota(spec.changed_vertices.begin(), spec.changed_vertices.end(), lo);
  spec.validate();
  return spec;
}

struct GroundTruth {
  std::string scenario;
  Index n = 0;
  int T = 0;
  ChangeType change = ChangePoint{};
  std::vector<Index> changed_vertices;
};

struct GeneratedSequence {
  std::vector<SnapshotMatrix> snapshots;
  GroundTruth truth;
};

/**
 * Draws T snapshots (t = 1..T), each from f1 when the change type says so
 * and from f0 otherwise. theta is redrawn for every snapshot unless
 * `freeze_theta` is set, in which case one theta per model is reused.
 */
inline GeneratedSequence generate_sequence(const ScenarioSpec& spec, Rng& rng, bool freeze_theta = false) {
  spec.validate();
  GeneratedSequence out;
  out.truth = GroundTruth{spec.name, spec.f0.n(), spec.T, spec.change, spec.changed_vertices};
  out.snapshots.reserve(static_cast<std::size_t>(spec.T));
  Vector frozen0, frozen1;
  if (freeze_theta) {
    frozen0 = sample_theta(spec.f0, rng);
    frozen1 = sample_theta(spec.f1, rng);
  }
  for (int t = 1; t <= spec.T; ++t) {
    const bool changed = uses_changed_model(spec.change, t);
    const DcsbmModel& model = changed ? spec.f1 : spec.f0;
    const Vector theta = freeze_theta ? (changed ? frozen1 : frozen0) : sample_theta(model, rng);
    out.snapshots.push_back(sample_snapshot(model, theta, rng, t));
  }
  return out;
}

}  // namespace cdp

#endif  // CDP_DCSBM_HPP_
