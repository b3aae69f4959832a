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

#ifndef CDP_SPECTRAL_HPP_
#define CDP_SPECTRAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "cdp/core.hpp"

namespace cdp {

/// Default threshold on the randomized residual test that selects d.
inline constexpr double kDefaultRankEpsilon = 0.005;

/// Relative cutoff below which singular values count as numerically zero.
inline constexpr double kRankTolerance = 1e-12;

/**
 * Spectrum of a symmetric matrix ordered by decreasing |eigenvalue|.
 *
 * singular_values are the absolute eigenvalues, eigenvalues keep their sign.
 * Only the first numerical_rank pairs are kept. Each column of vectors is
 * sign-fixed so that its first entry with magnitude above 1e-12 is
 * nonnegative.
 */
struct SpectrumResult {
  Vector singular_values;
  Vector eigenvalues;
  Matrix vectors;
  Index numerical_rank = 0;
};

namespace detail {

inline void fix_column_signs(Matrix& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double v = vectors(i, j);
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
}

inline bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace detail

inline SpectrumResult symmetric_spectrum(const Matrix& m, double rank_tolerance = kRankTolerance) {
  if (!detail::is_symmetric(m, 1e-10)) throw NotSymmetric("symmetric_spectrum: input is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error("symmetric_spectrum: eigensolver failed");
  const Vector& evals = solver.eigenvalues();
  const Matrix& evecs = solver.eigenvectors();

  // Eigen returns ascending eigenvalues; reorder by decreasing magnitude. The
  // stable sort keeps the solver's order among exact ties.
  std::vector<Index> order(static_cast<std::size_t>(evals.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(evals(a)) > std::abs(evals(b)); });

  const double top = evals.size() ? std::abs(evals(order.front())) : 0.0;
  Index rank = 0;
  for (Index idx : order) {
    if (top > 0.0 && std::abs(evals(idx)) > rank_tolerance * top) ++rank;
  }

  SpectrumResult out;
  out.numerical_rank = rank;
  out.singular_values.resize(rank);
  out.eigenvalues.resize(rank);
  out.vectors.resize(m.rows(), rank);
  for (Index j = 0; j < rank; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.eigenvalues(j) = evals(src);
    out.singular_values(j) = std::abs(evals(src));
    out.vectors.col(j) = evecs.col(src);
  }
  detail::fix_column_signs(out.vectors);
  return out;
}

struct PowerIterationOptions {
  double tolerance = 1e-6;  // relative change between successive estimates
  int max_iterations = 1000;
};

/**
 * Spectral norm (largest |eigenvalue|) of a symmetric matrix by power
 * iteration from a seeded Gaussian start. Returns 0 for the zero matrix.
 */
inline double spectral_norm(const Matrix& m, std::uint64_t seed = 0,
                            const PowerIterationOptions& opts = {}) {
  const Index n = m.rows();
  if (n == 0) return 0.0;
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = standard_normal(rng);
  v.normalize();

  double estimate = 0.0;
  Vector y(n);
  for (int it = 0; it < opts.max_iterations; ++it) {
    y.noalias() = m * v;
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    v = y / norm;
    const bool done = it > 0 && std::abs(norm - estimate) <= opts.tolerance * norm;
    estimate = norm;
    if (done) break;
  }
  return estimate;
}

/// Spectral norm from a dense symmetric eigendecomposition (eigenvalues only).
inline double spectral_norm_dense(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/**
 * Flips the sign of every upper-triangle entry independently with
 * probability 1/2 and mirrors it, so the result stays symmetric and keeps
 * every magnitude. One engine bit is consumed per upper-triangle entry, in
 * column-major order.
 */
inline Matrix random_sign_flip(const Matrix& r, Rng& rng) {
  Matrix out = r;
  std::uint64_t bits = 0;
  int left = 0;
  for (Index j = 0; j < r.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) {
      if (left == 0) {
        bits = rng();
        left = 64;
      }
      const bool flip = bits & 1U;
      bits >>= 1;
      --left;
      if (flip) {
        out(i, j) = -r(i, j);
        out(j, i) = -r(j, i);
      }
    }
  }
  return out;
}

enum class NormMethod { kPowerIteration, kDense };

struct RankOptions {
  double epsilon = kDefaultRankEpsilon;
  std::uint64_t seed = 0;
  NormMethod norm_method = NormMethod::kPowerIteration;
  PowerIterationOptions power{};
};

/// Per-step record of the residual test, mostly for diagnostics and tests.
struct RankStep {
  int k = 0;
  double residual_frobenius = 0.0;
  double residual_spectral = 0.0;
  double flipped_spectral = 0.0;
  double rho = 0.0;
};

struct RankSelection {
  int d = 1;
  Index deflated_rank = 0;
  std::vector<RankStep> steps;
};

/// Residuals with Frobenius norm below this are treated as exactly zero.
inline constexpr double kZeroResidual = 1e-14;

/**
 * Randomized low-rank selection on an already-computed spectrum of M.
 *
 * The leading pair is deflated first (it is the near-constant direction of a
 * connected regularized graph). Then k grows while
 *   rho_k = | ||R_k||_2 - ||flip(R_k)||_2 | / ||R_k||_F
 * exceeds epsilon, R_k being the deflated matrix minus its rank-k
 * reconstruction. Returns d = k - 1 at exit, floored at 1.
 *
 * The deflated spectrum is the original spectrum without its first pair, so
 * no second decomposition is needed. ||R_k||_2 and ||R_k||_F come from that
 * spectrum; only the sign-flipped copy needs a norm computation.
 */
inline RankSelection select_rank(const Matrix& m, const SpectrumResult& spectrum,
                                 const RankOptions& opts = {}) {
  if (!(opts.epsilon > 0.0)) throw InvalidArgument("rank selection: epsilon must be positive");
  RankSelection out;
  if (spectrum.numerical_rank == 0) throw EmptyGraph("rank selection: matrix is zero");

  // Deflated spectrum: pairs 1..r-1 of the original (0-based), with its own
  // numerical rank relative to its leading singular value.
  const Index total = spectrum.numerical_rank;
  Index rank = 0;
  if (total > 1) {
    const double lead = spectrum.singular_values(1);
    for (Index j = 1; j < total; ++j) {
      if (spectrum.singular_values(j) > kRankTolerance * lead) ++rank;
    }
  }
  out.deflated_rank = rank;
  if (rank == 0) {
    // Only the constant direction carries structure.
    out.d = 1;
    return out;
  }

  auto deflated_sigma = [&](Index j) { return spectrum.singular_values(j + 1); };
  // Tail sums of squares so that ||R_k||_F = sqrt(tail[k]).
  std::vector<double> tail(static_cast<std::size_t>(rank) + 1, 0.0);
  for (Index j = rank - 1; j >= 0; --j) {
    tail[static_cast<std::size_t>(j)] =
        tail[static_cast<std::size_t>(j) + 1] + deflated_sigma(j) * deflated_sigma(j);
  }

  Matrix residual = m;
  auto subtract_pair = [&](Index original_index) {
    const double lambda = spectrum.eigenvalues(original_index);
    const auto u = spectrum.vectors.col(original_index);
    residual.noalias() -= lambda * (u * u.transpose());
  };
  subtract_pair(0);  // deflation

  int k = 1;
  double rho = std::numeric_limits<double>::infinity();
  while (rho > opts.epsilon && k <= rank) {
    subtract_pair(k);  // deflated pair k (1-based) is original pair k (0-based)
    RankStep step;
    step.k = k;
    step.residual_frobenius = std::sqrt(tail[static_cast<std::size_t>(k)]);
    if (step.residual_frobenius < kZeroResidual) {
      rho = 0.0;
    } else {
      step.residual_spectral = deflated_sigma(k);
      Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(k)));
      const Matrix flipped = random_sign_flip(residual, rng);
      step.flipped_spectral =
          opts.norm_method == NormMethod::kDense
              ? spectral_norm_dense(flipped)
              : spectral_norm(flipped, derive_seed(opts.seed, static_cast<std::uint64_t>(k), 1U),
                              opts.power);
      rho = std::abs(step.residual_spectral - step.flipped_spectral) / step.residual_frobenius;
    }
    step.rho = rho;
    out.steps.push_back(step);
    ++k;
  }
  out.d = std::max(1, std::min(k - 1, static_cast<int>(rank)));
  return out;
}

inline int estimate_rank_d(const Matrix& m, const RankOptions& opts = {}) {
  return select_rank(m, symmetric_spectrum(m), opts).d;
}

inline int estimate_rank_d(const Matrix& m, double epsilon, std::uint64_t seed = 0) {
  RankOptions opts;
  opts.epsilon = epsilon;
  opts.seed = seed;
  return estimate_rank_d(m, opts);
}

/// n x d spectral embedding of one snapshot. Columns are orthonormal.
struct Embedding {
  Matrix X;
  int t = 0;

  Index d() const noexcept { return X.cols(); }
  Index n() const noexcept { return X.rows(); }
};

/**
 * Embeds M as columns 2..d+1 of its spectrum, skipping the leading
 * near-constant vector, with d chosen by select_rank.
 */
inline Embedding embed(const Matrix& m, const RankOptions& opts = {}, int t = 0) {
  const SpectrumResult spectrum = symmetric_spectrum(m);
  const RankSelection sel = select_rank(m, spectrum, opts);
  const Index available = std::max<Index>(spectrum.numerical_rank - 1, 0);
  const Index d = std::min<Index>(sel.d, available);
  if (d < 1) {
    // Rank-one M: nothing beyond the constant direction. Fall back to the
    // solver's second eigenvector so the embedding keeps one coordinate.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    Matrix x = solver.eigenvectors().col(0);
    detail::fix_column_signs(x);
    return Embedding{std::move(x), t};
  }
  return Embedding{spectrum.vectors.middleCols(1, d), t};
}

inline Embedding embed(const Matrix& m, double epsilon, std::uint64_t seed = 0, int t = 0) {
  RankOptions opts;
  opts.epsilon = epsilon;
  opts.seed = seed;
  return embed(m, opts, t);
}

}  // namespace cdp

#endif  // CDP_SPECTRAL_HPP_
