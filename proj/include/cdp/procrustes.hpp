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

#ifndef CDP_PROCRUSTES_HPP_
#define CDP_PROCRUSTES_HPP_

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cdp/core.hpp"
#include "cdp/spectral.hpp"

namespace cdp {

/// Column-centered, unit-Frobenius-norm copy of a configuration matrix.
struct PreShape {
  Matrix Xtilde;
};

inline PreShape pre_shape(const Matrix& x) {
  Matrix centered = x.rowwise() - x.colwise().mean();
  const double norm = centered.norm();
  if (!(norm >= 1e-14)) throw DegenerateShape("pre_shape: centered matrix is zero");
  return PreShape{centered / norm};
}

/**
 * Orthogonal Gamma minimizing ||Xtilde * Gamma - mu||_F: with
 * mu^T Xtilde = U S V^T, Gamma = V U^T.
 */
inline Matrix optimal_rotation(const Matrix& mu, const Matrix& xtilde) {
  if (mu.rows() != xtilde.rows() || mu.cols() != xtilde.cols()) {
    throw DimensionError("optimal_rotation: shapes differ");
  }
  const Matrix cross = mu.transpose() * xtilde;
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().transpose();
}

struct GpaOptions {
  double threshold = 1e-10;
  int max_iterations = 100;
};

struct AlignmentResult {
  Matrix mean;
  std::vector<Matrix> aligned;
  std::vector<Matrix> rotations;
  int iterations = 0;
  double final_D = 0.0;
  bool converged = false;
  /// sum_i ||aligned_i - mean||_F^2 after each pass.
  std::vector<double> objective;
};

/**
 * Generalized orthogonal Procrustes alignment.
 *
 * mu0 starts as the raw first matrix. Each pass rotates every pre-shape onto
 * mu0, averages the rotated copies into the new mean, and stops once
 * ||mu0 - mean||_F^2 <= threshold or after max_iterations passes (then
 * converged is false).
 */
inline AlignmentResult gpa_align(std::span<const Matrix> matrices, const GpaOptions& opts = {}) {
  const std::size_t w = matrices.size();
  if (w < 2) throw InvalidArgument("gpa_align: needs at least two matrices");
  for (const Matrix& m : matrices) {
    if (m.rows() != matrices[0].rows() || m.cols() != matrices[0].cols()) {
      throw DimensionError("gpa_align: matrices differ in shape");
    }
  }

  std::vector<Matrix> shapes;
  shapes.reserve(w);
  for (const Matrix& m : matrices) shapes.push_back(pre_shape(m).Xtilde);

  AlignmentResult out;
  out.aligned.resize(w);
  out.rotations.resize(w);
  Matrix mu0 = matrices[0];
  double D = std::numeric_limits<double>::infinity();
  while (D > opts.threshold && out.iterations < opts.max_iterations) {
    Matrix mean = Matrix::Zero(mu0.rows(), mu0.cols());
    for (std::size_t i = 0; i < w; ++i) {
      out.rotations[i] = optimal_rotation(mu0, shapes[i]);
      out.aligned[i] = shapes[i] * out.rotations[i];
      mean += out.aligned[i];
    }
    mean /= static_cast<double>(w);
    D = (mu0 - mean).squaredNorm();
    mu0 = std::move(mean);
    ++out.iterations;

    double objective = 0.0;
    for (const Matrix& a : out.aligned) objective += (a - mu0).squaredNorm();
    out.objective.push_back(objective);
  }
  out.mean = std::move(mu0);
  out.final_D = D;
  out.converged = D <= opts.threshold;
  return out;
}

inline AlignmentResult gpa_align(const std::vector<Matrix>& matrices, const GpaOptions& opts = {}) {
  return gpa_align(std::span<const Matrix>(matrices), opts);
}

/// Appends zero columns up to d_max. Truncation is not supported.
inline Matrix pad_to_dim(const Matrix& x, Index d_max) {
  if (x.cols() > d_max) {
    throw DimensionError("pad_to_dim: embedding has " + std::to_string(x.cols()) +
                         " columns, more than d_max=" + std::to_string(d_max));
  }
  Matrix out = Matrix::Zero(x.rows(), d_max);
  out.leftCols(x.cols()) = x;
  return out;
}

/**
 * Profile (mean) embedding of a window of past embeddings. Members are
 * zero-padded to the widest dimension and aligned by GPA. A single-member
 * window yields that member's pre-shape.
 */
inline Embedding profile_embedding(std::span<const Embedding> window, const GpaOptions& opts = {}) {
  if (window.empty()) throw InvalidArgument("profile_embedding: empty window");
  const Index n = window.front().n();
  Index d_max = 0;
  for (const Embedding& e : window) {
    if (e.n() != n) throw DimensionError("profile_embedding: embeddings differ in vertex count");
    d_max = std::max(d_max, e.d());
  }
  const int t = window.back().t;
  if (window.size() == 1) return Embedding{pre_shape(window.front().X).Xtilde, t};

  std::vector<Matrix> padded;
  padded.reserve(window.size());
  for (const Embedding& e : window) padded.push_back(pad_to_dim(e.X, d_max));
  return Embedding{gpa_align(padded, opts).mean, t};
}

struct ScoreVector {
  Vector z;
  int t = 0;
};

/**
 * Per-vertex change scores between the current embedding and a profile:
 * both are padded to a common width and aligned as a pair, then
 *   z_i = ||current_hat_i - profile_hat_i||^2 / ||mean||_F.
 */
inline ScoreVector change_scores(const Embedding& current, const Embedding& profile,
                                 const GpaOptions& opts = {}) {
  if (current.n() != profile.n()) throw DimensionError("change_scores: vertex counts differ");
  const Index d_max = std::max(current.d(), profile.d());
  const std::vector<Matrix> pair{pad_to_dim(current.X, d_max), pad_to_dim(profile.X, d_max)};
  const AlignmentResult fit = gpa_align(pair, opts);
  const double scale = fit.mean.norm();
  ScoreVector out;
  out.t = current.t;
  out.z = (fit.aligned[0] - fit.aligned[1]).rowwise().squaredNorm() / scale;
  return out;
}

}  // namespace cdp

#endif  // CDP_PROCRUSTES_HPP_
