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

#ifndef CDP_GRAPH_CORE_HPP_
#define CDP_GRAPH_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cdp/core.hpp"

namespace cdp {

/**
 * One symmetric, nonnegative weighted adjacency matrix of a dynamic network.
 *
 * An edge between i and j is present iff weights()(i, j) > 0. Diagonal
 * entries are accepted as given (self-loops). The time index is 1-based.
 */
class SnapshotMatrix {
 public:
  explicit SnapshotMatrix(Matrix weights, int t = 1) : weights_(std::move(weights)), t_(t) {
    if (weights_.rows() != weights_.cols()) {
      throw InvalidArgument("snapshot matrix must be square, got " +
                                std::to_string(weights_.rows()) + "x" +
                                std::to_string(weights_.cols()),
                            t_);
    }
    if (weights_.rows() < 2) throw InvalidArgument("snapshot needs at least 2 vertices", t_);
    if (!weights_.allFinite()) throw InvalidWeight("snapshot has non-finite weights", t_);
    if ((weights_.array() < 0.0).any()) throw InvalidWeight("snapshot has negative weights", t_);
    const double scale = std::max(1.0, weights_.maxCoeff());
    if ((weights_ - weights_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw NotSymmetric("snapshot matrix is not symmetric", t_);
    }
  }

  const Matrix& weights() const noexcept { return weights_; }
  Index n() const noexcept { return weights_.rows(); }
  int t() const noexcept { return t_; }

  friend bool operator==(const SnapshotMatrix& a, const SnapshotMatrix& b) {
    return a.t_ == b.t_ && a.weights_.rows() == b.weights_.rows() && a.weights_ == b.weights_;
  }

 private:
  Matrix weights_;
  int t_;
};

struct DegreeSummary {
  Vector degrees;
  double avg_degree = 0.0;
  bool is_sparse = false;
};

/// Average-degree threshold below which a snapshot counts as sparse.
inline constexpr double kSparseDegreeThreshold = 5.0;

inline DegreeSummary degree_summary(const SnapshotMatrix& snapshot) {
  DegreeSummary s;
  s.degrees = snapshot.weights().rowwise().sum();
  s.avg_degree = s.degrees.mean();
  s.is_sparse = s.avg_degree < kSparseDegreeThreshold;
  return s;
}

/// Elementwise log10(W + 1).
inline Matrix log_transform(const Matrix& weights) {
  if ((weights.array() < 0.0).any()) throw InvalidWeight("log_transform: negative weight");
  return (weights.array() + 1.0).log10().matrix();
}

/// Divides by the largest entry so that the result lies in [0, 1].
inline Matrix max_scale(const Matrix& weights) {
  const double top = weights.size() ? weights.maxCoeff() : 0.0;
  if (!(top > 0.0)) throw EmptyGraph("max_scale: matrix has no positive entry");
  return weights / top;
}

/// tau = sum(W) / (4 n^2). For inputs in [0, 1] this lies in [0, 1/4].
inline double regularizer_tau(const Matrix& scaled) {
  const double n = static_cast<double>(scaled.rows());
  return scaled.sum() / (4.0 * n * n);
}

/**
 * The regularized degree-normalized representation of one snapshot, plus
 * the intermediate log-scaled matrix and regularizer it was built from.
 */
struct RepresentationMatrix {
  Matrix M;
  double tau = 0.0;
  Matrix scaled_W;
};

/**
 * Builds M = D_tau^{-1/2} (Wscaled + tau 11^T) D_tau^{-1/2}, where Wscaled is
 * the log-transformed, max-scaled weight matrix and D_tau holds the row sums
 * of the regularized matrix. Throws EmptyGraph for an edgeless snapshot.
 */
inline RepresentationMatrix representation_matrix(const SnapshotMatrix& snapshot) {
  RepresentationMatrix out;
  try {
    out.scaled_W = max_scale(log_transform(snapshot.weights()));
  } catch (Error& e) {
    e.set_time(snapshot.t());
    throw;
  }
  out.tau = regularizer_tau(out.scaled_W);

  // Every row sum of W_tau is at least n * tau > 0.
  Matrix w_tau = out.scaled_W.array() + out.tau;
  const Vector inv_sqrt_deg = w_tau.rowwise().sum().array().rsqrt();
  out.M = inv_sqrt_deg.asDiagonal() * w_tau * inv_sqrt_deg.asDiagonal();
  // Symmetrize away rounding so downstream symmetry checks are exact.
  out.M = 0.5 * (out.M + out.M.transpose()).eval();
  return out;
}

}  // namespace cdp

#endif  // CDP_GRAPH_CORE_HPP_
