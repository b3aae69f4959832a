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

#ifndef CDP_BASELINES_HPP_
#define CDP_BASELINES_HPP_

#include <span>
#include <vector>

#include "cdp/core.hpp"
#include "cdp/graph_core.hpp"
#include "cdp/procrustes.hpp"

namespace cdp {

// Activity-vector detectors: each snapshot is summarised by its principal
// eigenvector (eigenvector centrality) and compared against the window's
// dominant left singular subspace.

struct ActivityVector {
  Vector u;
  int t = 0;
};

struct ProfileVector {
  Vector r;
  Index basis_rank = 0;
};

/**
 * Unit principal eigenvector of the raw weight matrix, or of the log-scaled
 * matrix when `preprocess` is set. Sign is fixed so that sum(u) >= 0.
 */
inline ActivityVector activity(const SnapshotMatrix& snapshot, bool preprocess = false) {
  Matrix w = snapshot.weights();
  if (!(w.maxCoeff() > 0.0)) throw EmptyGraph("activity: snapshot has no edges", snapshot.t());
  if (preprocess) w = max_scale(log_transform(w));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w);
  if (solver.info() != Eigen::Success) throw Error("activity: eigensolver failed", snapshot.t());
  Vector u = solver.eigenvectors().col(w.rows() - 1);
  u.normalize();
  if (u.sum() < 0.0) u = -u;
  return ActivityVector{std::move(u), snapshot.t()};
}

namespace detail {

inline Matrix window_matrix(std::span<const ActivityVector> window) {
  if (window.empty()) throw InvalidArgument("activity window is empty");
  const Index n = window.front().u.size();
  Matrix m(n, static_cast<Index>(window.size()));
  for (std::size_t k = 0; k < window.size(); ++k) {
    if (window[k].u.size() != n) throw DimensionError("activity window: length mismatch");
    m.col(static_cast<Index>(k)) = window[k].u;
  }
  return m;
}

/// Left singular vectors of the window matrix with nonzero singular value.
inline Matrix window_basis(std::span<const ActivityVector> window) {
  const Matrix m = window_matrix(window);
  // A single unit column is its own left singular vector.
  if (m.cols() == 1) return m;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > 1e-10 * s(0)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace detail

/// Profile vector: the window's first left singular vector, signed toward u.
inline ProfileVector act_profile(std::span<const ActivityVector> window, const Vector& current) {
  Matrix basis = detail::window_basis(window);
  Vector r = basis.col(0);
  if (r.dot(current) < 0.0) r = -r;
  return ProfileVector{std::move(r), basis.cols()};
}

/// Profile vector: projection of u onto the whole window subspace.
inline ProfileVector actm_profile(std::span<const ActivityVector> window, const Vector& current) {
  const Matrix basis = detail::window_basis(window);
  Vector r = basis * (basis.transpose() * current);
  return ProfileVector{std::move(r), basis.cols()};
}

inline ScoreVector act_scores(std::span<const ActivityVector> window, const ActivityVector& current) {
  const ProfileVector p = act_profile(window, current.u);
  return ScoreVector{(p.r - current.u).cwiseAbs(), current.t};
}

inline ScoreVector actm_scores(std::span<const ActivityVector> window, const ActivityVector& current) {
  const ProfileVector p = actm_profile(window, current.u);
  return ScoreVector{(p.r - current.u).cwiseAbs(), current.t};
}

}  // namespace cdp

#endif  // CDP_BASELINES_HPP_
