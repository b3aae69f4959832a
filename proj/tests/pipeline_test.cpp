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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "cdp/dcsbm.hpp"
#include "cdp/pipeline.hpp"

namespace {

using cdp::Matrix;
using cdp::SnapshotMatrix;
using cdp::Vector;

std::vector<SnapshotMatrix> dcsbm_sequence(const cdp::DcsbmModel& model, int T, std::uint64_t seed) {
  cdp::Rng rng(seed);
  std::vector<SnapshotMatrix> out;
  for (int t = 1; t <= T; ++t) out.push_back(cdp::sample_snapshot(model, cdp::sample_theta(model, rng), rng, t));
  return out;
}

// Piecewise-constant block weights (self-loops included) give an M of exact
// rank 4, so the zero-residual rule fixes d = 3 for every seed. Noisy graphs
// let d vary with the per-instant seed.
SnapshotMatrix exact_blocks(int t = 1, const std::vector<long>& sizes = {8, 12, 16, 24}) {
  const double within[] = {5, 3, 7, 2};
  const long n = std::accumulate(sizes.begin(), sizes.end(), 0L);
  Matrix w = Matrix::Ones(n, n);
  long start = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    w.block(start, start, sizes[b], sizes[b]).setConstant(within[b % 4]);
    start += sizes[b];
  }
  return SnapshotMatrix(w, t);
}

TEST(NormalizeAndDetect, SingleOutlier) {
  Vector z = Vector::Zero(50);
  z(49) = 100.0;
  // mean 2, sample sd = sqrt((49 * 4 + 98^2) / 49) = sqrt(200)
  const double expected = (100.0 - 2.0) / std::sqrt(200.0);
  const cdp::Detection det = cdp::normalize_and_detect(z, 5.0);
  EXPECT_NEAR(det.zscores(49), expected, 1e-12);
  EXPECT_GT(expected, 5.0);
  ASSERT_EQ(det.detected.size(), 1U);
  EXPECT_EQ(det.detected[0], 49);
  EXPECT_FALSE(det.degenerate);
  EXPECT_NEAR(det.zscores.mean(), 0.0, 1e-12);
  const double sd = std::sqrt(det.zscores.squaredNorm() / 49.0);
  EXPECT_NEAR(sd, 1.0, 1e-12);
}

TEST(NormalizeAndDetect, ConstantIsDegenerate) {
  const cdp::Detection det = cdp::normalize_and_detect(Vector::Constant(10, 3.0), 5.0);
  EXPECT_TRUE(det.degenerate);
  EXPECT_TRUE(det.detected.empty());
}

TEST(NormalizeAndDetect, StrictThreshold) {
  Vector z = Vector::Zero(50);
  z(0) = 100.0;
  const cdp::Detection det = cdp::normalize_and_detect(z, 5.0);
  const double top = det.zscores.maxCoeff();
  EXPECT_TRUE(cdp::normalize_and_detect(z, top).detected.empty());
  EXPECT_EQ(cdp::normalize_and_detect(z, std::nextafter(top, 0.0)).detected.size(), 1U);
  EXPECT_TRUE(cdp::normalize_and_detect(z, top + 0.1).detected.empty());
}

TEST(RunCdp, IdenticalSnapshotsScoreZero) {
  const SnapshotMatrix base = exact_blocks();
  std::vector<SnapshotMatrix> seq;
  for (int t = 1; t <= 8; ++t) seq.emplace_back(base.weights(), t);
  cdp::CdpConfig config;
  config.window = 5;
  const cdp::ScoreSeries s = cdp::run_cdp(seq, config);
  ASSERT_EQ(s.scores.size(), 3U);
  for (int t = 6; t <= 8; ++t) {
    ASSERT_TRUE(s.scores.count(t));
    EXPECT_LT(s.scores.at(t).z.cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_FALSE(s.scores.count(5));
  for (const auto& [t, d] : s.dims) EXPECT_GE(d, 1);
  EXPECT_EQ(s.dims.size(), 8U);
}

TEST(RunCdp, WindowOneMatchesDefinition) {
  const auto seq = dcsbm_sequence(cdp::catalog("M1", 0.1), 2, 5);
  cdp::CdpConfig config;
  config.seed = 17;
  const cdp::ScoreSeries s = cdp::run_cdp(seq, config);
  ASSERT_EQ(s.scores.size(), 1U);
  const cdp::Embedding e1 = cdp::embed_snapshot(seq[0], config);
  const cdp::Embedding e2 = cdp::embed_snapshot(seq[1], config);
  const cdp::ScoreVector ref = cdp::change_scores(e2, cdp::Embedding{cdp::pre_shape(e1.X).Xtilde, 1});
  EXPECT_EQ(s.scores.at(2).z, ref.z);
}

TEST(RunCdp, DetectionsFollowZscores) {
  const auto seq = dcsbm_sequence(cdp::catalog("M1", 0.1), 6, 8);
  cdp::CdpConfig config;
  config.window = 2;
  config.zscore_threshold = 1.0;
  const cdp::ScoreSeries s = cdp::run_cdp(seq, config);
  for (const auto& [t, zs] : s.zscores) {
    std::vector<cdp::Index> expected;
    for (cdp::Index i = 0; i < zs.size(); ++i)
      if (zs(i) > 1.0) expected.push_back(i);
    EXPECT_EQ(s.detections.at(t), expected);
  }
}

TEST(RunCdp, Deterministic) {
  const auto seq = dcsbm_sequence(cdp::catalog("M4", 0.2), 7, 9);  // noisy d is fine here
  cdp::CdpConfig config;
  config.window = 3;
  config.seed = 5;
  const cdp::ScoreSeries a = cdp::run_cdp(seq, config);
  const cdp::ScoreSeries b = cdp::run_cdp(seq, config);
  for (const auto& [t, sv] : a.scores) EXPECT_EQ(sv.z, b.scores.at(t).z);
  EXPECT_EQ(a.dims, b.dims);
}

TEST(RunCdp, PermutationEquivariant) {
  std::vector<SnapshotMatrix> seq;
  for (int t = 1; t <= 4; ++t) seq.push_back(exact_blocks(t, {8 + t, 12, 16 - t, 24}));
  const cdp::Index n = seq.front().n();
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(idx.begin(), idx.end(), rng);
  Matrix p = Matrix::Zero(n, n);
  for (cdp::Index i = 0; i < n; ++i) p(i, idx[static_cast<std::size_t>(i)]) = 1.0;
  std::vector<SnapshotMatrix> permuted;
  for (const auto& s : seq) permuted.emplace_back(p * s.weights() * p.transpose(), s.t());
  cdp::CdpConfig config;
  config.window = 2;
  config.norm_method = cdp::NormMethod::kDense;
  const cdp::ScoreSeries a = cdp::run_cdp(seq, config);
  const cdp::ScoreSeries b = cdp::run_cdp(permuted, config);
  for (const auto& [t, sv] : a.scores) {
    ASSERT_EQ(a.dims.at(t), b.dims.at(t));
    EXPECT_LT((p * sv.z - b.scores.at(t).z).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(RunCdp, GroupChangeRaisesChangedScores) {
  // Reduced-scale group change (n = 300).
  const cdp::ScenarioSpec spec = cdp::scenario("group-change", cdp::ChangePoint{21}, 30, 1.0 / 3.0);
  cdp::Rng rng(2024);
  const auto seq = cdp::generate_sequence(spec, rng).snapshots;
  cdp::CdpConfig config;
  config.window = 5;
  config.seed = 2024;
  // Only t = 16..21 matter for the scores at t = 21.
  const std::vector<SnapshotMatrix> tail(seq.begin() + 15, seq.begin() + 21);
  const cdp::ScoreSeries s = cdp::run_cdp(tail, config);
  const Vector& z = s.scores.at(21).z;
  const double changed = z.head(200).mean();
  const double unchanged = z.tail(100).mean();
  EXPECT_GT(changed, unchanged);
}

TEST(RunCdp, EmptySnapshotReportsTime) {
  auto seq = dcsbm_sequence(cdp::catalog("M1", 0.1), 4, 11);
  seq[2] = SnapshotMatrix(Matrix::Zero(seq[0].n(), seq[0].n()), 3);
  try {
    cdp::run_cdp(seq, cdp::CdpConfig{});
    FAIL() << "expected EmptyGraph";
  } catch (const cdp::EmptyGraph& e) {
    ASSERT_TRUE(e.time().has_value());
    EXPECT_EQ(*e.time(), 3);
  }
}

TEST(RunCdp, RejectsBadConfigurations) {
  const auto seq = dcsbm_sequence(cdp::catalog("M1", 0.1), 3, 12);
  cdp::CdpConfig config;
  config.window = 3;
  EXPECT_THROW(cdp::run_cdp(seq, config), cdp::InvalidArgument);
  config.window = 0;
  EXPECT_THROW(cdp::run_cdp(seq, config), cdp::InvalidArgument);
  config.window = 1;
  config.epsilon_rank = 0.0;
  EXPECT_THROW(cdp::run_cdp(seq, config), cdp::InvalidArgument);
}

TEST(Method, NamesRoundTrip) {
  for (cdp::Method m : {cdp::Method::kCdp, cdp::Method::kAct, cdp::Method::kActm}) {
    EXPECT_EQ(cdp::parse_method(cdp::method_name(m)), m);
  }
  EXPECT_THROW(cdp::parse_method("pca"), cdp::UnknownName);
}

}  // namespace
