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

#include <sstream>

#include <gtest/gtest.h>

#include "cdp/dcsbm.hpp"
#include "cdp/io.hpp"

namespace {

using cdp::Matrix;

std::vector<cdp::SnapshotMatrix> parse(const std::string& text, std::optional<cdp::Index> n = std::nullopt) {
  std::istringstream in(text);
  return cdp::parse_sequence(in, n);
}

TEST(ParseSequence, TwoSnapshots) {
  const auto seq = parse("1 0 1 9\n2 0 1 9\n");
  ASSERT_EQ(seq.size(), 2U);
  Matrix expected(2, 2);
  expected << 0, 9, 9, 0;
  EXPECT_EQ(seq[0].weights(), expected);
  EXPECT_EQ(seq[1].weights(), expected);
  EXPECT_EQ(seq[0].t(), 1);
  EXPECT_EQ(seq[1].t(), 2);
}

TEST(ParseSequence, DuplicatesAndConflicts) {
  EXPECT_EQ(parse("1 0 1 2\n1 0 1 2\n1 1 0 2\n").size(), 1U);
  EXPECT_THROW(parse("1 0 1 2\n1 1 0 3\n"), cdp::FormatError);
}

TEST(ParseSequence, MalformedLines) {
  EXPECT_THROW(parse("1 0 1 heavy\n"), cdp::FormatError);
  EXPECT_THROW(parse("1 0 1\n"), cdp::FormatError);
  EXPECT_THROW(parse("1 0 1 2 5\n"), cdp::FormatError);
  EXPECT_THROW(parse("0 0 1 2\n"), cdp::FormatError);
  EXPECT_THROW(parse("1 -1 1 2\n"), cdp::FormatError);
  EXPECT_THROW(parse("1 0 1 -2\n"), cdp::FormatError);
  EXPECT_THROW(parse("1 0 1 nan\n"), cdp::FormatError);
}

TEST(ParseSequence, CommentsBlankLinesAndVertexCount) {
  const auto seq = parse("# comment\n\n1 0 2 1.5\r\n   \n", 5);
  ASSERT_EQ(seq.size(), 1U);
  EXPECT_EQ(seq[0].n(), 5);
  EXPECT_EQ(seq[0].weights()(2, 0), 1.5);
  EXPECT_EQ(parse("1 0 3 1\n")[0].n(), 4);
  EXPECT_THROW(parse("1 0 3 1\n", 3), cdp::FormatError);
}

TEST(ParseSequence, HeaderFillsMissingInstants) {
  const auto seq = parse("# n=4 T=3\n1 0 1 1\n3 2 3 1\n");
  ASSERT_EQ(seq.size(), 3U);
  EXPECT_EQ(seq[0].n(), 4);
  EXPECT_EQ(seq[1].t(), 2);
  EXPECT_EQ(seq[1].weights(), Matrix::Zero(4, 4));
  EXPECT_THROW(parse("# T=2\n3 0 1 1\n"), cdp::FormatError);
}

TEST(WriteSequence, RoundTripIsExact) {
  const cdp::ScenarioSpec spec = cdp::scenario("fragment", cdp::ChangePoint{4}, 6, 0.05);
  cdp::Rng rng(3);
  auto seq = cdp::generate_sequence(spec, rng).snapshots;
  // Non-integer weights exercise the shortest round-trip formatting.
  Matrix w = seq[1].weights();
  w(0, 1) = w(1, 0) = 0.1 + 0.2;
  w(2, 3) = w(3, 2) = 1.0 / 3.0;
  seq[1] = cdp::SnapshotMatrix(w, 2);
  std::ostringstream out;
  cdp::write_sequence(out, seq);
  const auto back = parse(out.str());
  ASSERT_EQ(back.size(), seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) EXPECT_EQ(back[i], seq[i]);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(cdp::format_double(1.0), "1");
  EXPECT_EQ(cdp::format_double(0.5), "0.5");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(cdp::format_double(x)), x);
}

}  // namespace
