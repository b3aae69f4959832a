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

#ifndef CDP_CORE_HPP_
#define CDP_CORE_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Engine used by every stochastic stage. State is always passed explicitly.
using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/**
 * Base class of all library errors. Carries an optional 1-based time index
 * so that pipeline failures can name the offending snapshot.
 */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::optional<int> time = std::nullopt)
      : std::runtime_error(what), time_(time) {}

  std::optional<int> time() const noexcept { return time_; }
  void set_time(int t) noexcept { time_ = t; }

 private:
  std::optional<int> time_;
};

#define CDP_DEFINE_ERROR(Name)      \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

CDP_DEFINE_ERROR(InvalidWeight);
CDP_DEFINE_ERROR(EmptyGraph);
CDP_DEFINE_ERROR(NotSymmetric);
CDP_DEFINE_ERROR(DegenerateShape);
CDP_DEFINE_ERROR(DimensionError);
CDP_DEFINE_ERROR(InvalidShape);
CDP_DEFINE_ERROR(InvalidProbability);
CDP_DEFINE_ERROR(EmptyPartition);
CDP_DEFINE_ERROR(UndefinedTest);
CDP_DEFINE_ERROR(FormatError);
CDP_DEFINE_ERROR(UnknownName);
CDP_DEFINE_ERROR(InvalidArgument);

#undef CDP_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Seeding and portable draws
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a tag path.
template <typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t base, Tags... tags) noexcept {
  std::uint64_t s = mix64(base);
  ((s = mix64(s ^ static_cast<std::uint64_t>(tags))), ...);
  return s;
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on uniform01 draws (portable across stdlibs).
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Uniform integer in [0, n) by rejection on the engine's 64-bit output.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace cdp

#endif  // CDP_CORE_HPP_
