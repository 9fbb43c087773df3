// Copyright 2026 The RGM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Reproducible random streams.
//
// Sample sequences are pinned across platforms and standard libraries:
//   * the engine is std::mt19937_64, whose output sequence is fixed by the
//     C++ standard, seeded with splitmix64(seed ^ splitmix64(stream));
//   * uniforms take the top 53 bits of one engine word, mapped to (0, 1);
//   * standard normals use the basic Box-Muller cosine branch, consuming
//     exactly two uniforms per draw (no caching);
//   * Laplace draws use the inverse CDF of one uniform.
// std::normal_distribution is deliberately not used because its output is
// implementation-defined. Changing any of the above changes every
// experiment trajectory.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace rgm {

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream id for (module tag, node id, iteration index). FNV-1a over the tag,
/// then splitmix-chained with the two indices.
constexpr std::uint64_t DeriveStream(std::string_view tag, std::uint64_t node,
                                     std::uint64_t iteration) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  h = SplitMix64(h ^ SplitMix64(node + 0x51ed27ULL));
  return SplitMix64(h ^ SplitMix64(iteration + 0xa0761d6478bd642fULL));
}

class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed),
        stream_(stream),
        engine_(SplitMix64(seed ^ SplitMix64(stream))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent generator sharing this seed on another stream.
  SeededRng Fork(std::uint64_t stream) const { return SeededRng(seed_, stream); }

  std::uint64_t NextU64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double Uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double StandardNormal() {
    const double u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Centered Laplace with the given scale.
  double Laplace(double scale) {
    const double u = Uniform() - 0.5;
    const double mag = -std::log1p(-2.0 * std::abs(u));
    return u < 0 ? -scale * mag : scale * mag;
  }

  /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t UniformIndex(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by SeededRng (std::shuffle is not portable).
template <typename It>
void Shuffle(It first, It last, SeededRng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = rng.UniformIndex(i);
    std::iter_swap(first + (i - 1), first + j);
  }
}

}  // namespace rgm
