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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "rgm/rgm.hpp"

namespace rgm {
namespace {

struct Moments {
  double mean = 0;
  double var = 0;
  std::size_t n = 0;
  // Standard errors for a Gaussian sample.
  double mean_se() const { return std::sqrt(var / static_cast<double>(n)); }
  double var_se() const { return var * std::sqrt(2.0 / static_cast<double>(n - 1)); }
};

Moments Summarize(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(m.n - 1);
  return m;
}

TEST(SeededRng, DeterministicPerSeedAndStream) {
  SeededRng a(42, 7), b(42, 7), c(42, 8), e(43, 7);
  bool differs_stream = false, differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.NextU64();
    EXPECT_EQ(va, b.NextU64());
    differs_stream |= va != c.NextU64();
    differs_seed |= va != e.NextU64();
  }
  EXPECT_TRUE(differs_stream);
  EXPECT_TRUE(differs_seed);
}

TEST(SeededRng, StreamDerivationIsStableAndSeparating) {
  EXPECT_EQ(DeriveStream("node", 1, 2), DeriveStream("node", 1, 2));
  EXPECT_NE(DeriveStream("node", 1, 2), DeriveStream("node", 2, 1));
  EXPECT_NE(DeriveStream("node", 1, 2), DeriveStream("ptr", 1, 2));
}

TEST(SeededRng, DistinctStreamsUncorrelated) {
  SeededRng a(1, DeriveStream("x", 0, 0)), b(1, DeriveStream("x", 1, 0));
  const int n = 100000;
  double sxy = 0;
  for (int i = 0; i < n; ++i) sxy += a.StandardNormal() * b.StandardNormal();
  EXPECT_LT(std::abs(sxy / n), 4 / std::sqrt(static_cast<double>(n)));
}

TEST(GaussianMechanism, ZeroVarianceIsIdentity) {
  SeededRng rng(1);
  const ReleaseVector v = ReleaseVector::LinSpaced(5, -2, 2);
  EXPECT_EQ(GaussianMechanism(v, 0, rng), v);
}

TEST(GaussianMechanism, Moments) {
  SeededRng rng(2);
  ReleaseVector v(1);
  v << 1.5;
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(GaussianMechanism(v, 4, rng)[0]);
  const auto m = Summarize(xs);
  EXPECT_LT(std::abs(m.mean - 1.5), 3 * 2 / std::sqrt(1e5));
  EXPECT_LT(std::abs(m.var - 4), 3 * 4 * std::sqrt(2.0 / (1e5 - 1)));
}

TEST(GaussianMechanism, ReplayIsIdentical) {
  const ReleaseVector v = ReleaseVector::Ones(4);
  SeededRng a(9, 3), b(9, 3);
  EXPECT_EQ(GaussianMechanism(v, 2, a), GaussianMechanism(v, 2, b));
}

TEST(GaussianMechanism, NegativeVariance) {
  SeededRng rng(1);
  EXPECT_THROW(GaussianMechanism(ReleaseVector::Ones(2), -1, rng), DomainError);
}

TEST(RelativeGaussianMechanism, GammaZeroBitwiseEqualsGaussian) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SeededRng a(seed, 5), b(seed, 5);
    const ReleaseVector v = ReleaseVector::LinSpaced(6, -1, 3) * static_cast<double>(seed);
    const ReleaseVector g = GaussianMechanism(v, 0.7, a);
    const ReleaseVector r = RelativeGaussianMechanism(v, {0, 0.7}, b);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      EXPECT_EQ(std::memcmp(&g[i], &r[i], sizeof(double)), 0);
    }
  }
}

TEST(RelativeGaussianMechanism, ZeroValueHasBaselineVariance) {
  SeededRng rng(4);
  std::vector<double> xs;
  const ReleaseVector zero = ReleaseVector::Zero(3);
  for (int i = 0; i < 100000; ++i) {
    const auto out = RelativeGaussianMechanism(zero, {5.0, 0.25}, rng);
    xs.push_back(out[i % 3]);
  }
  const auto m = Summarize(xs);
  EXPECT_LT(std::abs(m.var - 0.25), 3 * m.var_se());
}

TEST(RelativeGaussianMechanism, OutputDependentVariance) {
  SeededRng rng(6);
  ReleaseVector v(2);
  v << 3, 0;  // ||v||^2 = 9
  std::vector<double> xs0, xs1;
  for (int i = 0; i < 100000; ++i) {
    const auto out = RelativeGaussianMechanism(v, {1.0, 0}, rng);
    xs0.push_back(out[0] - v[0]);
    xs1.push_back(out[1] - v[1]);
  }
  for (const auto& xs : {xs0, xs1}) {
    const auto m = Summarize(xs);
    EXPECT_LT(std::abs(m.var - 9), 3 * 9 * std::sqrt(2.0 / (1e5 - 1)));
  }
}

TEST(RelativeGaussianMechanism, VarianceGrid) {
  ReleaseVector v(3);
  v << 1, -2, 0.5;
  for (double gamma : {0.0, 0.1, 2.0}) {
    for (double sigma2 : {0.0, 0.5, 3.0}) {
      if (gamma == 0 && sigma2 == 0) continue;
      SeededRng rng(13, DeriveStream("grid", static_cast<std::uint64_t>(gamma * 10),
                                     static_cast<std::uint64_t>(sigma2 * 10)));
      const double want = gamma * v.squaredNorm() + sigma2;
      std::vector<std::vector<double>> cols(3);
      for (int i = 0; i < 100000; ++i) {
        const auto out = RelativeGaussianMechanism(v, {gamma, sigma2}, rng);
        for (int k = 0; k < 3; ++k) cols[k].push_back(out[k] - v[k]);
      }
      for (int k = 0; k < 3; ++k) {
        const auto m = Summarize(cols[k]);
        const double se = want * std::sqrt(2.0 / (1e5 - 1));
        EXPECT_LT(std::abs(m.var - want), 3 * se)
            << "gamma=" << gamma << " sigma2=" << sigma2 << " coord=" << k;
      }
    }
  }
}

TEST(LaplaceSample, MeanAndTail) {
  SeededRng rng(21);
  const int n = 1000000;
  double sum = 0;
  const double delta = 0.01;
  const double cut = std::log(1 / delta);
  int tail = 0;
  for (int i = 0; i < n; ++i) {
    const double x = LaplaceSample(1.0, rng);
    sum += x;
    tail += std::abs(x) > cut;
  }
  EXPECT_LT(std::abs(sum / n), 3 * std::sqrt(2.0) / 1e3);
  const double p = static_cast<double>(tail) / n;
  EXPECT_LT(std::abs(p - delta), 3 * std::sqrt(delta * (1 - delta) / n));
}

TEST(LaplaceSample, ScaleAndDeterminism) {
  SeededRng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(LaplaceSample(2.5, a), LaplaceSample(2.5, b));
  EXPECT_THROW(LaplaceSample(0, a), DomainError);
  EXPECT_THROW(LaplaceSample(-1, a), DomainError);
}

TEST(ClipToNorm, Examples) {
  ReleaseVector v(2);
  v << 3, 4;
  const auto c = ClipToNorm(v, 1);
  EXPECT_NEAR(c[0], 0.6, 1e-15);
  EXPECT_NEAR(c[1], 0.8, 1e-15);
  EXPECT_EQ(ClipToNorm(v, 5), v);
  EXPECT_EQ(ClipToNorm(v, 10), v);
  EXPECT_THROW(ClipToNorm(v, 0), DomainError);
}

TEST(ClipToNorm, IdempotentNonExpandingLipschitz) {
  SeededRng rng(8);
  for (int k = 0; k < 1000; ++k) {
    ReleaseVector v(4);
    for (int i = 0; i < 4; ++i) v[i] = 5 * rng.StandardNormal();
    const double c = 0.01 + 5 * rng.Uniform();
    const auto once = ClipToNorm(v, c);
    EXPECT_LE(once.norm(), c * (1 + 1e-15));
    EXPECT_LE(once.norm(), v.norm() * (1 + 1e-15));
    EXPECT_LT((ClipToNorm(once, c) - once).norm(), 1e-14 * (1 + c));
    if (v.norm() > 0) {
      EXPECT_GT(once.dot(v), 0);
    }
    const double c2 = c + 0.3 * rng.Uniform();
    EXPECT_LE((ClipToNorm(v, c2) - once).norm(), (c2 - c) * (1 + 1e-12));
  }
}

}  // namespace
}  // namespace rgm
