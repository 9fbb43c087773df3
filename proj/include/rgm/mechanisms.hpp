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
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rgm/accountant.hpp"
#include "rgm/errors.hpp"
#include "rgm/rng.hpp"

namespace rgm {

/// A query output R(x) in R^d.
using ReleaseVector = Eigen::VectorXd;

namespace detail {

inline void AddIsotropicNoise(ReleaseVector& value, double variance,
                              SeededRng& rng) {
  const double scale = std::sqrt(variance);
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    value[i] += scale * rng.StandardNormal();
  }
}

}  // namespace detail

/// value + N(0, sigma2 I_d). Draws exactly d standard normals in coordinate
/// order, even when sigma2 == 0.
inline ReleaseVector GaussianMechanism(ReleaseVector value, double sigma2,
                                       SeededRng& rng) {
  detail::Require(sigma2 >= 0, "sigma2 >= 0", {{"sigma2", sigma2}});
  detail::AddIsotropicNoise(value, sigma2, rng);
  return value;
}

/// value + N(0, (gamma ||value||^2 + sigma2) I_d). Same draw order as
/// GaussianMechanism, so gamma == 0 reproduces it bit for bit.
inline ReleaseVector RelativeGaussianMechanism(ReleaseVector value,
                                               const RgmNoise& noise,
                                               SeededRng& rng) {
  detail::Require(noise.gamma >= 0, "gamma >= 0", {{"gamma", noise.gamma}});
  detail::Require(noise.sigma2 >= 0, "sigma2 >= 0", {{"sigma2", noise.sigma2}});
  const double variance = noise.gamma * value.squaredNorm() + noise.sigma2;
  detail::AddIsotropicNoise(value, variance, rng);
  return value;
}

inline double LaplaceSample(double scale, SeededRng& rng) {
  detail::Require(scale > 0, "scale > 0", {{"scale", scale}});
  return rng.Laplace(scale);
}

/// Rescales value onto the ball of radius threshold if it lies outside.
inline ReleaseVector ClipToNorm(ReleaseVector value, double threshold) {
  detail::Require(threshold > 0, "threshold > 0", {{"threshold", threshold}});
  const double norm = value.norm();
  if (norm > threshold) value *= threshold / norm;
  return value;
}

}  // namespace rgm
