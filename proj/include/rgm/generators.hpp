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
// Seeded synthetic data.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "rgm/errors.hpp"
#include "rgm/linalg.hpp"
#include "rgm/quadratic.hpp"
#include "rgm/rng.hpp"

namespace rgm {

enum class CovarianceKind { kIdentity, kDiagonal, kRandomSpd };

struct CovarianceSpec {
  CovarianceKind kind = CovarianceKind::kIdentity;
  std::vector<double> diagonal;  // kDiagonal
  double condition_number = 1;   // kRandomSpd
};

/// Columns X_i ~ N(feature_mean, Sigma); labels theta_true^T X_i + noise, or their
/// sign when binary_labels is set (ties map to +1).
struct GaussianSpec {
  int d = 1;
  std::int64_t n = 1;
  CovarianceSpec sigma;
  std::vector<double> theta_true;  // empty: all ones / sqrt(d)
  double label_noise = 0;          // standard deviation
  double feature_mean = 0;
  bool binary_labels = false;
  std::uint64_t seed = 0;
};

struct OrthogonalSpec {
  int d = 1;
  std::int64_t n = 1;
  std::vector<double> scales;  // empty: all ones
  std::uint64_t seed = 0;
};

/// f1 = a ||theta||^2 with a in [alpha_min, alpha_max] and
/// f2 = b ||theta - center||^2 with b in [beta_min, beta_max].
struct TwoQuadraticsSpec {
  double alpha_min = 1, alpha_max = 1;
  double beta_min = 1, beta_max = 1;
  std::vector<double> center;
  std::uint64_t seed = 0;
};

/// Materializes Sigma; the random SPD case uses a seeded Haar-like rotation
/// and log-spaced eigenvalues from 1 to condition_number.
inline Eigen::MatrixXd BuildCovariance(const CovarianceSpec& spec, int d,
                                       std::uint64_t seed) {
  detail::Require(d >= 1, "d >= 1", {{"d", static_cast<double>(d)}});
  switch (spec.kind) {
    case CovarianceKind::kIdentity:
      return Eigen::MatrixXd::Identity(d, d);
    case CovarianceKind::kDiagonal: {
      detail::Require(static_cast<int>(spec.diagonal.size()) == d,
                      "diagonal has d entries",
                      {{"entries", static_cast<double>(spec.diagonal.size())},
                       {"d", static_cast<double>(d)}});
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
      for (int i = 0; i < d; ++i) {
        detail::Require(spec.diagonal[i] > 0, "Sigma positive definite",
                        {{"diagonal", spec.diagonal[i]}});
        s(i, i) = spec.diagonal[i];
      }
      return s;
    }
    case CovarianceKind::kRandomSpd: {
      detail::Require(spec.condition_number >= 1, "condition_number >= 1",
                      {{"condition_number", spec.condition_number}});
      SeededRng rng(seed, DeriveStream("covariance", 0, 0));
      Eigen::MatrixXd g(d, d);
      for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = rng.StandardNormal();
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
      Eigen::VectorXd ev(d);
      for (int i = 0; i < d; ++i) {
        const double frac = d == 1 ? 0.0 : static_cast<double>(i) / (d - 1);
        ev[i] = std::pow(spec.condition_number, frac);
      }
      Eigen::MatrixXd s = q * ev.asDiagonal() * q.transpose();
      return 0.5 * (s + s.transpose());
    }
  }
  return {};
}

inline FeatureDataset GenGaussian(const GaussianSpec& spec) {
  detail::Require(spec.d >= 1 && spec.n >= 1, "d >= 1, n >= 1",
                  {{"d", static_cast<double>(spec.d)},
                   {"n", static_cast<double>(spec.n)}});
  const Eigen::MatrixXd sigma = BuildCovariance(spec.sigma, spec.d, spec.seed);
  linalg::RequireSpd(sigma, "Sigma");
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();

  Eigen::VectorXd theta(spec.d);
  if (spec.theta_true.empty()) {
    theta.setConstant(1 / std::sqrt(static_cast<double>(spec.d)));
  } else {
    detail::Require(static_cast<int>(spec.theta_true.size()) == spec.d,
                    "theta_true has d entries");
    for (int i = 0; i < spec.d; ++i) theta[i] = spec.theta_true[i];
  }

  SeededRng rng(spec.seed, DeriveStream("gen-gaussian", 0, 0));
  FeatureDataset data;
  data.x.resize(spec.d, spec.n);
  data.y.resize(spec.n);
  Eigen::VectorXd z(spec.d);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (int k = 0; k < spec.d; ++k) z[k] = rng.StandardNormal();
    data.x.col(i) = l * z;
    data.x.col(i).array() += spec.feature_mean;
    double label = theta.dot(data.x.col(i));
    label += spec.label_noise * rng.StandardNormal();
    data.y[i] = spec.binary_labels ? (label >= 0 ? 1.0 : -1.0) : label;
  }
  return data;
}

/// Scaled canonical basis vectors, each direction repeated n/d times in a
/// seeded order; labels are seeded signs.
inline FeatureDataset GenOrthogonal(const OrthogonalSpec& spec) {
  detail::Require(spec.d >= 1 && spec.n >= 1, "d >= 1, n >= 1");
  detail::Require(spec.n % spec.d == 0, "n divisible by d",
                  {{"n", static_cast<double>(spec.n)},
                   {"d", static_cast<double>(spec.d)}});
  std::vector<double> scales = spec.scales;
  if (scales.empty()) scales.assign(spec.d, 1.0);
  detail::Require(static_cast<int>(scales.size()) == spec.d,
                  "scales has d entries");
  for (double s : scales) detail::Require(s > 0, "scales > 0", {{"scale", s}});

  std::vector<int> direction(static_cast<std::size_t>(spec.n));
  for (std::size_t i = 0; i < direction.size(); ++i)
    direction[i] = static_cast<int>(i % static_cast<std::size_t>(spec.d));
  SeededRng rng(spec.seed, DeriveStream("gen-orthogonal", 0, 0));
  Shuffle(direction.begin(), direction.end(), rng);

  FeatureDataset data;
  data.x = Eigen::MatrixXd::Zero(spec.d, spec.n);
  data.y.resize(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const int k = direction[static_cast<std::size_t>(i)];
    data.x(k, i) = scales[k];
    data.y[i] = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  }
  return data;
}

struct TwoQuadratics {
  QuadraticModel first;   // grad = 2 a theta
  QuadraticModel second;  // grad = 2 b (theta - center)
  double a = 0, b = 0;
  /// Local relative-sensitivity constants as min/max ratios (R_rel = 0).
  double eta_first = 0, eta_second = 0;
  /// Worst-case constants (max - min) / min for the same ranges.
  double eta_first_worst = 0, eta_second_worst = 0;
  double r_rel = 0;
};

inline TwoQuadratics GenTwoQuadratics(const TwoQuadraticsSpec& spec) {
  detail::Require(spec.alpha_min > 0 && spec.alpha_max >= spec.alpha_min &&
                      spec.beta_min > 0 && spec.beta_max >= spec.beta_min,
                  "0 < min <= max for both ranges");
  detail::Require(!spec.center.empty(), "center has d >= 1 entries");
  const auto d = static_cast<Eigen::Index>(spec.center.size());
  const Eigen::VectorXd center =
      Eigen::Map<const Eigen::VectorXd>(spec.center.data(), d);
  SeededRng rng(spec.seed, DeriveStream("gen-two-quadratics", 0, 0));
  TwoQuadratics out;
  out.a = spec.alpha_min + (spec.alpha_max - spec.alpha_min) * rng.Uniform();
  out.b = spec.beta_min + (spec.beta_max - spec.beta_min) * rng.Uniform();
  out.first.a = 2 * out.a * Eigen::MatrixXd::Identity(d, d);
  out.first.b = Eigen::VectorXd::Zero(d);
  out.first.n = 1;
  out.second.a = 2 * out.b * Eigen::MatrixXd::Identity(d, d);
  out.second.b = 2 * out.b * center;
  out.second.n = 1;
  out.eta_first = spec.alpha_min / spec.alpha_max;
  out.eta_second = spec.beta_min / spec.beta_max;
  out.eta_first_worst = (spec.alpha_max - spec.alpha_min) / spec.alpha_min;
  out.eta_second_worst = (spec.beta_max - spec.beta_min) / spec.beta_min;
  return out;
}

}  // namespace rgm
