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
// Ridge-regression objectives
//
//   f(theta) = 1/n sum_i 1/2 (X_i^T theta - y_i)^2 + mu_reg/2 ||theta||^2
//
// stored through their quadratic form: grad f(theta) = A theta - b with
// A = X X^T / n + mu_reg I and b = X y / n.
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rgm/errors.hpp"
#include "rgm/linalg.hpp"

namespace rgm {

/// Dense features, one record per column of x (d x n), labels in y.
struct FeatureDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  Eigen::Index dim() const { return x.rows(); }
  Eigen::Index size() const { return x.cols(); }

  void Validate() const {
    detail::Require(x.rows() >= 1 && x.cols() >= 1, "n >= 1 and d >= 1",
                    {{"d", static_cast<double>(x.rows())},
                     {"n", static_cast<double>(x.cols())}});
    detail::Require(y.size() == x.cols(), "labels match records",
                    {{"n", static_cast<double>(x.cols())},
                     {"labels", static_cast<double>(y.size())}});
    detail::Require(x.allFinite() && y.allFinite(), "finite entries");
  }
};

struct QuadraticModel {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double mu_reg = 0;
  Eigen::Index n = 0;

  Eigen::Index dim() const { return b.size(); }

  Eigen::VectorXd Gradient(const Eigen::VectorXd& theta) const {
    return a * theta - b;
  }

  /// f(theta) without the constant ||y||^2 / (2n).
  double Objective(const Eigen::VectorXd& theta) const {
    return 0.5 * theta.dot(a * theta) - b.dot(theta);
  }

  /// f(theta) - f(theta_star) for any minimizer theta_star.
  double Gap(const Eigen::VectorXd& theta,
             const Eigen::VectorXd& theta_star) const {
    const Eigen::VectorXd e = theta - theta_star;
    return 0.5 * e.dot(a * e);
  }

  /// A^-1 b via Cholesky; minimum-norm least squares when A is singular.
  Eigen::VectorXd Minimizer() const {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt.solve(b);
    return a.completeOrthogonalDecomposition().solve(b);
  }
};

inline QuadraticModel BuildQuadratic(const FeatureDataset& data,
                                     double mu_reg) {
  data.Validate();
  detail::Require(mu_reg >= 0, "mu_reg >= 0", {{"mu_reg", mu_reg}});
  const auto n = data.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  QuadraticModel m;
  m.a = inv_n * (data.x * data.x.transpose());
  m.a.diagonal().array() += mu_reg;
  m.b = inv_n * (data.x * data.y);
  m.mu_reg = mu_reg;
  m.n = n;
  return m;
}

/// Gradient of the j-th record's loss, X_j (X_j^T theta - y_j) + mu_reg theta.
inline Eigen::VectorXd PerSampleGradient(const FeatureDataset& data,
                                         double mu_reg, Eigen::Index j,
                                         const Eigen::VectorXd& theta) {
  const auto xj = data.x.col(j);
  return xj * (xj.dot(theta) - data.y[j]) + mu_reg * theta;
}

/// ||x0||^2 x0^T A^-2 x0, the squared operator norm of (x0 x0^T) A^-1.
/// Two SPD solves; A is never inverted.
inline double RelativeTerm(const Eigen::VectorXd& x0, const Eigen::MatrixXd& a) {
  detail::Require(a.rows() == x0.size() && a.cols() == x0.size(),
                  "dim(A) == dim(x0)",
                  {{"dim_a", static_cast<double>(a.rows())},
                   {"dim_x0", static_cast<double>(x0.size())}});
  const auto llt = linalg::SpdFactor(a);
  const Eigen::VectorXd w = llt.solve(x0);  // A^-1 x0
  return x0.squaredNorm() * w.squaredNorm();
}

}  // namespace rgm
