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

#include "rgm/errors.hpp"

namespace rgm::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cholesky factor of an SPD matrix; throws SingularityError when the
/// factorization fails or the pivots span more than ~15 decades.
inline Eigen::LLT<Matrix> SpdFactor(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("symmetric positive-definite matrix",
                           {{"dim", static_cast<double>(a.rows())}});
  }
  const Vector pivots = Matrix(llt.matrixL()).diagonal();
  const double lo = pivots.minCoeff(), hi = pivots.maxCoeff();
  if (!(lo > 0) || (lo / hi) * (lo / hi) < 1e-15) {
    throw SingularityError("well-conditioned SPD matrix",
                           {{"min_pivot", lo}, {"max_pivot", hi}});
  }
  return llt;
}

inline Vector SpdSolve(const Matrix& a, const Vector& rhs) {
  return SpdFactor(a).solve(rhs);
}

inline Eigen::SelfAdjointEigenSolver<Matrix> SymmetricEigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw SingularityError("convergent symmetric eigendecomposition");
  }
  return es;
}

inline double LambdaMax(const Matrix& a) {
  return SymmetricEigen(a).eigenvalues().maxCoeff();
}

inline double LambdaMin(const Matrix& a) {
  return SymmetricEigen(a).eigenvalues().minCoeff();
}

/// lambda_max / lambda_min of an SPD matrix.
inline double ConditionNumber(const Matrix& a) {
  const auto ev = SymmetricEigen(a).eigenvalues();
  if (!(ev.minCoeff() > 0)) {
    throw SingularityError("lambda_min > 0", {{"lambda_min", ev.minCoeff()}});
  }
  return ev.maxCoeff() / ev.minCoeff();
}

inline void RequireSpd(const Matrix& c, const char* what) {
  detail::Require(c.rows() == c.cols() && c.rows() > 0, "square matrix",
                  {{"rows", static_cast<double>(c.rows())},
                   {"cols", static_cast<double>(c.cols())}});
  const double asym = (c - c.transpose()).norm();
  detail::Require(asym <= 1e-12 * std::max(1.0, c.norm()),
                  "symmetric matrix", {{"asymmetry", asym}});
  const auto ev = SymmetricEigen(c).eigenvalues();
  if (!(ev.minCoeff() > 0)) {
    throw DomainError(std::string(what) + " positive definite",
                      {{"lambda_min", ev.minCoeff()}});
  }
}

}  // namespace rgm::linalg
