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
// Enforcing and certifying relative L2 sensitivity of ridge-regression
// gradients.
//
// Pipeline:
//   1. clip every feature vector into the set defined by (C, R_c);
//   2. build the clipped quadratic A~ = X~ X~^T / n + mu_reg I;
//   3. privately test A~ >= rho C with Propose-Test-Release, where the
//      stability margin is lower-bounded by the number of largest scores
//      X~_i^T (A~ - rho C)^-1 X~_i needed to sum to n;
//   4. on acceptance the gradients satisfy relative sensitivity with
//      eta^2 = 6 kappa R_c^4 / (rho^2 n^2).
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "rgm/errors.hpp"
#include "rgm/linalg.hpp"
#include "rgm/mechanisms.hpp"
#include "rgm/quadratic.hpp"
#include "rgm/rng.hpp"

namespace rgm {

struct ClipShape {
  Eigen::MatrixXd c;
  double r_c = 0;
};

enum class ClipMode {
  kQuartic,    // ||x||^2 x^T C^-2 x <= R_c^4
  kEllipsoid,  // x^T C^-1 x <= R_c^2
};

inline const char* ToString(ClipMode mode) {
  return mode == ClipMode::kQuartic ? "quartic" : "ellipsoid";
}

/// Delta_+ value meaning "no removal set violates the test".
inline constexpr std::size_t kInfiniteMargin =
    std::numeric_limits<std::size_t>::max();

struct PtrOutcome {
  std::size_t delta_plus = 0;  // kInfiniteMargin when unbounded
  double noisy_delta = 0;
  double threshold = 0;  // -log(delta) / eps
  bool accepted = false;
  double eps = 0;
  double delta = 0;
};

namespace detail {

inline void CheckShape(const ClipShape& shape, Eigen::Index d) {
  Require(shape.r_c > 0 && std::isfinite(shape.r_c), "R_c > 0",
          {{"R_c", shape.r_c}});
  Require(shape.c.rows() == d, "dim(C) == d",
          {{"dim_c", static_cast<double>(shape.c.rows())},
           {"d", static_cast<double>(d)}});
  linalg::RequireSpd(shape.c, "clip matrix C");
}

}  // namespace detail

/// Clip score of x: (||x||^2 x^T C^-2 x)^(1/4) or (x^T C^-1 x)^(1/2).
inline double ClipScore(const Eigen::VectorXd& x,
                        const Eigen::LLT<Eigen::MatrixXd>& c_factor,
                        ClipMode mode) {
  const Eigen::VectorXd w = c_factor.solve(x);  // C^-1 x
  if (mode == ClipMode::kQuartic) {
    return std::sqrt(std::sqrt(x.squaredNorm() * w.squaredNorm()));
  }
  return std::sqrt(std::max(0.0, x.dot(w)));
}

/// Shrinks each record with score above R_c back onto the boundary. Labels
/// are untouched. Points within a 1e-12 relative band of the boundary are
/// left alone so that clipping is idempotent.
inline FeatureDataset FeatureClip(const FeatureDataset& data,
                                  const ClipShape& shape, ClipMode mode) {
  data.Validate();
  detail::CheckShape(shape, data.dim());
  const auto c_factor = linalg::SpdFactor(shape.c);
  FeatureDataset out = data;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double score = ClipScore(out.x.col(i), c_factor, mode);
    if (score > shape.r_c * (1 + 1e-12)) out.x.col(i) *= shape.r_c / score;
  }
  return out;
}

/// Shrinks labels so every per-record term ||X_i y_i|| is at most b_clip.
inline FeatureDataset ClipLabels(const FeatureDataset& data, double b_clip) {
  detail::Require(b_clip > 0, "b_clip > 0", {{"b_clip", b_clip}});
  FeatureDataset out = data;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double term = out.x.col(i).norm() * std::abs(out.y[i]);
    if (term > b_clip) out.y[i] *= b_clip / term;
  }
  return out;
}

/// eta = sqrt(6 kappa R_c^4 / (rho^2 n^2)).
inline double EtaFromClip(double r_c, double rho, std::int64_t n,
                          double kappa = 1) {
  detail::Require(r_c > 0 && rho > 0 && n > 0 && kappa > 0,
                  "R_c, rho, n, kappa > 0",
                  {{"R_c", r_c},
                   {"rho", rho},
                   {"n", static_cast<double>(n)},
                   {"kappa", kappa}});
  const double nd = static_cast<double>(n);
  return std::sqrt(6 * kappa) * r_c * r_c / (rho * nd);
}

/// R_rel = eta ||b|| + 2 M / n where M bounds ||X_j y_j|| over any record a
/// neighbour may contain: b_clip when labels are clipped to it, otherwise the
/// largest term present in the data.
inline double RRelBound(const QuadraticModel& model, const FeatureDataset& data,
                        double eta,
                        double b_clip = std::numeric_limits<double>::infinity()) {
  detail::Require(model.n == data.size() && model.dim() == data.dim(),
                  "model built from data");
  detail::Require(eta >= 0, "eta >= 0", {{"eta", eta}});
  double m = 0;
  if (std::isfinite(b_clip)) {
    m = b_clip;
  } else {
    for (Eigen::Index j = 0; j < data.size(); ++j) {
      m = std::max(m, data.x.col(j).norm() * std::abs(data.y[j]));
    }
  }
  return eta * model.b.norm() + 2 * m / static_cast<double>(data.size());
}

/// Per-record scores X_i^T (A - rho C)^-1 X_i, or nullopt when A - rho C is
/// not safely positive definite (smallest eigenvalue <= 1e-9 ||A||).
inline std::optional<std::vector<double>> MarginScores(
    const FeatureDataset& data, const QuadraticModel& model,
    const ClipShape& shape, double rho) {
  const Eigen::MatrixXd gap = model.a - rho * shape.c;
  const auto es = linalg::SymmetricEigen(gap);
  const double tol = 1e-9 * linalg::LambdaMax(model.a);
  if (es.eigenvalues().minCoeff() <= tol) return std::nullopt;
  const Eigen::MatrixXd proj =
      es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      (es.eigenvectors().transpose() * data.x);
  std::vector<double> scores(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    scores[static_cast<std::size_t>(i)] = proj.col(i).squaredNorm();
  }
  return scores;
}

/// Lower bound on the number of records to change before A~ >= rho C fails:
/// 0 when A~ - rho C is not positive definite, otherwise the smallest k such
/// that the k largest scores sum to at least n, up to a 1e-12 relative
/// rounding allowance (kInfiniteMargin if none).
inline std::size_t DeltaPlus(const FeatureDataset& data_clipped,
                             const QuadraticModel& model,
                             const ClipShape& shape, double rho) {
  detail::Require(rho > 0, "rho > 0", {{"rho", rho}});
  detail::Require(model.dim() == data_clipped.dim() &&
                      shape.c.rows() == model.dim() &&
                      shape.c.cols() == model.dim() &&
                      model.n == data_clipped.size(),
                  "matching dimensions of data, model and C",
                  {{"d_data", static_cast<double>(data_clipped.dim())},
                   {"d_model", static_cast<double>(model.dim())},
                   {"d_c", static_cast<double>(shape.c.rows())}});
  auto scores = MarginScores(data_clipped, model, shape, rho);
  if (!scores) return 0;
  std::sort(scores->begin(), scores->end(), std::greater<>());
  const double n = static_cast<double>(data_clipped.size());
  double sum = 0;
  for (std::size_t k = 0; k < scores->size(); ++k) {
    sum += (*scores)[k];
    if (sum >= n * (1 - 1e-12)) return k + 1;
  }
  return kInfiniteMargin;
}

/// Noisy stability test: accept iff Delta_+ + Lap(1/eps) > -log(delta)/eps.
/// One Laplace draw is consumed even for an infinite margin.
inline PtrOutcome PtrTest(std::size_t dplus, double eps, double delta,
                          SeededRng& rng) {
  detail::Require(eps > 0, "eps > 0", {{"eps", eps}});
  detail::Require(delta > 0 && delta < 1, "0 < delta < 1", {{"delta", delta}});
  PtrOutcome out;
  out.delta_plus = dplus;
  out.eps = eps;
  out.delta = delta;
  out.threshold = -std::log(delta) / eps;
  const double noise = LaplaceSample(1 / eps, rng);
  out.noisy_delta = dplus == kInfiniteMargin
                        ? std::numeric_limits<double>::infinity()
                        : static_cast<double>(dplus) + noise;
  out.accepted = out.noisy_delta > out.threshold;
  return out;
}

/// rho = E[min(Q, R_c^2)] / (2d) for Q ~ chi-square(d), using
/// E[Q 1{Q <= c}] = d F_{d+2}(c).
inline double GaussianRho(int d, double r_c) {
  detail::Require(d >= 1, "d >= 1", {{"d", static_cast<double>(d)}});
  detail::Require(r_c > 0, "R_c > 0", {{"R_c", r_c}});
  const double c = r_c * r_c;
  if (!std::isfinite(c)) return 0.5;
  const double half_d = 0.5 * d;
  const double truncated_mean = d * boost::math::gamma_p(half_d + 1, 0.5 * c);
  const double capped_tail = c * boost::math::gamma_q(half_d, 0.5 * c);
  return (truncated_mean + capped_tail) / (2.0 * d);
}

/// Smallest n accepted by GaussianMuReg: 4 log(2d/nu) / 9.
inline double GaussianMinSamples(double nu, int d) {
  return 4 * std::log(2 * d / nu) / 9;
}

/// mu_reg = 4 ||Sigma|| R_c^2 sqrt(log(2d/nu) / n).
inline double GaussianMuReg(double sigma_norm, double r_c, std::int64_t n,
                            double nu, int d) {
  detail::Require(sigma_norm > 0 && r_c > 0 && d >= 1, "||Sigma||, R_c, d > 0",
                  {{"sigma_norm", sigma_norm}, {"R_c", r_c}});
  detail::Require(nu > 0 && nu < 1, "0 < nu < 1", {{"nu", nu}});
  const double n_min = GaussianMinSamples(nu, d);
  if (static_cast<double>(n) < n_min) {
    throw PreconditionError("n >= 4 log(2d/nu) / 9",
                            {{"n", static_cast<double>(n)}, {"n_min", n_min}});
  }
  return 4 * sigma_norm * r_c * r_c *
         std::sqrt(std::log(2 * d / nu) / static_cast<double>(n));
}

struct Certificate {
  double eta = 0;
  double r_rel = 0;
  double rho = 0;
  double r_c = 0;
  double kappa = 1;
  double b_clip = std::numeric_limits<double>::infinity();
  double mu_reg = 0;
  ClipMode mode = ClipMode::kQuartic;
  PtrOutcome ptr;
  std::uint64_t seed = 0;

  RelativeSensitivity sensitivity() const { return {eta, r_rel}; }
};

struct CertifyOptions {
  double rho = 0.5;
  double mu_reg = 0;
  double ptr_eps = 0.1;
  double ptr_delta = 1e-6;
  ClipMode mode = ClipMode::kQuartic;
  /// Label clipping bound for ||X_i y_i||; infinite disables enforcement.
  double b_clip = std::numeric_limits<double>::infinity();
};

struct CertifyResult {
  PtrOutcome ptr;
  /// Present only on acceptance.
  std::optional<Certificate> certificate;
  /// The clipped data and its quadratic (local to the data holder).
  FeatureDataset clipped;
  QuadraticModel model;

  bool accepted() const { return certificate.has_value(); }
};

/// Clip, build the quadratic, run PTR on Delta_+, and on acceptance release
/// (eta, R_rel). kappa is 1 in quartic mode and cond(C) in ellipsoid mode.
inline CertifyResult CertifyRelativeSensitivity(const FeatureDataset& data,
                                                const ClipShape& shape,
                                                const CertifyOptions& opt,
                                                SeededRng& rng) {
  CertifyResult out;
  out.clipped = FeatureClip(data, shape, opt.mode);
  if (std::isfinite(opt.b_clip)) out.clipped = ClipLabels(out.clipped, opt.b_clip);
  out.model = BuildQuadratic(out.clipped, opt.mu_reg);
  const auto dplus = DeltaPlus(out.clipped, out.model, shape, opt.rho);
  out.ptr = PtrTest(dplus, opt.ptr_eps, opt.ptr_delta, rng);
  if (!out.ptr.accepted) return out;

  Certificate cert;
  cert.rho = opt.rho;
  cert.r_c = shape.r_c;
  cert.mode = opt.mode;
  cert.mu_reg = opt.mu_reg;
  cert.b_clip = opt.b_clip;
  cert.kappa =
      opt.mode == ClipMode::kQuartic ? 1.0 : linalg::ConditionNumber(shape.c);
  cert.eta = EtaFromClip(shape.r_c, opt.rho, out.clipped.size(), cert.kappa);
  cert.r_rel = RRelBound(out.model, out.clipped, cert.eta, opt.b_clip);
  cert.ptr = out.ptr;
  cert.seed = rng.seed();
  out.certificate = cert;
  return out;
}

}  // namespace rgm
