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
// Gradient descent on quadratics with privatized gradients.
//
// Noise conventions: mechanisms add per-coordinate variance v, so the noise
// power is E||xi||^2 = d v. The utility bounds below take the total power;
// for RGM pass the effective constants gamma_eff = gamma d and
// sigma2_eff = sigma2 d (see EffectiveNoise).
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "rgm/accountant.hpp"
#include "rgm/errors.hpp"
#include "rgm/mechanisms.hpp"
#include "rgm/quadratic.hpp"
#include "rgm/rng.hpp"

namespace rgm {

/// Per-sample clipping to `threshold` followed by N(0, sigma2 I_d).
struct ClippedGmNoise {
  double threshold = std::numeric_limits<double>::infinity();
  double sigma2 = 0;
};

using GdNoise = std::variant<std::monostate, RgmNoise, ClippedGmNoise>;

struct GdConfig {
  double tau = 0;
  int iters = 0;
  Eigen::VectorXd theta0;
  GdNoise noise;
  SeededRng rng{0};
  /// Reference minimizer for the metrics; defaults to the model's.
  std::optional<Eigen::VectorXd> theta_star;
};

struct Trajectory {
  std::vector<Eigen::VectorXd> iterates;  // T + 1
  std::vector<double> dist_sq;            // ||theta_t - theta*||^2, T + 1
  std::vector<double> function_gap;       // f(theta_t) - f*, T + 1
  /// f(mean(theta_0..theta_{t-1})) - f*, entry 0 holds the gap at theta_0.
  std::vector<double> averaged_gap;
  std::vector<double> noise_power;  // ||xi_t||^2 of step t, T entries

  int steps() const { return static_cast<int>(noise_power.size()); }
};

/// Variance of the clipped-gradient baseline: alpha c^2 / (eps N^2).
inline double ClippedGmVariance(double alpha, double eps, double threshold,
                                std::int64_t local_samples) {
  detail::Require(alpha > 1 && eps > 0 && threshold > 0 && local_samples > 0,
                  "alpha > 1, eps > 0, c > 0, N > 0",
                  {{"alpha", alpha}, {"eps", eps}, {"c", threshold}});
  const double n = static_cast<double>(local_samples);
  return alpha * threshold * threshold / (eps * n * n);
}

/// Mean of per-sample gradients, each clipped to `threshold`.
inline Eigen::VectorXd ClippedMeanGradient(const FeatureDataset& data,
                                           double mu_reg, double threshold,
                                           const Eigen::VectorXd& theta) {
  const Eigen::VectorXd residual = data.x.transpose() * theta - data.y;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.dim());
  for (Eigen::Index j = 0; j < data.size(); ++j) {
    Eigen::VectorXd g = data.x.col(j) * residual[j] + mu_reg * theta;
    const double norm = g.norm();
    if (norm > threshold) g *= threshold / norm;
    sum += g;
  }
  return sum / static_cast<double>(data.size());
}

namespace detail {

class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const QuadraticModel& model, Eigen::VectorXd theta_star,
                     int iters)
      : model_(model), star_(std::move(theta_star)) {
    out_.iterates.reserve(iters + 1);
    out_.dist_sq.reserve(iters + 1);
    out_.function_gap.reserve(iters + 1);
    out_.averaged_gap.reserve(iters + 1);
    out_.noise_power.reserve(iters);
  }

  void Record(const Eigen::VectorXd& theta) {
    out_.dist_sq.push_back((theta - star_).squaredNorm());
    out_.function_gap.push_back(model_.Gap(theta, star_));
    if (out_.iterates.empty()) {
      running_sum_ = Eigen::VectorXd::Zero(theta.size());
      out_.averaged_gap.push_back(model_.Gap(theta, star_));
    } else {
      const double t = static_cast<double>(out_.iterates.size());
      out_.averaged_gap.push_back(model_.Gap(running_sum_ / t, star_));
    }
    running_sum_ += theta;
    out_.iterates.push_back(theta);
  }

  void RecordNoise(double power) { out_.noise_power.push_back(power); }

  Trajectory Take() { return std::move(out_); }

 private:
  const QuadraticModel& model_;
  Eigen::VectorXd star_;
  Eigen::VectorXd running_sum_;
  Trajectory out_;
};

inline void CheckConfig(const QuadraticModel& model, const GdConfig& cfg) {
  Require(cfg.tau > 0, "tau > 0", {{"tau", cfg.tau}});
  Require(cfg.iters >= 1, "T >= 1", {{"T", static_cast<double>(cfg.iters)}});
  Require(cfg.theta0.size() == model.dim(), "dim(theta0) == d",
          {{"dim_theta0", static_cast<double>(cfg.theta0.size())},
           {"d", static_cast<double>(model.dim())}});
}

}  // namespace detail

/// theta_{t+1} = theta_t - tau * RGM(grad f(theta_t)).
inline Trajectory PrivateGd(const QuadraticModel& model, GdConfig cfg) {
  detail::CheckConfig(model, cfg);
  const auto* noise = std::get_if<RgmNoise>(&cfg.noise);
  detail::Require(noise != nullptr, "noise == rgm");
  detail::TrajectoryRecorder rec(
      model, cfg.theta_star.value_or(model.Minimizer()), cfg.iters);
  Eigen::VectorXd theta = cfg.theta0;
  rec.Record(theta);
  for (int t = 0; t < cfg.iters; ++t) {
    const Eigen::VectorXd grad = model.Gradient(theta);
    const Eigen::VectorXd released =
        RelativeGaussianMechanism(grad, *noise, cfg.rng);
    rec.RecordNoise((released - grad).squaredNorm());
    theta -= cfg.tau * released;
    rec.Record(theta);
  }
  return rec.Take();
}

/// Exact gradient descent.
inline Trajectory VanillaGd(const QuadraticModel& model, GdConfig cfg) {
  detail::CheckConfig(model, cfg);
  detail::Require(std::holds_alternative<std::monostate>(cfg.noise),
                  "noise == none");
  detail::TrajectoryRecorder rec(
      model, cfg.theta_star.value_or(model.Minimizer()), cfg.iters);
  Eigen::VectorXd theta = cfg.theta0;
  rec.Record(theta);
  for (int t = 0; t < cfg.iters; ++t) {
    const Eigen::VectorXd grad = model.Gradient(theta);
    rec.RecordNoise(0);
    theta -= cfg.tau * grad;
    rec.Record(theta);
  }
  return rec.Take();
}

/// DP-GD baseline: clipped per-sample mean plus N(0, sigma2 I_d).
inline Trajectory ClippedDpGd(const FeatureDataset& data, double mu_reg,
                              GdConfig cfg) {
  const QuadraticModel model = BuildQuadratic(data, mu_reg);
  detail::CheckConfig(model, cfg);
  const auto* noise = std::get_if<ClippedGmNoise>(&cfg.noise);
  detail::Require(noise != nullptr, "noise == clipped_gm");
  detail::Require(noise->threshold > 0, "c > 0", {{"c", noise->threshold}});
  detail::TrajectoryRecorder rec(
      model, cfg.theta_star.value_or(model.Minimizer()), cfg.iters);
  Eigen::VectorXd theta = cfg.theta0;
  rec.Record(theta);
  for (int t = 0; t < cfg.iters; ++t) {
    const Eigen::VectorXd mean =
        ClippedMeanGradient(data, mu_reg, noise->threshold, theta);
    const Eigen::VectorXd released =
        GaussianMechanism(mean, noise->sigma2, cfg.rng);
    rec.RecordNoise((released - mean).squaredNorm());
    theta -= cfg.tau * released;
    rec.Record(theta);
  }
  return rec.Take();
}

/// (gamma d, sigma2 d): RGM constants in total-noise-power units.
inline RgmNoise EffectiveNoise(const RgmNoise& noise, int d) {
  return {noise.gamma * d, noise.sigma2 * d};
}

/// E||theta_t - theta*||^2 <= (1 - tau mu)^t ||theta_0 - theta*||^2
///                            + tau sigma2_total / mu.
inline double StronglyConvexUtilityBound(int t, double tau, double mu,
                                         double sigma2_total,
                                         double dist0_sq) {
  detail::Require(t >= 0, "t >= 0", {{"t", static_cast<double>(t)}});
  detail::Require(tau * mu > 0 && tau * mu < 1, "0 < tau mu < 1",
                  {{"tau", tau}, {"mu", mu}});
  detail::Require(sigma2_total >= 0 && dist0_sq >= 0,
                  "sigma2_total >= 0, dist0_sq >= 0");
  return std::pow(1 - tau * mu, t) * dist0_sq + tau * sigma2_total / mu;
}

/// f(mean(theta_0..theta_{t-1})) - f* <= ||theta_0 - theta*||^2 / (2 tau t)
///                                       + tau sigma2_total / 2.
inline double ConvexUtilityBound(int t, double tau, double sigma2_total,
                                 double dist0_sq) {
  detail::Require(t >= 1, "t >= 1", {{"t", static_cast<double>(t)}});
  detail::Require(tau > 0, "tau > 0", {{"tau", tau}});
  detail::Require(sigma2_total >= 0 && dist0_sq >= 0,
                  "sigma2_total >= 0, dist0_sq >= 0");
  return dist0_sq / (2 * tau * t) + tau * sigma2_total / 2;
}

enum class StepSizeMode {
  kTheorem,     // 1 / ((1 + gamma d) L), the bound the utility proof needs
  kExperiment,  // 0.5 / max_i lambda_max(A_i)
};

inline double DefaultStepSize(double l_smooth, double gamma, int d,
                              StepSizeMode mode, double lmax_nodes = 0) {
  detail::Require(l_smooth > 0, "L > 0", {{"L", l_smooth}});
  if (mode == StepSizeMode::kExperiment) {
    detail::Require(lmax_nodes > 0, "lmax_nodes > 0",
                    {{"lmax_nodes", lmax_nodes}});
    return 0.5 / lmax_nodes;
  }
  detail::Require(gamma >= 0 && d >= 1, "gamma >= 0, d >= 1",
                  {{"gamma", gamma}, {"d", static_cast<double>(d)}});
  return 1 / ((1 + gamma * d) * l_smooth);
}

/// The step size as printed in the utility theorem statement, 1 / (L + gamma).
inline double StatementStepSize(double l_smooth, double gamma) {
  detail::Require(l_smooth > 0 && gamma >= 0, "L > 0, gamma >= 0");
  return 1 / (l_smooth + gamma);
}

}  // namespace rgm
