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
// Privacy accounting for the Relative Gaussian Mechanism (RGM).
//
// A query R satisfies (eta, r_rel) relative L2 sensitivity when, for all
// neighbouring inputs x ~ y,
//
//   ||R(x) - R(y)||^2 <= eta^2 min(||R(x)||^2, ||R(y)||^2) + r_rel^2.
//
// RGM releases R(x) + N(0, (gamma ||R(x)||^2 + sigma2) I_d). Everything here
// is a pure function of its arguments.
#pragma once

#include <cmath>
#include <limits>

#include "rgm/errors.hpp"
#include "rgm/numerics.hpp"

namespace rgm {

struct RelativeSensitivity {
  double eta = 0;
  double r_rel = 0;
};

/// Per-coordinate noise variance is gamma * ||R(x)||^2 + sigma2.
struct RgmNoise {
  double gamma = 0;
  double sigma2 = 0;
};

struct RdpPoint {
  double alpha = 0;
  double epsilon = 0;
};

struct DpPoint {
  double epsilon = 0;
  double delta = 0;
};

/// Truncated concentrated DP: D_a <= rho * a for all 1 < a < omega.
struct TcdpPoint {
  double rho = 0;
  double omega = 0;
};

namespace detail {

inline void CheckSensitivity(const RelativeSensitivity& sens) {
  Require(std::isfinite(sens.eta) && sens.eta > 0, "eta > 0",
          {{"eta", sens.eta}});
  Require(std::isfinite(sens.r_rel) && sens.r_rel >= 0, "r_rel >= 0",
          {{"r_rel", sens.r_rel}});
}

// eta * (2 + eta) * (alpha - 1); RDP is finite only while this is below 1.
inline double RatioLeak(double eta, double alpha) {
  return eta * (2 + eta) * (alpha - 1);
}

}  // namespace detail

/// Supremum of admissible Renyi orders: (1 + eta)^2 / (eta (2 + eta)).
/// With eta == 0 (plain L2 sensitivity) every order is admissible.
inline double AlphaMax(const RelativeSensitivity& sens) {
  detail::Require(std::isfinite(sens.eta) && sens.eta >= 0, "eta >= 0",
                  {{"eta", sens.eta}});
  if (sens.eta == 0) return std::numeric_limits<double>::infinity();
  const double eta = sens.eta;
  return (1 + eta) * (1 + eta) / (eta * (2 + eta));
}

namespace detail {

inline void CheckAlpha(const RelativeSensitivity& sens, double alpha) {
  const double amax = AlphaMax(sens);
  Require(alpha > 1 && alpha < amax, "1 < alpha < alpha_max(eta)",
          {{"alpha", alpha}, {"alpha_max", amax}, {"eta", sens.eta}});
}

}  // namespace detail

/// Smallest baseline variance sigma2 for which the RDP bound holds:
/// gamma / eta^2 * (1 - eta (alpha - 1)) * r_rel^2.
inline double MinBaselineVariance(const RelativeSensitivity& sens, double gamma,
                                  double alpha) {
  detail::CheckSensitivity(sens);
  detail::Require(gamma > 0, "gamma > 0", {{"gamma", gamma}});
  detail::CheckAlpha(sens, alpha);
  const double eta = sens.eta;
  return gamma / (eta * eta) * (1 - eta * (alpha - 1)) * sens.r_rel *
         sens.r_rel;
}

/// Renyi-DP of RGM at order alpha for a d-dimensional query:
///
///   eps = alpha eta^2 / (2 gamma) * (1 + gamma d (2+eta)^2 (1+eta)^2)
///                                 / (1 - eta (alpha-1) (2+eta)),
///
/// valid whenever sigma2 >= MinBaselineVariance(sens, gamma, alpha).
inline RdpPoint RgmRdpEpsilon(const RelativeSensitivity& sens, double gamma,
                              double alpha, int d) {
  detail::CheckSensitivity(sens);
  detail::Require(gamma > 0, "gamma > 0", {{"gamma", gamma}});
  detail::Require(d >= 1, "d >= 1", {{"d", static_cast<double>(d)}});
  detail::CheckAlpha(sens, alpha);
  const double eta = sens.eta;
  const double denom = 1 - detail::RatioLeak(eta, alpha);
  detail::Require(denom > 0, "1 - eta (alpha - 1) (2 + eta) > 0",
                  {{"alpha", alpha}, {"eta", eta}});
  const double spread = (2 + eta) * (2 + eta) * (1 + eta) * (1 + eta);
  const double eps =
      alpha * eta * eta / (2 * gamma) * (1 + gamma * d * spread) / denom;
  return {alpha, eps};
}

/// Classical Gaussian mechanism: alpha * r^2 / (2 sigma2).
inline RdpPoint GaussianRdpEpsilon(double l2_sensitivity, double sigma2,
                                   double alpha) {
  detail::Require(l2_sensitivity >= 0, "l2_sensitivity >= 0",
                  {{"l2_sensitivity", l2_sensitivity}});
  detail::Require(sigma2 > 0, "sigma2 > 0", {{"sigma2", sigma2}});
  detail::Require(alpha > 1, "alpha > 1", {{"alpha", alpha}});
  return {alpha, alpha * l2_sensitivity * l2_sensitivity / (2 * sigma2)};
}

/// RDP of a concrete (gamma, sigma2) noise choice. eta > 0 uses the RGM bound
/// and checks the baseline variance; eta == 0 is plain L2 sensitivity r_rel,
/// accounted as a Gaussian mechanism (requires gamma == 0).
inline RdpPoint RdpEpsilon(const RelativeSensitivity& sens,
                           const RgmNoise& noise, double alpha, int d) {
  if (sens.eta == 0) {
    detail::Require(noise.gamma == 0, "gamma == 0 when eta == 0",
                    {{"gamma", noise.gamma}});
    return GaussianRdpEpsilon(sens.r_rel, noise.sigma2, alpha);
  }
  const double floor = MinBaselineVariance(sens, noise.gamma, alpha);
  detail::Require(noise.sigma2 >= floor * (1 - 1e-12),
                  "sigma2 >= gamma eta^-2 (1 - eta (alpha - 1)) r_rel^2",
                  {{"sigma2", noise.sigma2}, {"minimum", floor}});
  return RgmRdpEpsilon(sens, noise.gamma, alpha, d);
}

/// Mironov conversion: eps_dp = eps_rdp + log(1/delta) / (alpha - 1).
inline DpPoint RdpToDp(const RdpPoint& point, double delta) {
  detail::Require(delta > 0 && delta < 1, "0 < delta < 1", {{"delta", delta}});
  detail::Require(point.alpha > 1, "alpha > 1", {{"alpha", point.alpha}});
  return {point.epsilon + std::log(1 / delta) / (point.alpha - 1), delta};
}

/// Closed-form (eps, delta)-DP of RGM: eps = chi + 2 sqrt(chi log(1/delta)),
/// chi = eta^2 / gamma + eta^2 (2+eta)^2 (1+eta)^2 d.
inline DpPoint DpGuaranteeClosedForm(const RelativeSensitivity& sens,
                                     double gamma, int d, double delta) {
  detail::CheckSensitivity(sens);
  detail::Require(gamma > 0, "gamma > 0", {{"gamma", gamma}});
  detail::Require(d >= 1, "d >= 1", {{"d", static_cast<double>(d)}});
  detail::Require(delta > 0 && delta <= 1, "0 < delta <= 1",
                  {{"delta", delta}});
  const double eta = sens.eta;
  const double log_inv_delta = std::log(1 / delta);
  const bool gamma_branch =
      gamma * 4 * (2 + eta) * (2 + eta) * log_inv_delta <= 1;
  const bool dim_branch = d * (1 + eta) * (1 + eta) >= 4 * log_inv_delta;
  if (!gamma_branch && !dim_branch) {
    throw PreconditionError(
        "gamma <= 1/(4 (2+eta)^2 log(1/delta)) or "
        "d >= 4 log(1/delta)/(1+eta)^2",
        {{"gamma", gamma},
         {"gamma_max", 1 / (4 * (2 + eta) * (2 + eta) * log_inv_delta)},
         {"d", static_cast<double>(d)},
         {"d_min", 4 * log_inv_delta / ((1 + eta) * (1 + eta))}});
  }
  const double spread = (2 + eta) * (2 + eta) * (1 + eta) * (1 + eta);
  const double chi = eta * eta / gamma + eta * eta * spread * d;
  return {chi + 2 * std::sqrt(chi * log_inv_delta), delta};
}

struct AlphaOptimum {
  double alpha;
  DpPoint dp;
};

/// Minimizes RdpToDp(RgmRdpEpsilon(alpha), delta) over alpha in
/// (1, alpha_max) by golden-section search. The objective is a sum of a
/// convex increasing and a convex decreasing term, hence unimodal.
inline AlphaOptimum OptimizeAlphaNumeric(const RelativeSensitivity& sens,
                                         double gamma, int d, double delta) {
  detail::CheckSensitivity(sens);
  detail::Require(delta > 0 && delta < 1, "0 < delta < 1", {{"delta", delta}});
  const double lo = 1 + 1e-9;
  const double hi = AlphaMax(sens) - 1e-9;
  detail::Require(lo < hi, "non-empty alpha interval (1, alpha_max)",
                  {{"alpha_max", hi + 1e-9}});
  auto objective = [&](double alpha) {
    return RdpToDp(RgmRdpEpsilon(sens, gamma, alpha, d), delta).epsilon;
  };
  const auto best = detail::GoldenSection(objective, lo, hi, 1e-9);
  return {best.x, {best.value, delta}};
}

/// Smallest eps_dp reachable with any gamma: the gamma -> infinity limit of
/// the Mironov bound, minimized over alpha.
inline double EpsilonFloor(const RelativeSensitivity& sens, int d,
                           double delta) {
  detail::CheckSensitivity(sens);
  detail::Require(delta > 0 && delta < 1, "0 < delta < 1", {{"delta", delta}});
  const double eta = sens.eta;
  const double spread = (2 + eta) * (2 + eta) * (1 + eta) * (1 + eta);
  auto limit = [&](double alpha) {
    return alpha * eta * eta * d * spread /
               (2 * (1 - detail::RatioLeak(eta, alpha))) +
           std::log(1 / delta) / (alpha - 1);
  };
  return detail::GoldenSection(limit, 1 + 1e-9, AlphaMax(sens) - 1e-9, 1e-9)
      .value;
}

struct GammaCalibration {
  bool feasible = false;
  double gamma = 0;
  double sigma2 = 0;
  double alpha = 0;
  double epsilon = 0;  // achieved eps_dp (feasible) or +inf
  double epsilon_floor = 0;
};

/// Smallest gamma whose alpha-optimized (eps, delta) guarantee meets the
/// target; sigma2 is then the minimal baseline variance at the chosen alpha.
/// A target at or below the attainable floor yields feasible == false.
inline GammaCalibration OptimizeGamma(const RelativeSensitivity& sens, int d,
                                      const DpPoint& target) {
  detail::CheckSensitivity(sens);
  detail::Require(target.epsilon > 0, "target epsilon > 0",
                  {{"epsilon", target.epsilon}});
  GammaCalibration out;
  out.epsilon_floor = EpsilonFloor(sens, d, target.delta);
  out.epsilon = std::numeric_limits<double>::infinity();
  if (target.epsilon <= out.epsilon_floor) return out;

  auto eps_at = [&](double log_gamma) {
    return OptimizeAlphaNumeric(sens, std::exp(log_gamma), d, target.delta)
        .dp.epsilon;
  };
  // eps(gamma) decreases monotonically towards the floor.
  double hi = 0;
  while (eps_at(hi) > target.epsilon) {
    hi += std::log(10.0);
    if (hi > std::log(1e300)) return out;
  }
  double lo = hi - std::log(10.0);
  while (eps_at(lo) <= target.epsilon) {
    hi = lo;
    lo -= std::log(10.0);
    if (lo < std::log(1e-300)) break;
  }
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    (eps_at(mid) <= target.epsilon ? hi : lo) = mid;
  }
  out.gamma = std::exp(hi);
  const auto opt = OptimizeAlphaNumeric(sens, out.gamma, d, target.delta);
  out.alpha = opt.alpha;
  out.epsilon = opt.dp.epsilon;
  out.sigma2 = MinBaselineVariance(sens, out.gamma, out.alpha);
  out.feasible = out.epsilon <= target.epsilon;
  return out;
}

/// Noise matching a local-sensitivity calibration at level eps_star:
/// gamma = alpha eta^2 / (2 eps_star), sigma2 = gamma r_rel^2 / eta^2.
inline RgmNoise GammaForTarget(const RelativeSensitivity& sens, double alpha,
                               double eps_star) {
  detail::CheckSensitivity(sens);
  detail::Require(eps_star > 0, "eps_star > 0", {{"eps_star", eps_star}});
  detail::CheckAlpha(sens, alpha);
  const double gamma = alpha * sens.eta * sens.eta / (2 * eps_star);
  return {gamma, gamma * sens.r_rel * sens.r_rel / (sens.eta * sens.eta)};
}

/// Split of the RDP obtained under GammaForTarget into the reweighted target
/// level and the gamma-independent cost of norm-dependent noise.
struct PrivacyLossTerms {
  double target_term;
  double norm_leak_term;
  double total() const { return target_term + norm_leak_term; }
};

inline PrivacyLossTerms DecomposePrivacyLoss(const RelativeSensitivity& sens,
                                             double alpha, double eps_star,
                                             int d) {
  detail::CheckSensitivity(sens);
  detail::CheckAlpha(sens, alpha);
  const double eta = sens.eta;
  const double denom = 1 - detail::RatioLeak(eta, alpha);
  const double spread = (2 + eta) * (2 + eta) * (1 + eta) * (1 + eta);
  return {eps_star / denom, alpha * d * eta * eta * spread / (2 * denom)};
}

/// tCDP pair (eta^2 (1/gamma + d (2+eta)^2 (1+eta)^2), 1 + 1/(2 eta (2+eta))).
inline TcdpPoint TcdpParams(const RelativeSensitivity& sens, double gamma,
                            int d) {
  detail::CheckSensitivity(sens);
  detail::Require(gamma > 0, "gamma > 0", {{"gamma", gamma}});
  detail::Require(d >= 1, "d >= 1", {{"d", static_cast<double>(d)}});
  const double eta = sens.eta;
  const double spread = (2 + eta) * (2 + eta) * (1 + eta) * (1 + eta);
  return {eta * eta * (1 / gamma + d * spread), 1 + 1 / (2 * eta * (2 + eta))};
}

/// tCDP pair from eliminating alpha with [1 - eta (alpha-1)(2+eta)]^-1 <= 2:
/// (eta^2 / gamma + eta^2 d (2+eta)^2 / 2, 1 + 1/(2 eta (2+eta))).
inline TcdpPoint TcdpParamsAlphaFree(const RelativeSensitivity& sens,
                                     double gamma, int d) {
  detail::CheckSensitivity(sens);
  detail::Require(gamma > 0, "gamma > 0", {{"gamma", gamma}});
  detail::Require(d >= 1, "d >= 1", {{"d", static_cast<double>(d)}});
  const double eta = sens.eta;
  return {eta * eta / gamma + eta * eta * d * (2 + eta) * (2 + eta) / 2,
          1 + 1 / (2 * eta * (2 + eta))};
}

/// tCDP pair obtained by reading RGM as a one-dimensional Gaussian smooth
/// sensitivity mechanism: (4 eta^2 + eta^2 / gamma, 1 / (4 eta)).
inline TcdpPoint SmoothSensitivityTcdpParams(const RelativeSensitivity& sens,
                                             double gamma) {
  detail::CheckSensitivity(sens);
  detail::Require(gamma > 0, "gamma > 0", {{"gamma", gamma}});
  const double eta = sens.eta;
  return {4 * eta * eta + eta * eta / gamma, 1 / (4 * eta)};
}

/// Exact Renyi divergence D_alpha(P || Q) between N(mu1, s1 I_d) and
/// N(mu2, s2 I_d), given ||mu1 - mu2||.
inline double GaussianRenyiDivergence(double mu_dist, double sigma1_sq,
                                      double sigma2_sq, double alpha, int d) {
  detail::Require(alpha > 1, "alpha > 1", {{"alpha", alpha}});
  detail::Require(sigma1_sq > 0 && sigma2_sq > 0, "sigma1^2 > 0, sigma2^2 > 0",
                  {{"sigma1_sq", sigma1_sq}, {"sigma2_sq", sigma2_sq}});
  const double mixed = alpha * sigma2_sq + (1 - alpha) * sigma1_sq;
  detail::Require(mixed > 0, "alpha sigma2^2 + (1 - alpha) sigma1^2 > 0",
                  {{"alpha", alpha},
                   {"sigma1_sq", sigma1_sq},
                   {"sigma2_sq", sigma2_sq}});
  const double mean_term = alpha * mu_dist * mu_dist / (2 * mixed);
  // log(s1^(1-a) s2^a / sqrt(mixed)) = a/2 log(1+u) - 1/2 log(1 + a u) with
  // u = s2/s1 - 1; log1p keeps the cancellation near u = 0 accurate.
  const double u = (sigma2_sq - sigma1_sq) / sigma1_sq;
  const double log_term = 0.5 * alpha * std::log1p(u) - 0.5 * std::log1p(alpha * u);
  return mean_term + d / (alpha - 1) * log_term;
}

struct NoiseRatioCheck {
  double lower;
  double upper;
  bool holds;
};

/// Checks (1+eta)^-2 <= (gamma |x|^2 + s) / (gamma |y|^2 + s) <= (1+eta)^2 for
/// squared output norms |x|^2, |y|^2. The bounds are guaranteed when
/// sigma2 >= gamma (1 + 1/eta) / (2 eta + eta^2) * r_rel^2.
inline NoiseRatioCheck NoiseRatioBounds(const RelativeSensitivity& sens,
                                        const RgmNoise& noise,
                                        double norm_x_sq, double norm_y_sq) {
  detail::CheckSensitivity(sens);
  const double eta = sens.eta;
  const double needed = noise.gamma * (1 + 1 / eta) / (2 * eta + eta * eta) *
                        sens.r_rel * sens.r_rel;
  if (noise.sigma2 < needed) {
    throw PreconditionError(
        "sigma2 >= gamma (1 + 1/eta) / (2 eta + eta^2) r_rel^2",
        {{"sigma2", noise.sigma2}, {"minimum", needed}});
  }
  const double lower = 1 / ((1 + eta) * (1 + eta));
  const double upper = (1 + eta) * (1 + eta);
  const double ratio = (noise.gamma * norm_x_sq + noise.sigma2) /
                       (noise.gamma * norm_y_sq + noise.sigma2);
  return {lower, upper, ratio >= lower && ratio <= upper};
}

}  // namespace rgm
