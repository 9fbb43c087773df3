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
// Oracle suites that check the closed forms against independent ground
// truth: exact Gaussian Renyi divergences, exhaustive subset search, Monte
// Carlo moments and brute-force neighbouring datasets.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rgm/accountant.hpp"
#include "rgm/linalg.hpp"
#include "rgm/numerics.hpp"
#include "rgm/optim.hpp"
#include "rgm/quadratic.hpp"
#include "rgm/rng.hpp"
#include "rgm/sensitivity.hpp"

namespace rgm::verify {

namespace detail {

inline double LogUniform(SeededRng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.Uniform());
}

inline Eigen::VectorXd RandomUnit(SeededRng& rng, Eigen::Index d) {
  Eigen::VectorXd v(d);
  do {
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.StandardNormal();
  } while (v.norm() == 0);
  return v / v.norm();
}

inline Eigen::MatrixXd RandomOrthogonal(SeededRng& rng, Eigen::Index d) {
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.StandardNormal();
  return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Privacy soundness: the exact divergence between the two RGM output
// distributions on a boundary-saturating pair never exceeds the bound.

/// Largest step r along unit direction u (relative to x = s e_1, with
/// cos(angle) = cos_phi) such that ||r u||^2 <= eta^2 min(||x||^2,
/// ||x + r u||^2) + R^2.
inline double SaturatingStep(double s, double cos_phi, double eta, double r_rel) {
  const double r1 = std::sqrt(eta * eta * s * s + r_rel * r_rel);
  // (1 - eta^2) r^2 - 2 eta^2 s cos r - (eta^2 s^2 + R^2) = 0, positive root.
  const double a = 1 - eta * eta;
  const double b = -2 * eta * eta * s * cos_phi;
  const double c = -(eta * eta * s * s + r_rel * r_rel);
  const double disc = std::sqrt(b * b - 4 * a * c);
  const double r2 = b < 0 ? (-b + disc) / (2 * a) : (2 * c) / (-b - disc);
  return std::min(r1, r2);
}

struct SoundnessCase {
  RelativeSensitivity sens;
  RgmNoise noise;
  double alpha = 0;
  int d = 1;
  double norm_x = 0, norm_y = 0, dist = 0;
  double divergence = 0;
  double bound = 0;
};

struct SoundnessReport {
  std::size_t configurations = 0;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double max_ratio = 0;
  SoundnessCase worst;
};

/// Larger of the two directed divergences between N(x, v_x I) and N(y, v_y I).
inline double PairDivergence(const RgmNoise& noise, double norm_x, double norm_y,
                             double dist, double alpha, int d) {
  const double vx = noise.gamma * norm_x * norm_x + noise.sigma2;
  const double vy = noise.gamma * norm_y * norm_y + noise.sigma2;
  if (vx == 0 && vy == 0) return dist == 0 ? 0 : std::numeric_limits<double>::infinity();
  return std::max(GaussianRenyiDivergence(dist, vx, vy, alpha, d),
                  GaussianRenyiDivergence(dist, vy, vx, alpha, d));
}

/// Random configurations with d <= 16, eta in [1e-4, 0.3], alpha in
/// (1, alpha_max), gamma in [1e-6, 1e2], R_rel in {0} U [1e-3, 1] and the
/// minimum admissible sigma2. Each configuration tests several saturating
/// pairs at different output scales and directions.
inline SoundnessReport SoundnessSweep(std::size_t configurations,
                                      std::uint64_t seed) {
  SeededRng rng(seed, DeriveStream("verify-soundness", 0, 0));
  SoundnessReport rep;
  for (std::size_t k = 0; k < configurations; ++k) {
    SoundnessCase c;
    c.d = 1 + static_cast<int>(rng.UniformIndex(16));
    c.sens.eta = detail::LogUniform(rng, 1e-4, 0.3);
    c.sens.r_rel = rng.Uniform() < 0.2 ? 0.0 : detail::LogUniform(rng, 1e-3, 1);
    const double amax = AlphaMax(c.sens);
    // Half the draws crowd towards alpha_max, half towards 1.
    const double u = rng.Uniform();
    c.alpha = rng.Uniform() < 0.5 ? 1 + (amax - 1) * u
                                  : amax - (amax - 1) * u * u;
    if (!(c.alpha > 1 && c.alpha < amax)) continue;
    c.noise.gamma = detail::LogUniform(rng, 1e-6, 1e2);
    c.noise.sigma2 = MinBaselineVariance(c.sens, c.noise.gamma, c.alpha);
    c.bound = RgmRdpEpsilon(c.sens, c.noise.gamma, c.alpha, c.d).epsilon;
    ++rep.configurations;

    const double scale = c.sens.r_rel > 0 ? c.sens.r_rel : 1.0;
    for (int p = 0; p < 6; ++p) {
      const double s = c.sens.r_rel > 0 ? scale * detail::LogUniform(rng, 1e-4, 1e4)
                                        : 1.0;
      double cos_phi;
      if (c.d == 1 || p < 2) {
        cos_phi = p % 2 == 0 ? 1.0 : -1.0;
      } else {
        cos_phi = 2 * rng.Uniform() - 1;
      }
      const double r = SaturatingStep(s, cos_phi, c.sens.eta, c.sens.r_rel);
      const double ny2 = s * s + 2 * s * r * cos_phi + r * r;
      c.norm_x = s;
      c.norm_y = std::sqrt(std::max(0.0, ny2));
      c.dist = r;
      c.divergence = PairDivergence(c.noise, c.norm_x, c.norm_y, c.dist, c.alpha, c.d);
      ++rep.pairs;
      const double ratio = c.divergence / c.bound;
      if (!(c.divergence <= c.bound)) ++rep.violations;
      if (!(ratio <= rep.max_ratio)) {
        rep.max_ratio = ratio;
        rep.worst = c;
      }
    }
  }
  return rep;
}

struct NonVacuityRow {
  double eta = 0, gamma = 0, alpha = 0;
  double bound = 0;
  double divergence = 0;
  double ratio = 0;
};

/// d = 1, R_rel = 0, sigma2 = 0: maximize the divergence over the feasible
/// segment y in [1 - eta/(1+eta), 1 + eta] around x = 1 by golden section
/// on each side, and compare with the bound.
inline NonVacuityRow NonVacuity(double eta, double gamma, double alpha) {
  NonVacuityRow row{eta, gamma, alpha, 0, 0, 0};
  const RelativeSensitivity sens{eta, 0};
  const RgmNoise noise{gamma, 0};
  row.bound = RgmRdpEpsilon(sens, gamma, alpha, 1).epsilon;
  auto neg_div = [&](double y) {
    return -PairDivergence(noise, 1.0, std::abs(y), std::abs(1 - y), alpha, 1);
  };
  const double lo = 1 - eta / (1 + eta), hi = 1 + eta;
  const auto up = rgm::detail::GoldenSection(neg_div, 1.0, hi);
  const auto down = rgm::detail::GoldenSection(neg_div, lo, 1.0);
  row.divergence = std::max({-up.value, -down.value, -neg_div(lo), -neg_div(hi)});
  row.ratio = row.divergence / row.bound;
  return row;
}

// ---------------------------------------------------------------------------
// Delta_+ against exhaustive subset minimization.

/// min |I| over subsets with sum_{i in I} s_i >= n, by enumeration of all
/// 2^n subsets (n <= 20). Scores use an LU solve, the positive-definiteness
/// rule is the same as the production code's.
inline std::size_t DeltaPlusBruteForce(const FeatureDataset& data,
                                       const QuadraticModel& model,
                                       const ClipShape& shape, double rho) {
  const auto n = data.size();
  rgm::detail::Require(n <= 20, "n <= 20 for enumeration");
  const Eigen::MatrixXd m = model.a - rho * shape.c;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_m(m, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_a(model.a, Eigen::EigenvaluesOnly);
  if (es_m.eigenvalues().minCoeff() <= 1e-9 * es_a.eigenvalues().maxCoeff()) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  std::vector<double> s(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) s[i] = data.x.col(i).dot(lu.solve(data.x.col(i)));
  std::size_t best = kInfiniteMargin;
  const std::uint32_t full = 1u << n;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k >= best) continue;
    double sum = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask >> i & 1u) sum += s[i];
    if (sum >= static_cast<double>(n) * (1 - 1e-12)) best = k;
  }
  return best;
}

struct DeltaPlusInstance {
  FeatureDataset data;
  QuadraticModel model;
  ClipShape shape;
  double rho = 0;
};

/// Random instance with n <= 12, d <= 4. `kind` 0 aims at a finite margin,
/// 1 at a matrix A - rho C that is not positive definite, 2 at an empty
/// minimization (large regularization).
inline DeltaPlusInstance RandomDeltaPlusInstance(SeededRng& rng, int kind) {
  DeltaPlusInstance inst;
  const auto d = static_cast<Eigen::Index>(1 + rng.UniformIndex(4));
  const auto n = static_cast<Eigen::Index>(2 + rng.UniformIndex(11));
  inst.data.x.resize(d, n);
  inst.data.y = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double scale = detail::LogUniform(rng, 0.2, 5);
    for (Eigen::Index i = 0; i < d; ++i) inst.data.x(i, j) = scale * rng.StandardNormal();
  }
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.StandardNormal();
  inst.shape.c = g * g.transpose() / static_cast<double>(d) +
                 0.2 * Eigen::MatrixXd::Identity(d, d);
  inst.shape.r_c = 1;
  const Eigen::MatrixXd cov = inst.data.x * inst.data.x.transpose() / static_cast<double>(n);
  const double mu = kind == 2 ? (5 + 20 * rng.Uniform()) * std::max(1.0, cov.norm())
                              : 1e-3 * rng.Uniform();
  inst.model = BuildQuadratic(inst.data, mu);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      inst.model.a, inst.shape.c, Eigen::EigenvaluesOnly);
  const double rho_max = ges.eigenvalues().minCoeff();
  switch (kind) {
    case 1: inst.rho = rho_max * (1.05 + 2 * rng.Uniform()); break;
    case 2: inst.rho = rho_max * (0.01 + 0.2 * rng.Uniform()); break;
    default: inst.rho = rho_max * (0.05 + 0.9 * rng.Uniform()); break;
  }
  return inst;
}

struct DeltaPlusReport {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  std::size_t zero = 0, finite = 0, infinite = 0;
};

inline DeltaPlusReport DeltaPlusExhaustive(std::size_t instances,
                                           std::uint64_t seed) {
  SeededRng rng(seed, DeriveStream("verify-delta-plus", 0, 0));
  DeltaPlusReport rep;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = RandomDeltaPlusInstance(rng, static_cast<int>(k % 3));
    const auto greedy = DeltaPlus(inst.data, inst.model, inst.shape, inst.rho);
    const auto exact = DeltaPlusBruteForce(inst.data, inst.model, inst.shape, inst.rho);
    ++rep.instances;
    if (greedy != exact) ++rep.mismatches;
    if (exact == 0) ++rep.zero;
    else if (exact == kInfiniteMargin) ++rep.infinite;
    else ++rep.finite;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// gaussian_rho against Monte Carlo.

struct RhoRow {
  int d = 0;
  double c = 0;  // R_c^2
  double closed_form = 0;
  double mc_mean = 0;
  double mc_se = 0;
  double z() const { return mc_se > 0 ? (mc_mean - closed_form) / mc_se : 0; }
};

inline RhoRow RhoMonteCarlo(int d, double c, std::size_t samples,
                            std::uint64_t seed) {
  SeededRng rng(seed, DeriveStream("verify-rho", static_cast<std::uint64_t>(d),
                                   static_cast<std::uint64_t>(c * 1000)));
  double sum = 0, sum_sq = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    double q = 0;
    for (int i = 0; i < d; ++i) {
      const double z = rng.StandardNormal();
      q += z * z;
    }
    const double v = std::min(q, c) / (2.0 * d);
    sum += v;
    sum_sq += v * v;
  }
  const double ns = static_cast<double>(samples);
  RhoRow row;
  row.d = d;
  row.c = c;
  row.closed_form = GaussianRho(d, std::sqrt(c));
  row.mc_mean = sum / ns;
  row.mc_se = std::sqrt(std::max(0.0, sum_sq / ns - row.mc_mean * row.mc_mean) / (ns - 1));
  // Floor at the resolution of one sample, c / (2d) / ns.
  row.mc_se = std::max(row.mc_se, c / (2.0 * d) / ns);
  return row;
}

/// The grid d in {1, 2, 5, 10}, R_c^2 in {1, d, 2d, 100d}.
inline std::vector<RhoRow> RhoGrid(std::size_t samples, std::uint64_t seed) {
  std::vector<RhoRow> rows;
  for (int d : {1, 2, 5, 10}) {
    for (double c : {1.0, 1.0 * d, 2.0 * d, 100.0 * d}) {
      rows.push_back(RhoMonteCarlo(d, c, samples, seed));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Utility bounds against Monte Carlo runs of private GD.

struct UtilityReport {
  int seeds = 0, iters = 0;
  double gamma = 0, sigma2 = 0, tau = 0;
  /// Largest (mean - bound) / standard error over t, and the t reaching it.
  double worst_z_strong = -std::numeric_limits<double>::infinity();
  int worst_t_strong = 0;
  double worst_z_convex = -std::numeric_limits<double>::infinity();
  int worst_t_convex = 0;
  int violations_strong = 0;  // t with mean > bound + 4 SE
  int violations_convex = 0;
};

/// Quadratic with the given spectrum in a random orthonormal basis and a
/// linear term lying in the range of A.
inline QuadraticModel SpectrumQuadratic(const std::vector<double>& spectrum,
                                        SeededRng& rng) {
  const auto d = static_cast<Eigen::Index>(spectrum.size());
  const Eigen::MatrixXd q = detail::RandomOrthogonal(rng, d);
  const Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(spectrum.data(), d);
  QuadraticModel m;
  m.a = q * ev.asDiagonal() * q.transpose();
  m.a = 0.5 * (m.a + m.a.transpose());
  Eigen::VectorXd w(d);
  for (Eigen::Index i = 0; i < d; ++i) w[i] = rng.StandardNormal();
  m.b = m.a * w;
  m.n = 1;
  return m;
}

/// d = 5, mu = 0.5, L = 2 (strongly convex check) and a rank-deficient
/// instance with the same L (convex check on averaged iterates). Noise
/// comes from GammaForTarget(eta = R_rel = 0.01, alpha = 2, eps* = 1), the
/// step size from the theorem mode.
inline UtilityReport UtilityMonteCarlo(int seeds, int iters, std::uint64_t seed) {
  constexpr int d = 5;
  constexpr double mu = 0.5, l_smooth = 2;
  SeededRng setup(seed, DeriveStream("verify-utility", 0, 0));
  const QuadraticModel strong = SpectrumQuadratic({0.5, 0.875, 1.25, 1.625, 2}, setup);
  const QuadraticModel flat = SpectrumQuadratic({0, 0.5, 1, 1.5, 2}, setup);
  const RgmNoise noise = GammaForTarget({0.01, 0.01}, 2, 1.0);
  const RgmNoise eff = EffectiveNoise(noise, d);

  UtilityReport rep;
  rep.seeds = seeds;
  rep.iters = iters;
  rep.gamma = noise.gamma;
  rep.sigma2 = noise.sigma2;
  rep.tau = DefaultStepSize(l_smooth, noise.gamma, d, StepSizeMode::kTheorem);

  auto run_all = [&](const QuadraticModel& model, bool averaged) {
    std::vector<double> sum(iters + 1, 0.0), sum_sq(iters + 1, 0.0);
    const Eigen::VectorXd star = model.Minimizer();
    for (int s = 0; s < seeds; ++s) {
      GdConfig cfg;
      cfg.tau = rep.tau;
      cfg.iters = iters;
      cfg.theta0 = Eigen::VectorXd::Zero(d);
      cfg.noise = noise;
      cfg.rng = SeededRng(seed, DeriveStream("verify-utility-run", averaged, s));
      cfg.theta_star = star;
      const Trajectory tr = PrivateGd(model, cfg);
      const auto& series = averaged ? tr.averaged_gap : tr.dist_sq;
      for (int t = 0; t <= iters; ++t) {
        sum[t] += series[t];
        sum_sq[t] += series[t] * series[t];
      }
    }
    const double dist0 = star.squaredNorm();
    for (int t = averaged ? 1 : 0; t <= iters; ++t) {
      const double mean = sum[t] / seeds;
      const double var = std::max(0.0, sum_sq[t] / seeds - mean * mean) * seeds / (seeds - 1);
      const double se = std::sqrt(var / seeds);
      const double bound =
          averaged ? ConvexUtilityBound(t, rep.tau, eff.sigma2, dist0)
                   : StronglyConvexUtilityBound(t, rep.tau, mu, eff.sigma2, dist0);
      const double excess = mean - bound;
      const double z = se > 0 ? excess / se
                              : (excess > 0 ? std::numeric_limits<double>::infinity()
                                            : -std::numeric_limits<double>::infinity());
      double& worst = averaged ? rep.worst_z_convex : rep.worst_z_strong;
      int& worst_t = averaged ? rep.worst_t_convex : rep.worst_t_strong;
      if (z > worst) {
        worst = z;
        worst_t = t;
      }
      if (excess > 4 * se) ++(averaged ? rep.violations_convex : rep.violations_strong);
    }
  };
  run_all(strong, false);
  run_all(flat, true);
  return rep;
}

// ---------------------------------------------------------------------------
// Relative sensitivity against brute-force neighbouring datasets.

struct Def2Report {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // ||g - g'||^2 / (eta^2 min(||g||^2, ||g'||^2) + R^2)
};

/// Replaces one record of the clipped data by an adversarial or random
/// admissible record (clip score <= R_c, ||x y|| <= the label bound), and
/// compares full gradients at random parameters spread over many scales.
inline Def2Report CheckRelativeSensitivity(const FeatureDataset& clipped,
                                           const QuadraticModel& model,
                                           const ClipShape& shape, ClipMode mode,
                                           const Certificate& cert, int pairs,
                                           int thetas, SeededRng& rng) {
  const auto d = clipped.dim();
  const auto n = clipped.size();
  const double nd = static_cast<double>(n);
  const auto c_factor = linalg::SpdFactor(shape.c);
  double label_bound = cert.b_clip;
  if (!std::isfinite(label_bound)) {
    label_bound = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      label_bound = std::max(label_bound, clipped.x.col(j).norm() * std::abs(clipped.y[j]));
  }
  const Eigen::VectorXd star = model.Minimizer();
  const double eta2 = cert.eta * cert.eta, r2 = cert.r_rel * cert.r_rel;

  Def2Report rep;
  for (int p = 0; p < pairs; ++p) {
    const auto i = static_cast<Eigen::Index>(rng.UniformIndex(static_cast<std::uint64_t>(n)));
    Eigen::VectorXd xn;
    const double pick = rng.Uniform();
    if (pick < 0.4) {
      xn = detail::RandomUnit(rng, d);  // on the clip boundary
      xn *= shape.r_c / ClipScore(xn, c_factor, mode);
    } else if (pick < 0.7) {
      const auto j = static_cast<Eigen::Index>(rng.UniformIndex(static_cast<std::uint64_t>(n)));
      xn = -clipped.x.col(j);
    } else {
      xn = Eigen::VectorXd(d);
      for (Eigen::Index k = 0; k < d; ++k) xn[k] = rng.StandardNormal();
      const Eigen::VectorXd l = Eigen::LLT<Eigen::MatrixXd>(shape.c).matrixL() * xn;
      xn = l;
      const double score = ClipScore(xn, c_factor, mode);
      if (score > shape.r_c) xn *= shape.r_c / score;
    }
    double yn = 0;
    const double xnorm = xn.norm();
    if (xnorm > 0) {
      const double mag = rng.Uniform() < 0.5 ? 1.0 : rng.Uniform();
      yn = (rng.Uniform() < 0.5 ? -1 : 1) * mag * label_bound / xnorm;
    }
    const Eigen::VectorXd xo = clipped.x.col(i);
    const double yo = clipped.y[i];
    const Eigen::MatrixXd a2 = model.a + (xn * xn.transpose() - xo * xo.transpose()) / nd;
    const Eigen::VectorXd b2 = model.b + (xn * yn - xo * yo) / nd;

    for (int k = 0; k <= thetas; ++k) {
      Eigen::VectorXd theta = star;
      if (k > 0) {
        const double scale = detail::LogUniform(rng, 1e-4, 1e4) * (1 + star.norm());
        for (Eigen::Index q = 0; q < d; ++q) theta[q] += scale * rng.StandardNormal();
      }
      const Eigen::VectorXd g = model.a * theta - model.b;
      const Eigen::VectorXd g2 = a2 * theta - b2;
      const double lhs = (g - g2).squaredNorm();
      const double rhs = eta2 * std::min(g.squaredNorm(), g2.squaredNorm()) + r2;
      ++rep.checks;
      const double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (lhs > rhs * (1 + 1e-12)) ++rep.violations;
    }
  }
  return rep;
}

}  // namespace rgm::verify
