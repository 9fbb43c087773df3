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

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "rgm/rgm.hpp"

namespace rgm {
namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

// Reference values below were produced with mpmath at 50 digits.
constexpr double kAlphaMaxEta01 = 5.7619047619047619047619;
constexpr double kRdpExample = 0.012308044703541177671;
constexpr double kMironovExample = 6.2564627324851142100;
constexpr double kDivergenceExample = 0.47717436955922379705;
constexpr double kAccountExample = 0.87014673572318505893;

double RelErr(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

TEST(AlphaMax, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(AlphaMax({1.0, 0}), 4.0 / 3.0);
  EXPECT_LT(RelErr(AlphaMax({0.1, 0}), kAlphaMaxEta01), 1e-15);
  EXPECT_TRUE(std::isinf(AlphaMax({0.0, 0})));
}

TEST(AlphaMax, DecreasingAndDivergingAtZero) {
  double prev = std::numeric_limits<double>::infinity();
  for (double eta = 1e-8; eta < 10; eta *= 1.7) {
    const double a = AlphaMax({eta, 0});
    EXPECT_LT(a, prev);
    prev = a;
  }
  EXPECT_GT(AlphaMax({1e-8, 0}), 1e7);
}

TEST(AlphaMax, RejectsNegativeEta) {
  EXPECT_THROW(AlphaMax({-0.1, 0}), DomainError);
}

TEST(MinBaselineVariance, Examples) {
  EXPECT_EQ(MinBaselineVariance({0.1, 0}, 0.01, 2), 0.0);
  EXPECT_LT(RelErr(MinBaselineVariance({0.1, 1}, 0.01, 2), 0.9), 1e-14);
}

TEST(MinBaselineVariance, ImpliesNoiseRatioThreshold) {
  SeededRng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const double eta = std::exp(std::log(1e-4) + rng.Uniform() * std::log(3e3));
    const RelativeSensitivity sens{eta, 0.01 + rng.Uniform()};
    const double alpha = 1 + (AlphaMax(sens) - 1) * (0.001 + 0.998 * rng.Uniform());
    const double gamma = std::exp(std::log(1e-6) + rng.Uniform() * std::log(1e8));
    const double threshold = gamma * (1 + 1 / eta) / (2 * eta + eta * eta) *
                         sens.r_rel * sens.r_rel;
    EXPECT_GE(MinBaselineVariance(sens, gamma, alpha), threshold * (1 - 1e-12));
  }
}

TEST(MinBaselineVariance, AlphaOutOfRange) {
  EXPECT_THROW(MinBaselineVariance({0.1, 1}, 0.01, 1.0), DomainError);
  EXPECT_THROW(MinBaselineVariance({0.1, 1}, 0.01, AlphaMax({0.1, 1})), DomainError);
}

TEST(RgmRdpEpsilon, PinnedExample) {
  EXPECT_LT(RelErr(RgmRdpEpsilon({0.01, 0}, 0.01, 2, 5).epsilon, kRdpExample), 1e-13);
}

TEST(RgmRdpEpsilon, VanishesAsEtaShrinks) {
  double prev = std::numeric_limits<double>::infinity();
  for (double eta = 1e-2; eta > 1e-9; eta /= 10) {
    const double e = RgmRdpEpsilon({eta, 0}, 0.01, 2, 5).epsilon;
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 1e-14);
}

TEST(RgmRdpEpsilon, FloorOverGammaGrid) {
  SeededRng rng(5);
  for (int k = 0; k < 50; ++k) {
    const double eta = std::exp(std::log(1e-4) + rng.Uniform() * std::log(3e3));
    const RelativeSensitivity sens{eta, 0};
    const double alpha = 1 + (AlphaMax(sens) - 1) * rng.Uniform();
    const int d = 1 + static_cast<int>(rng.UniformIndex(50));
    const double floor = 2 * alpha * eta * eta * d;
    for (double gamma = 1e-6; gamma <= 1e6; gamma *= 3) {
      EXPECT_GE(RgmRdpEpsilon(sens, gamma, alpha, d).epsilon, floor);
    }
  }
}

TEST(RgmRdpEpsilon, MonotoneInAlphaDimensionEta) {
  SeededRng rng(9);
  for (int k = 0; k < 500; ++k) {
    const double eta = 1e-3 + 0.3 * rng.Uniform();
    const double gamma = std::exp(std::log(1e-4) + rng.Uniform() * std::log(1e6));
    const int d = 1 + static_cast<int>(rng.UniformIndex(20));
    const double alpha = 1 + (AlphaMax({eta, 0}) - 1) * 0.9 * rng.Uniform() + 1e-6;
    const double base = RgmRdpEpsilon({eta, 0}, gamma, alpha, d).epsilon;
    const double h = 1e-4;
    EXPECT_GE(RgmRdpEpsilon({eta, 0}, gamma, alpha + h * (alpha - 1), d).epsilon, base);
    EXPECT_GE(RgmRdpEpsilon({eta, 0}, gamma, alpha, d + 1).epsilon, base);
    if (alpha < AlphaMax({eta * (1 + h), 0})) {
      EXPECT_GE(RgmRdpEpsilon({eta * (1 + h), 0}, gamma, alpha, d).epsilon, base);
    }
  }
}

TEST(RgmRdpEpsilon, RejectsAlphaAtMaximum) {
  const RelativeSensitivity sens{0.1, 0};
  EXPECT_THROW(RgmRdpEpsilon(sens, 1, AlphaMax(sens), 3), DomainError);
  EXPECT_THROW(RgmRdpEpsilon(sens, 1, AlphaMax(sens) + 1, 3), DomainError);
}

TEST(RdpEpsilon, EtaZeroRoutesToGaussianMechanism) {
  const auto p = RdpEpsilon({0.0, 2.0}, {0, 4.0}, 3, 7);
  EXPECT_DOUBLE_EQ(p.epsilon, 3 * 4.0 / (2 * 4.0));
  EXPECT_THROW(RdpEpsilon({0.0, 2.0}, {0.1, 4.0}, 3, 7), DomainError);
}

TEST(RdpEpsilon, RequiresBaselineVariance) {
  const RelativeSensitivity sens{0.1, 1};
  EXPECT_THROW(RdpEpsilon(sens, {0.01, 0.5}, 2, 3), DomainError);
  EXPECT_NO_THROW(RdpEpsilon(sens, {0.01, 0.9}, 2, 3));
}

// 50-digit evaluation of the closed forms on pinned configurations.
TEST(ClosedForms, AgreeWithFiftyDigitEvaluation) {
  SeededRng rng(2024);
  for (int k = 0; k < 20; ++k) {
    const double eta_d = std::exp(std::log(1e-4) + rng.Uniform() * std::log(3e3));
    const double gamma_d = std::exp(std::log(1e-5) + rng.Uniform() * std::log(1e7));
    const double r_d = rng.Uniform();
    const int d = 1 + static_cast<int>(rng.UniformIndex(16));
    const RelativeSensitivity sens{eta_d, r_d};
    const double alpha_d = 1 + (AlphaMax(sens) - 1) * (0.05 + 0.9 * rng.Uniform());

    const Big eta(eta_d), gamma(gamma_d), alpha(alpha_d), r(r_d), dd(d);
    const Big amax = (1 + eta) * (1 + eta) / (eta * (2 + eta));
    const Big spread = (2 + eta) * (2 + eta) * (1 + eta) * (1 + eta);
    const Big eps = alpha * eta * eta / (2 * gamma) * (1 + gamma * dd * spread) /
                    (1 - eta * (alpha - 1) * (2 + eta));
    const Big sigma2 = gamma / (eta * eta) * (1 - eta * (alpha - 1)) * r * r;
    const Big tc_rho = eta * eta * (1 / gamma + dd * spread);

    EXPECT_LT(RelErr(AlphaMax(sens), amax.convert_to<double>()), 1e-14) << k;
    EXPECT_LT(RelErr(RgmRdpEpsilon(sens, gamma_d, alpha_d, d).epsilon,
                     eps.convert_to<double>()),
              1e-11)
        << k;
    if (r_d > 0) {
      EXPECT_LT(RelErr(MinBaselineVariance(sens, gamma_d, alpha_d),
                       sigma2.convert_to<double>()),
                1e-11)
          << k;
    }
    EXPECT_LT(RelErr(TcdpParams(sens, gamma_d, d).rho, tc_rho.convert_to<double>()),
              1e-13)
        << k;
  }
}

TEST(RdpToDp, Examples) {
  EXPECT_NEAR(RdpToDp({2, 0}, std::exp(-1.0)).epsilon, 1.0, 1e-15);
  EXPECT_LT(RelErr(RdpToDp({3, 0.5}, 1e-5).epsilon, kMironovExample), 1e-14);
}

TEST(RdpToDp, NonincreasingInDelta) {
  double prev = std::numeric_limits<double>::infinity();
  for (double delta = 1e-12; delta < 1; delta *= 2) {
    const double e = RdpToDp({2.5, 0.3}, delta).epsilon;
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(RdpToDp, DeltaDomain) {
  EXPECT_THROW(RdpToDp({2, 0}, 0), DomainError);
  EXPECT_THROW(RdpToDp({2, 0}, 1), DomainError);
  EXPECT_THROW(RdpToDp({2, 0}, 1.5), DomainError);
}

TEST(DpGuaranteeClosedForm, AccountExample) {
  const double eta = 1e-3;
  const auto dp = DpGuaranteeClosedForm({eta, 0}, 100 * eta * eta, 10, 1e-8);
  EXPECT_GE(dp.epsilon, 0.85);
  EXPECT_LE(dp.epsilon, 0.88);
  EXPECT_LT(RelErr(dp.epsilon, kAccountExample), 1e-13);
}

TEST(DpGuaranteeClosedForm, DeltaOneGivesChi) {
  const double eta = 0.05, gamma = 0.3;
  const int d = 4;
  const double spread = std::pow((2 + eta) * (1 + eta), 2);
  const double chi = eta * eta / gamma + eta * eta * spread * d;
  EXPECT_NEAR(DpGuaranteeClosedForm({eta, 0}, gamma, d, 1.0).epsilon, chi, 1e-15);
}

TEST(DpGuaranteeClosedForm, PreconditionNamesBothBranches) {
  try {
    DpGuaranteeClosedForm({0.01, 0}, 10.0, 1, 1e-8);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("gamma <="), std::string::npos);
    EXPECT_NE(what.find("d >="), std::string::npos);
  }
}

TEST(OptimizeAlphaNumeric, AccountExampleNumericOptimum) {
  const double eta = 1e-3;
  const RelativeSensitivity sens{eta, 0};
  const auto opt = OptimizeAlphaNumeric(sens, 100 * eta * eta, 10, 1e-8);
  EXPECT_GT(opt.alpha, 1);
  EXPECT_LT(opt.alpha, AlphaMax(sens));
  // 50-digit minimum of the Mironov bound over alpha.
  EXPECT_NEAR(opt.dp.epsilon, 0.65068, 5e-6);
  EXPECT_LE(opt.dp.epsilon,
            DpGuaranteeClosedForm(sens, 100 * eta * eta, 10, 1e-8).epsilon);
}

TEST(OptimizeAlphaNumeric, NeverAboveClosedFormAndMatchesGridScan) {
  SeededRng rng(77);
  int compared = 0;
  while (compared < 100) {
    const double eta = std::exp(std::log(1e-4) + rng.Uniform() * std::log(1e3));
    const int d = 1 + static_cast<int>(rng.UniformIndex(64));
    const double delta = std::exp(std::log(1e-10) + rng.Uniform() * std::log(1e8));
    const double gamma = eta * eta * std::exp(std::log(1.0) + rng.Uniform() * std::log(1e4));
    const RelativeSensitivity sens{eta, 0};
    DpPoint closed;
    try {
      closed = DpGuaranteeClosedForm(sens, gamma, d, delta);
    } catch (const PreconditionError&) {
      continue;
    }
    ++compared;
    const auto opt = OptimizeAlphaNumeric(sens, gamma, d, delta);
    EXPECT_LE(opt.dp.epsilon, closed.epsilon * (1 + 1e-12));
    EXPECT_GT(opt.alpha, 1);
    EXPECT_LT(opt.alpha, AlphaMax(sens));
    const double amax = AlphaMax(sens);
    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 1000; ++i) {
      const double alpha = 1 + (amax - 1) * i / 1000.0;
      grid_best = std::min(
          grid_best, RdpToDp(RgmRdpEpsilon(sens, gamma, alpha, d), delta).epsilon);
    }
    EXPECT_LE(opt.dp.epsilon, grid_best * (1 + 1e-9));
  }
}

TEST(OptimizeGamma, InfeasibleBelowFloor) {
  const RelativeSensitivity sens{1e-3, 0};
  const double floor = EpsilonFloor(sens, 10, 1e-8);
  const auto cal = OptimizeGamma(sens, 10, {floor * 0.99, 1e-8});
  EXPECT_FALSE(cal.feasible);
  EXPECT_DOUBLE_EQ(cal.epsilon_floor, floor);
  for (double gamma = 1e-6; gamma < 1e8; gamma *= 10) {
    EXPECT_GE(OptimizeAlphaNumeric(sens, gamma, 10, 1e-8).dp.epsilon, floor * (1 - 1e-9));
  }
}

TEST(OptimizeGamma, DoubleExampleTargetOrdering) {
  const double eta = 1e-3;
  const RelativeSensitivity sens{eta, 0};
  const double target = 2 * DpGuaranteeClosedForm(sens, 100 * eta * eta, 10, 1e-8).epsilon;
  const auto cal = OptimizeGamma(sens, 10, {target, 1e-8});
  ASSERT_TRUE(cal.feasible);
  EXPECT_LE(cal.epsilon, target);
  // A looser target allows a smaller gamma than the reference example.
  EXPECT_LE(cal.gamma, 100 * eta * eta);
  // Grid oracle over (gamma, alpha): nothing smaller than the returned gamma
  // meets the target.
  for (double g = cal.gamma * 0.9; g > cal.gamma * 1e-3; g *= 0.9) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 2000; ++i) {
      const double alpha = 1 + (AlphaMax(sens) - 1) * i / 2000.0;
      best = std::min(best, RdpToDp(RgmRdpEpsilon(sens, g, alpha, 10), 1e-8).epsilon);
    }
    EXPECT_GT(best, target);
  }
  const auto round_trip = OptimizeAlphaNumeric(sens, cal.gamma, 10, 1e-8);
  EXPECT_LE(round_trip.dp.epsilon, target);
}

TEST(GammaForTarget, Examples) {
  const auto noise = GammaForTarget({0.1, 0}, 2, 0.01);
  EXPECT_NEAR(noise.gamma, 1.0, 1e-15);
  EXPECT_EQ(noise.sigma2, 0.0);
  const auto with_r = GammaForTarget({0.1, 0.5}, 2, 0.01);
  EXPECT_NEAR(with_r.sigma2, 1.0 * 0.25 / 0.01, 1e-12);
}

TEST(GammaForTarget, DecompositionMatchesRdp) {
  SeededRng rng(3);
  for (int k = 0; k < 200; ++k) {
    const double eta = 1e-3 + 0.2 * rng.Uniform();
    const RelativeSensitivity sens{eta, rng.Uniform()};
    const double alpha = 1 + (AlphaMax(sens) - 1) * 0.95 * rng.Uniform() + 1e-6;
    const double eps_star = std::exp(std::log(1e-3) + rng.Uniform() * std::log(1e3));
    const int d = 1 + static_cast<int>(rng.UniformIndex(30));
    const auto noise = GammaForTarget(sens, alpha, eps_star);
    const double eps = RgmRdpEpsilon(sens, noise.gamma, alpha, d).epsilon;
    const double leak = eta * (alpha - 1) * (2 + eta);
    const double spread = std::pow((2 + eta) * (1 + eta), 2);
    const double want = eps_star / (1 - leak) +
                        alpha * d * eta * eta * spread / (2 * (1 - leak));
    EXPECT_LT(RelErr(eps, want), 1e-12);
    const auto terms = DecomposePrivacyLoss(sens, alpha, eps_star, d);
    EXPECT_LT(RelErr(terms.total(), want), 1e-12);
  }
}

TEST(Tcdp, Example) {
  const auto tc = TcdpParams({1, 0}, 1, 1);
  EXPECT_DOUBLE_EQ(tc.rho, 37);
  EXPECT_DOUBLE_EQ(tc.omega, 1 + 1.0 / 6);
}

TEST(Tcdp, OmegaDivergesAsEtaShrinks) {
  double prev = 0;
  for (double eta = 0.5; eta > 1e-8; eta /= 10) {
    const double w = TcdpParams({eta, 0}, 1, 1).omega;
    EXPECT_GT(w, prev);
    prev = w;
  }
  EXPECT_GT(prev, 1e6);
}

// The alpha-free pair beats the smooth-sensitivity pair at d = 1 exactly
// below a crossover found here by bisection; the headline pair never does.
TEST(Tcdp, SmoothSensitivityComparison) {
  auto gap = [](double eta) {
    return TcdpParamsAlphaFree({eta, 0}, 1, 1).rho - SmoothSensitivityTcdpParams({eta, 0}, 1).rho;
  };
  double lo = 1e-3, hi = 5;
  ASSERT_LT(gap(lo), 0);
  ASSERT_GT(gap(hi), 0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 2 * std::sqrt(2.0) - 2, 1e-9);
  // Factor-two improvement of the d-term in the small-eta limit.
  const double eta = 1e-4;
  const double ours = TcdpParamsAlphaFree({eta, 0}, 1, 1).rho - 1 * eta * eta;
  const double gss = SmoothSensitivityTcdpParams({eta, 0}, 1).rho - eta * eta;
  EXPECT_NEAR(gss / ours, 2, 1e-3);
  for (double e = 1e-4; e < 1; e *= 1.5) {
    EXPECT_GT(TcdpParams({e, 0}, 1, 1).rho, SmoothSensitivityTcdpParams({e, 0}, 1).rho);
  }
}

TEST(GaussianRenyiDivergence, IdenticalDistributions) {
  EXPECT_EQ(GaussianRenyiDivergence(0, 2, 2, 3, 5), 0.0);
}

TEST(GaussianRenyiDivergence, EqualVarianceRecoversGaussianMechanism) {
  EXPECT_DOUBLE_EQ(GaussianRenyiDivergence(1, 1, 1, 2, 3), 1.0);
}

TEST(GaussianRenyiDivergence, PinnedExample) {
  EXPECT_LT(RelErr(GaussianRenyiDivergence(1, 1, 2, 2, 1), kDivergenceExample), 1e-14);
}

double RenyiIntegral(double mu, double s1, double s2, double alpha) {
  boost::math::quadrature::sinh_sinh<double> integrator;
  auto f = [&](double x) {
    const double lp = -0.5 * x * x / s1 - 0.5 * std::log(2 * M_PI * s1);
    const double lq = -0.5 * (x - mu) * (x - mu) / s2 - 0.5 * std::log(2 * M_PI * s2);
    return std::exp(alpha * lp + (1 - alpha) * lq);
  };
  return std::log(integrator.integrate(f)) / (alpha - 1);
}

TEST(GaussianRenyiDivergence, AgreesWithNumericalIntegration) {
  SeededRng rng(31);
  int checked = 0;
  while (checked < 40) {
    const double s1 = 0.2 + 3 * rng.Uniform();
    const double s2 = 0.2 + 3 * rng.Uniform();
    const double alpha = 1.05 + 4 * rng.Uniform();
    if (alpha * s2 + (1 - alpha) * s1 <= 0.05 * s1) continue;
    const double mu = 3 * rng.Uniform();
    ++checked;
    const double exact = GaussianRenyiDivergence(mu, s1, s2, alpha, 1);
    const double numeric = RenyiIntegral(mu, s1, s2, alpha);
    EXPECT_LT(std::abs(exact - numeric), 1e-6 * std::max(1.0, std::abs(numeric)))
        << "mu=" << mu << " s1=" << s1 << " s2=" << s2 << " alpha=" << alpha;
  }
}

TEST(GaussianRenyiDivergence, NonpositiveMixedVariance) {
  EXPECT_THROW(GaussianRenyiDivergence(1, 4, 1, 2, 1), DomainError);
}

TEST(NoiseRatioBounds, Examples) {
  const auto same = NoiseRatioBounds({0.5, 0}, {1, 0.1}, 3, 3);
  EXPECT_TRUE(same.holds);
  const auto half = NoiseRatioBounds({0.5, 0}, {1, 0}, 1, 1);
  EXPECT_NEAR(half.lower, 4.0 / 9, 1e-15);
  EXPECT_NEAR(half.upper, 9.0 / 4, 1e-15);
  EXPECT_THROW(NoiseRatioBounds({0.5, 1}, {1, 0}, 1, 1), PreconditionError);
}

TEST(NoiseRatioBounds, BoundarySaturatingPairs) {
  SeededRng rng(17);
  for (int k = 0; k < 10000; ++k) {
    const double eta = std::exp(std::log(1e-4) + rng.Uniform() * std::log(3e3));
    const double r = rng.Uniform() < 0.2 ? 0 : std::exp(std::log(1e-3) + rng.Uniform() * std::log(1e3));
    const RelativeSensitivity sens{eta, r};
    const double gamma = std::exp(std::log(1e-6) + rng.Uniform() * std::log(1e8));
    const double sigma2 = gamma * (1 + 1 / eta) / (2 * eta + eta * eta) * r * r;
    const double s = (r > 0 ? r : 1) * std::exp(std::log(1e-4) + rng.Uniform() * std::log(1e8));
    const double cos_phi = 2 * rng.Uniform() - 1;
    const double step = verify::SaturatingStep(s, cos_phi, eta, r);
    const double ny2 = std::max(0.0, s * s + 2 * s * step * cos_phi + step * step);
    const double lhs = step * step;
    ASSERT_LE(lhs, (eta * eta * std::min(s * s, ny2) + r * r) * (1 + 1e-9));
    EXPECT_TRUE(NoiseRatioBounds(sens, {gamma, sigma2}, s * s, ny2).holds)
        << "eta=" << eta << " r=" << r << " s=" << s;
  }
}

}  // namespace
}  // namespace rgm
