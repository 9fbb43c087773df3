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
// In-process simulator for gradient descent with local differential privacy:
// every node privatizes its own full gradient, the server averages.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rgm/accountant.hpp"
#include "rgm/errors.hpp"
#include "rgm/linalg.hpp"
#include "rgm/mechanisms.hpp"
#include "rgm/optim.hpp"
#include "rgm/quadratic.hpp"
#include "rgm/rng.hpp"
#include "rgm/sensitivity.hpp"

namespace rgm {

using Json = nlohmann::json;

enum class SplitStrategy { kRandom, kLabel, kBias };

inline const char* ToString(SplitStrategy s) {
  switch (s) {
    case SplitStrategy::kRandom: return "random";
    case SplitStrategy::kLabel: return "label";
    case SplitStrategy::kBias: return "bias";
  }
  return "?";
}

inline SplitStrategy ParseSplitStrategy(const std::string& s) {
  if (s == "random") return SplitStrategy::kRandom;
  if (s == "label") return SplitStrategy::kLabel;
  if (s == "bias") return SplitStrategy::kBias;
  throw DomainError("split in {random, label, bias}, got '" + s + "'");
}

struct SplitSpec {
  SplitStrategy strategy = SplitStrategy::kRandom;
  int num_nodes = 2;
  double bias_b = 0;
  std::optional<std::int64_t> samples_per_node;
  std::uint64_t seed = 0;
};

namespace detail {

inline FeatureDataset SelectColumns(const FeatureDataset& data,
                                    const std::vector<Eigen::Index>& idx) {
  FeatureDataset out;
  out.x.resize(data.dim(), static_cast<Eigen::Index>(idx.size()));
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    out.x.col(col) = data.x.col(idx[k]);
    out.y[col] = data.y[idx[k]];
  }
  return out;
}

}  // namespace detail

/// Partition indices of each node, in node order. The label strategy returns
/// equal-size subsamples (positives to node 0, non-positives to node 1).
inline std::vector<std::vector<Eigen::Index>> SplitIndices(
    const FeatureDataset& data, const SplitSpec& spec) {
  data.Validate();
  detail::Require(spec.num_nodes >= 1, "num_nodes >= 1",
                  {{"num_nodes", static_cast<double>(spec.num_nodes)}});
  const auto n = data.size();
  const auto m = static_cast<Eigen::Index>(spec.num_nodes);
  SeededRng rng(spec.seed, DeriveStream("split", 0, 0));
  std::vector<std::vector<Eigen::Index>> parts(spec.num_nodes);

  if (spec.strategy == SplitStrategy::kLabel) {
    detail::Require(spec.num_nodes == 2, "label split uses exactly 2 nodes",
                    {{"num_nodes", static_cast<double>(spec.num_nodes)}});
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < n; ++i) (data.y[i] > 0 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) {
      throw DomainError("both label classes present",
                        {{"positives", static_cast<double>(pos.size())},
                         {"negatives", static_cast<double>(neg.size())}});
    }
    Shuffle(pos.begin(), pos.end(), rng);
    Shuffle(neg.begin(), neg.end(), rng);
    const auto avail = static_cast<std::int64_t>(std::min(pos.size(), neg.size()));
    const std::int64_t take = spec.samples_per_node.value_or(avail);
    detail::Require(take >= 1 && take <= avail,
                    "1 <= samples_per_node <= smaller class size",
                    {{"samples_per_node", static_cast<double>(take)},
                     {"smaller_class", static_cast<double>(avail)}});
    parts[0].assign(pos.begin(), pos.begin() + take);
    parts[1].assign(neg.begin(), neg.begin() + take);
    return parts;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Shuffle(order.begin(), order.end(), rng);
  if (spec.samples_per_node) {
    const std::int64_t k = *spec.samples_per_node;
    detail::Require(k >= 1 && k * m <= n, "num_nodes * samples_per_node <= n",
                    {{"samples_per_node", static_cast<double>(k)},
                     {"n", static_cast<double>(n)}});
    for (Eigen::Index i = 0; i < m; ++i) {
      parts[i].assign(order.begin() + i * k, order.begin() + (i + 1) * k);
    }
  } else {
    detail::Require(n >= m, "n >= num_nodes", {{"n", static_cast<double>(n)}});
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto lo = i * n / m, hi = (i + 1) * n / m;
      parts[i].assign(order.begin() + lo, order.begin() + hi);
    }
  }
  return parts;
}

/// The bias strategy splits at random, then shifts the labels of every node
/// after the first by +B.
inline std::vector<FeatureDataset> SplitDataset(const FeatureDataset& data,
                                                const SplitSpec& spec) {
  const auto parts = SplitIndices(data, spec);
  std::vector<FeatureDataset> out;
  out.reserve(parts.size());
  for (const auto& idx : parts) out.push_back(detail::SelectColumns(data, idx));
  if (spec.strategy == SplitStrategy::kBias) {
    for (std::size_t i = 1; i < out.size(); ++i) out[i].y.array() += spec.bias_b;
  }
  return out;
}

struct RgmPrivatizer {
  RgmNoise noise;
  Certificate certificate;
  double alpha = 0;
  double eps_star = 0;
  RdpPoint rdp;
};

using Privatizer = std::variant<std::monostate, RgmPrivatizer, ClippedGmNoise>;

struct NodeState {
  int node_id = 0;
  FeatureDataset data;
  QuadraticModel model;
  Privatizer privatizer;
  SeededRng rng{0};
};

inline NodeState MakeNode(int node_id, FeatureDataset data, double mu_reg,
                          std::uint64_t run_seed) {
  NodeState node;
  node.node_id = node_id;
  node.model = BuildQuadratic(data, mu_reg);
  node.data = std::move(data);
  node.rng = SeededRng(run_seed, DeriveStream("node", node_id, 0));
  return node;
}

/// multiplier * max_j ||grad f_ij(theta_i*)|| at the node's own optimum.
inline double AutoClipThreshold(const NodeState& node, double multiplier = 1) {
  detail::Require(multiplier > 0, "multiplier > 0", {{"multiplier", multiplier}});
  const Eigen::VectorXd local_star = linalg::SpdSolve(node.model.a, node.model.b);
  double worst = 0;
  for (Eigen::Index j = 0; j < node.data.size(); ++j) {
    worst = std::max(worst, PerSampleGradient(node.data, node.model.mu_reg, j,
                                              local_star)
                                .norm());
  }
  return multiplier * worst;
}

/// RGM privatizer calibrated by GammaForTarget from an accepted certificate.
inline RgmPrivatizer MakePrivatizerRgm(const NodeState& node, double alpha,
                                       double eps_star, const Certificate& cert) {
  if (!cert.ptr.accepted) {
    throw PreconditionError("accepted certificate",
                            {{"delta_plus", static_cast<double>(cert.ptr.delta_plus)},
                             {"threshold", cert.ptr.threshold}});
  }
  RgmPrivatizer p;
  p.certificate = cert;
  p.alpha = alpha;
  p.eps_star = eps_star;
  p.noise = GammaForTarget(cert.sensitivity(), alpha, eps_star);
  p.rdp = RgmRdpEpsilon(cert.sensitivity(), p.noise.gamma, alpha,
                        static_cast<int>(node.model.dim()));
  return p;
}

/// Clipped-GM privatizer with c = AutoClipThreshold(node, multiplier) and
/// sigma2 = alpha c^2 / (eps N^2).
inline ClippedGmNoise MakePrivatizerClipped(const NodeState& node, double alpha,
                                            double eps, double multiplier = 1) {
  const double c = AutoClipThreshold(node, multiplier);
  return {c, ClippedGmVariance(alpha, eps, c, node.data.size())};
}

struct FedRunResult {
  Trajectory trajectory;
  std::vector<std::vector<double>> per_node_noise;  // [node][t]
  Eigen::VectorXd theta_star;
  Json config_echo;
};

inline Json PrivatizerJson(const Privatizer& p) {
  if (const auto* r = std::get_if<RgmPrivatizer>(&p)) {
    const auto& c = r->certificate;
    return {{"kind", "rgm"},
            {"gamma", r->noise.gamma},
            {"sigma2", r->noise.sigma2},
            {"alpha", r->alpha},
            {"eps_star", r->eps_star},
            {"rdp", {{"alpha", r->rdp.alpha}, {"epsilon", r->rdp.epsilon}}},
            {"eta", c.eta},
            {"r_rel", c.r_rel},
            {"rho", c.rho},
            {"r_c", c.r_c},
            {"ptr",
             {{"delta_plus", c.ptr.delta_plus == kInfiniteMargin
                                 ? Json("inf")
                                 : Json(c.ptr.delta_plus)},
              {"threshold", c.ptr.threshold},
              {"accepted", c.ptr.accepted},
              {"eps", c.ptr.eps},
              {"delta", c.ptr.delta}}}};
  }
  if (const auto* g = std::get_if<ClippedGmNoise>(&p)) {
    return {{"kind", "clipped_gm"}, {"threshold", g->threshold}, {"sigma2", g->sigma2}};
  }
  return {{"kind", "none"}};
}

/// Node-wise privatized gradient at theta; returns (released, noise power).
inline std::pair<Eigen::VectorXd, double> PrivatizedGradient(
    NodeState& node, const Eigen::VectorXd& theta) {
  if (const auto* r = std::get_if<RgmPrivatizer>(&node.privatizer)) {
    const Eigen::VectorXd g = node.model.Gradient(theta);
    Eigen::VectorXd out = RelativeGaussianMechanism(g, r->noise, node.rng);
    const double power = (out - g).squaredNorm();
    return {std::move(out), power};
  }
  if (const auto* c = std::get_if<ClippedGmNoise>(&node.privatizer)) {
    const Eigen::VectorXd mean = ClippedMeanGradient(
        node.data, node.model.mu_reg, c->threshold, theta);
    Eigen::VectorXd out = GaussianMechanism(mean, c->sigma2, node.rng);
    const double power = (out - mean).squaredNorm();
    return {std::move(out), power};
  }
  return {node.model.Gradient(theta), 0.0};
}

/// theta_{t+1} = theta_t - tau * mean_i g_i(theta_t). Metrics are measured
/// against the minimizer of the matching aggregate objective (unweighted mean
/// of node objectives, or sample-count weighted when `weighted`).
inline FedRunResult RunFederated(std::vector<NodeState>& nodes, double tau,
                                 int iters, const Eigen::VectorXd& theta0,
                                 bool weighted = false) {
  detail::Require(!nodes.empty(), "at least one node");
  const auto d = nodes.front().model.dim();
  for (const auto& node : nodes) {
    detail::Require(node.model.dim() == d, "all nodes share d",
                    {{"node", static_cast<double>(node.node_id)},
                     {"d", static_cast<double>(node.model.dim())}});
  }
  detail::Require(theta0.size() == d, "dim(theta0) == d",
                  {{"dim_theta0", static_cast<double>(theta0.size())}});
  detail::Require(tau > 0, "tau > 0", {{"tau", tau}});
  detail::Require(iters >= 1, "T >= 1", {{"T", static_cast<double>(iters)}});

  std::vector<double> w(nodes.size(), 1.0 / static_cast<double>(nodes.size()));
  if (weighted) {
    double total = 0;
    for (const auto& node : nodes) total += static_cast<double>(node.data.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      w[i] = static_cast<double>(nodes[i].data.size()) / total;
  }
  QuadraticModel pooled;
  pooled.a = Eigen::MatrixXd::Zero(d, d);
  pooled.b = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    pooled.a += w[i] * nodes[i].model.a;
    pooled.b += w[i] * nodes[i].model.b;
    pooled.n += nodes[i].model.n;
  }

  FedRunResult out;
  out.theta_star = pooled.Minimizer();
  out.per_node_noise.assign(nodes.size(), {});
  detail::TrajectoryRecorder rec(pooled, out.theta_star, iters);
  Eigen::VectorXd theta = theta0;
  rec.Record(theta);
  for (int t = 0; t < iters; ++t) {
    Eigen::VectorXd step = Eigen::VectorXd::Zero(d);
    double power = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto [g, p] = PrivatizedGradient(nodes[i], theta);
      step += weighted ? Eigen::VectorXd(w[i] * g) : g;
      out.per_node_noise[i].push_back(p);
      power += p;
    }
    if (!weighted) step /= static_cast<double>(nodes.size());
    rec.RecordNoise(power);
    theta -= tau * step;
    rec.Record(theta);
  }
  out.trajectory = rec.Take();

  Json node_echo = Json::array();
  for (const auto& node : nodes) {
    node_echo.push_back({{"node_id", node.node_id},
                         {"n", node.data.size()},
                         {"mu_reg", node.model.mu_reg},
                         {"privatizer", PrivatizerJson(node.privatizer)}});
  }
  out.config_echo = {{"tau", tau},
                     {"iters", iters},
                     {"weighted", weighted},
                     {"theta0", std::vector<double>(theta0.data(), theta0.data() + d)},
                     {"nodes", node_echo}};
  return out;
}

// ---------------------------------------------------------------------------
// Experiment protocol: split a dataset across nodes, configure one
// privatization method on every node, and run federated GD with the shared
// step size 0.5 / max_i lambda_max(A_i).

enum class Method { kVanilla, kRgm, kClip, kClipHigh, kClipLow };

inline const char* ToString(Method m) {
  switch (m) {
    case Method::kVanilla: return "vanilla";
    case Method::kRgm: return "rgm";
    case Method::kClip: return "clip";
    case Method::kClipHigh: return "clip_high";
    case Method::kClipLow: return "clip_low";
  }
  return "?";
}

inline Method ParseMethod(const std::string& s) {
  for (Method m : {Method::kVanilla, Method::kRgm, Method::kClip,
                   Method::kClipHigh, Method::kClipLow}) {
    if (s == ToString(m)) return m;
  }
  throw DomainError("method in {vanilla, rgm, clip, clip_high, clip_low}, got '" +
                    s + "'");
}

/// How eta is derived from the per-node clip radius.
enum class EtaConstants {
  kProven,     // sqrt(6) R_c^2 / (rho N)
  kEmpirical,  // R_c^2 / N with C = A~, i.e. sqrt(max_i ||A_i A~^-1||^2) N
};

struct ExperimentSpec {
  SplitSpec split;
  double mu_reg = 0.03;
  double alpha = 2;
  double eps = 0.1;
  int iters = 200;
  double rho = 0.5;
  double ptr_eps = 1.0;
  double ptr_delta = 1e-6;
  double clip_mult = 1;
  double clip_high_mult = 10;
  double clip_low_mult = 0.1;
  EtaConstants eta_constants = EtaConstants::kEmpirical;
  bool weighted = false;
};

inline Json ToJson(const ExperimentSpec& s) {
  return {{"split", ToString(s.split.strategy)},
          {"num_nodes", s.split.num_nodes},
          {"bias_b", s.split.bias_b},
          {"samples_per_node", s.split.samples_per_node
                                   ? Json(*s.split.samples_per_node)
                                   : Json(nullptr)},
          {"split_seed", s.split.seed},
          {"mu_reg", s.mu_reg},
          {"alpha", s.alpha},
          {"eps", s.eps},
          {"iters", s.iters},
          {"rho", s.rho},
          {"ptr_eps", s.ptr_eps},
          {"ptr_delta", s.ptr_delta},
          {"clip_mult", s.clip_mult},
          {"clip_high_mult", s.clip_high_mult},
          {"clip_low_mult", s.clip_low_mult},
          {"eta_constants",
           s.eta_constants == EtaConstants::kEmpirical ? "empirical" : "proven"},
          {"weighted", s.weighted}};
}

/// Runs the protocol-selected RGM certification on one node: C = A~ of the
/// node, R_c the largest quartic score (nothing is clipped), PTR on Delta_+.
/// The choice of C and R_c looks at the local data, so the resulting
/// guarantee is conditional on those hyperparameters.
inline CertifyResult CertifyNodeForExperiment(const NodeState& node,
                                              const ExperimentSpec& spec,
                                              SeededRng& rng) {
  ClipShape shape{node.model.a, 0};
  const auto c_factor = linalg::SpdFactor(shape.c);
  for (Eigen::Index j = 0; j < node.data.size(); ++j) {
    shape.r_c = std::max(shape.r_c,
                         ClipScore(node.data.x.col(j), c_factor, ClipMode::kQuartic));
  }
  CertifyOptions opt;
  opt.rho = spec.rho;
  opt.mu_reg = node.model.mu_reg;
  opt.ptr_eps = spec.ptr_eps;
  opt.ptr_delta = spec.ptr_delta;
  CertifyResult res = CertifyRelativeSensitivity(node.data, shape, opt, rng);
  if (res.certificate && spec.eta_constants == EtaConstants::kEmpirical) {
    auto& cert = *res.certificate;
    cert.eta = shape.r_c * shape.r_c / static_cast<double>(node.data.size());
    cert.r_rel = RRelBound(res.model, res.clipped, cert.eta);
  }
  return res;
}

struct ExperimentRun {
  FedRunResult result;
  Method method = Method::kVanilla;
  double tau = 0;
  /// False when some node's PTR rejected; the run is then empty.
  bool certified = true;
  Json echo;
};

inline ExperimentRun RunExperiment(const FeatureDataset& data,
                                   const ExperimentSpec& spec, Method method,
                                   std::uint64_t run_seed) {
  const auto parts = SplitDataset(data, spec.split);
  std::vector<NodeState> nodes;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    nodes.push_back(MakeNode(static_cast<int>(i), parts[i], spec.mu_reg, run_seed));
  }
  double lmax = 0;
  for (const auto& node : nodes) lmax = std::max(lmax, linalg::LambdaMax(node.model.a));
  ExperimentRun run;
  run.method = method;
  run.tau = DefaultStepSize(lmax, 0, 1, StepSizeMode::kExperiment, lmax);
  run.echo = ToJson(spec);
  run.echo["method"] = ToString(method);
  run.echo["run_seed"] = run_seed;
  run.echo["protocol_note"] =
      "hyperparameters (clip thresholds, C, R_c) are chosen from local data; "
      "the reported guarantees are conditional on them";

  for (auto& node : nodes) {
    switch (method) {
      case Method::kVanilla:
        break;
      case Method::kRgm: {
        SeededRng ptr_rng(run_seed, DeriveStream("ptr", node.node_id, 0));
        const auto res = CertifyNodeForExperiment(node, spec, ptr_rng);
        if (!res.certificate) {
          run.certified = false;
          run.echo["rejected_node"] = node.node_id;
          run.echo["rejected_delta_plus"] = res.ptr.delta_plus;
          run.echo["rejected_threshold"] = res.ptr.threshold;
          return run;
        }
        node.data = res.clipped;
        node.model = res.model;
        node.privatizer = MakePrivatizerRgm(node, spec.alpha, spec.eps, *res.certificate);
        break;
      }
      case Method::kClip:
        node.privatizer =
            MakePrivatizerClipped(node, spec.alpha, spec.eps, spec.clip_mult);
        break;
      case Method::kClipHigh:
        node.privatizer =
            MakePrivatizerClipped(node, spec.alpha, spec.eps, spec.clip_high_mult);
        break;
      case Method::kClipLow:
        node.privatizer =
            MakePrivatizerClipped(node, spec.alpha, spec.eps, spec.clip_low_mult);
        break;
    }
  }
  run.result = RunFederated(nodes, run.tau, spec.iters,
                            Eigen::VectorXd::Zero(data.dim()), spec.weighted);
  run.result.config_echo["experiment"] = run.echo;
  return run;
}

}  // namespace rgm
