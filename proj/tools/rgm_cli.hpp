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
// Command-line front end. Every data-driven subcommand resolves a flat JSON
// config (defaults, then --config file, then flags) and echoes it into its
// output. Exit status: 0 success, 1 violation or rejection, 2 usage error.
#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rgm/rgm.hpp"

namespace rgm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// A usage problem found after flag parsing (bad config key, bad value).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
}

/// Copies every key of `file` into `cfg`, rejecting keys absent from the
/// defaults.
inline void MergeConfig(Json& cfg, const Json& file) {
  if (!file.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : file.items()) {
    if (!cfg.contains(key)) throw UsageError("unknown config key '" + key + "'");
    cfg[key] = value;
  }
}

/// Flags that override config keys only when given on the command line.
class Overrides {
 public:
  template <typename T>
  CLI::Option* Add(CLI::App* app, const std::string& flag, const std::string& key,
                   const std::string& help) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *holder, help);
    entries_.push_back({key, opt, [holder] { return Json(*holder); }});
    holders_.push_back(holder);
    return opt;
  }

  void Apply(Json& cfg) const {
    for (const auto& e : entries_) {
      if (e.opt->count() > 0) cfg[e.key] = e.value();
    }
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<Json()> value;
  };
  std::vector<Entry> entries_;
  std::vector<std::shared_ptr<void>> holders_;
};

inline std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not a number list: '" + text + "'");
    }
  }
  return out;
}

/// "identity", "diag:1,2,4" or "spd:<condition number>".
inline CovarianceSpec ParseCovariance(const std::string& text) {
  CovarianceSpec spec;
  if (text == "identity") return spec;
  if (text.rfind("diag:", 0) == 0) {
    spec.kind = CovarianceKind::kDiagonal;
    spec.diagonal = ParseList(text.substr(5));
    return spec;
  }
  if (text.rfind("spd:", 0) == 0) {
    spec.kind = CovarianceKind::kRandomSpd;
    const auto v = ParseList(text.substr(4));
    if (v.size() != 1) throw UsageError("spd:<condition number> expected");
    spec.condition_number = v[0];
    return spec;
  }
  throw UsageError("sigma must be identity, diag:<list> or spd:<cond>, got '" +
                   text + "'");
}

inline Json GeneratorDefaults() {
  return {{"data", nullptr},
          {"gen", "gaussian"},
          {"d", 10},
          {"n", 2000},
          {"sigma", "identity"},
          {"theta_true", nullptr},
          {"label_noise", 1.0},
          {"feature_mean", 0.0},
          {"binary_labels", false},
          {"scales", nullptr},
          {"data_seed", 1}};
}

inline void AddGeneratorFlags(CLI::App* app, Overrides& ov) {
  ov.Add<std::string>(app, "--data", "data", "LibSVM dataset (overrides --gen)");
  ov.Add<std::string>(app, "--gen", "gen", "generator: gaussian | orthogonal");
  ov.Add<int>(app, "--d", "d", "dimension");
  ov.Add<std::int64_t>(app, "--n", "n", "number of records");
  ov.Add<std::string>(app, "--sigma", "sigma", "identity | diag:<list> | spd:<cond>");
  ov.Add<double>(app, "--theta", "theta_true", "every coordinate of theta_true");
  ov.Add<double>(app, "--label-noise", "label_noise", "label noise std");
  ov.Add<double>(app, "--feature-mean", "feature_mean", "mean of every feature");
  ov.Add<std::uint64_t>(app, "--data-seed", "data_seed", "generator seed");
}

inline GaussianSpec GaussianSpecFromJson(const Json& cfg) {
  GaussianSpec g;
  g.d = cfg.at("d").get<int>();
  g.n = cfg.at("n").get<std::int64_t>();
  g.sigma = ParseCovariance(cfg.at("sigma").get<std::string>());
  const Json& th = cfg.at("theta_true");
  if (th.is_number()) {
    g.theta_true.assign(static_cast<std::size_t>(std::max(g.d, 0)), th.get<double>());
  } else if (th.is_array()) {
    g.theta_true = th.get<std::vector<double>>();
  }
  g.label_noise = cfg.at("label_noise").get<double>();
  g.feature_mean = cfg.at("feature_mean").get<double>();
  g.binary_labels = cfg.at("binary_labels").get<bool>();
  g.seed = cfg.at("data_seed").get<std::uint64_t>();
  return g;
}

inline OrthogonalSpec OrthogonalSpecFromJson(const Json& cfg) {
  OrthogonalSpec o;
  o.d = cfg.at("d").get<int>();
  o.n = cfg.at("n").get<std::int64_t>();
  if (cfg.at("scales").is_array()) o.scales = cfg.at("scales").get<std::vector<double>>();
  o.seed = cfg.at("data_seed").get<std::uint64_t>();
  return o;
}

inline FeatureDataset ResolveData(const Json& cfg) {
  FeatureDataset data;
  if (cfg.at("data").is_string()) {
    data = ParseLibsvmFile(cfg.at("data").get<std::string>());
  } else {
    const auto kind = cfg.at("gen").get<std::string>();
    if (kind == "gaussian") {
      data = GenGaussian(GaussianSpecFromJson(cfg));
    } else if (kind == "orthogonal") {
      data = GenOrthogonal(OrthogonalSpecFromJson(cfg));
    } else {
      throw UsageError("gen must be gaussian or orthogonal, got '" + kind + "'");
    }
  }
  data.Validate();
  return data;
}

inline ClipMode ParseClipMode(const std::string& s) {
  if (s == "quartic") return ClipMode::kQuartic;
  if (s == "ellipsoid") return ClipMode::kEllipsoid;
  throw UsageError("mode must be quartic or ellipsoid, got '" + s + "'");
}

inline double OptionalReal(const Json& v, double fallback) {
  return v.is_null() ? fallback : v.get<double>();
}

inline std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void Row(std::ostream& out, const std::string& name, const std::string& value) {
  out << std::left << std::setw(26) << name << value << '\n';
}

/// Writes to the file named by cfg["out"], or to `fallback` when it is null.
inline void Emit(const Json& out_path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& write) {
  if (out_path.is_null()) {
    write(fallback);
    return;
  }
  const auto path = out_path.get<std::string>();
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + path + "'");
  write(file);
}

/// The config without output destinations, which never affect results.
inline Json Echoable(Json cfg) {
  cfg.erase("out");
  cfg.erase("echo");
  return cfg;
}

inline Json ResolveConfig(Json defaults, const std::string& config_path,
                          const Overrides& ov) {
  if (!config_path.empty()) MergeConfig(defaults, LoadJsonFile(config_path));
  ov.Apply(defaults);
  return defaults;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// account

struct AccountArgs {
  double eta = 0;
  double gamma = 0;
  double gamma_mult = 0;
  double alpha = 0;
  double delta = 1e-8;
  int d = 1;
  double r_rel = 0;
  double target_eps = 0;
};

inline int RunAccount(const AccountArgs& a, const CLI::App& sub, std::ostream& out) {
  const RelativeSensitivity sens{a.eta, a.r_rel};
  const bool has_gamma = sub.count("--gamma") > 0;
  const bool has_mult = sub.count("--gamma-mult") > 0;
  if (has_gamma == has_mult) {
    throw UsageError("give exactly one of --gamma and --gamma-mult");
  }
  const double gamma = has_gamma ? a.gamma : a.gamma_mult * a.eta * a.eta;

  using detail::Num;
  using detail::Row;
  Row(out, "quantity", "value");
  Row(out, "eta", Num(a.eta));
  Row(out, "r_rel", Num(a.r_rel));
  Row(out, "gamma", Num(gamma));
  Row(out, "d", std::to_string(a.d));
  Row(out, "delta", Num(a.delta));
  Row(out, "alpha_max", Num(AlphaMax(sens)));
  try {
    Row(out, "closed_form_eps", Num(DpGuaranteeClosedForm(sens, gamma, a.d, a.delta).epsilon));
  } catch (const PreconditionError& e) {
    Row(out, "closed_form_eps", std::string("n/a (") + e.what() + ")");
  }
  const auto opt = OptimizeAlphaNumeric(sens, gamma, a.d, a.delta);
  Row(out, "optimized_alpha", Num(opt.alpha));
  Row(out, "optimized_eps", Num(opt.dp.epsilon));
  Row(out, "optimized_sigma2_min", Num(MinBaselineVariance(sens, gamma, opt.alpha)));
  if (sub.count("--alpha") > 0) {
    Row(out, "rdp_alpha", Num(a.alpha));
    Row(out, "rdp_eps", Num(RgmRdpEpsilon(sens, gamma, a.alpha, a.d).epsilon));
    Row(out, "sigma2_min", Num(MinBaselineVariance(sens, gamma, a.alpha)));
  }
  const auto tc = TcdpParams(sens, gamma, a.d);
  Row(out, "tcdp_rho", Num(tc.rho));
  Row(out, "tcdp_omega", Num(tc.omega));
  Row(out, "tcdp_alpha_free_rho", Num(TcdpParamsAlphaFree(sens, gamma, a.d).rho));
  const auto gss = SmoothSensitivityTcdpParams(sens, gamma);
  Row(out, "smooth_sens_tcdp_rho", Num(gss.rho));
  Row(out, "smooth_sens_tcdp_omega", Num(gss.omega));
  Row(out, "eps_floor", Num(EpsilonFloor(sens, a.d, a.delta)));
  if (sub.count("--target-eps") > 0) {
    const auto cal = OptimizeGamma(sens, a.d, {a.target_eps, a.delta});
    Row(out, "target_eps", Num(a.target_eps));
    Row(out, "target_feasible", cal.feasible ? "yes" : "no");
    if (cal.feasible) {
      Row(out, "target_gamma", Num(cal.gamma));
      Row(out, "target_sigma2", Num(cal.sigma2));
      Row(out, "target_alpha", Num(cal.alpha));
      Row(out, "target_achieved_eps", Num(cal.epsilon));
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// certify

inline Json CertifyDefaults() {
  Json cfg = detail::GeneratorDefaults();
  cfg.update({{"mode", "quartic"},
              {"clip_matrix", "covariance"},
              {"rc", nullptr},
              {"rho", 0.5},
              {"mu_reg", 0.0},
              {"ptr_eps", 0.1},
              {"ptr_delta", 1e-6},
              {"b_clip", nullptr},
              {"seed", 0},
              {"out", nullptr}});
  return cfg;
}

/// C is the identity or the data's regularized second-moment matrix; R_c
/// defaults to the largest clip score present (nothing is clipped).
inline ClipShape ResolveShape(const FeatureDataset& data, const Json& cfg,
                              ClipMode mode) {
  const auto which = cfg.at("clip_matrix").get<std::string>();
  ClipShape shape;
  if (which == "identity") {
    shape.c = Eigen::MatrixXd::Identity(data.dim(), data.dim());
  } else if (which == "covariance") {
    shape.c = BuildQuadratic(data, cfg.at("mu_reg").get<double>()).a;
  } else {
    throw UsageError("clip_matrix must be identity or covariance");
  }
  if (cfg.at("rc").is_null()) {
    linalg::RequireSpd(shape.c, "clip matrix C");
    const auto factor = linalg::SpdFactor(shape.c);
    for (Eigen::Index j = 0; j < data.size(); ++j)
      shape.r_c = std::max(shape.r_c, ClipScore(data.x.col(j), factor, mode));
  } else {
    shape.r_c = cfg.at("rc").get<double>();
  }
  return shape;
}

inline int RunCertify(const Json& cfg, std::ostream& out) {
  const FeatureDataset data = detail::ResolveData(cfg);
  const ClipMode mode = detail::ParseClipMode(cfg.at("mode").get<std::string>());
  const ClipShape shape = ResolveShape(data, cfg, mode);
  CertifyOptions opt;
  opt.rho = cfg.at("rho").get<double>();
  opt.mu_reg = cfg.at("mu_reg").get<double>();
  opt.ptr_eps = cfg.at("ptr_eps").get<double>();
  opt.ptr_delta = cfg.at("ptr_delta").get<double>();
  opt.mode = mode;
  opt.b_clip = detail::OptionalReal(cfg.at("b_clip"), std::numeric_limits<double>::infinity());
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  SeededRng rng(seed, DeriveStream("certify", 0, 0));
  const auto res = CertifyRelativeSensitivity(data, shape, opt, rng);
  Json doc = CertifyResultJson(res, seed);
  doc["accepted"] = res.accepted();
  doc["config"] = detail::Echoable(cfg);
  doc["config_hash"] = ConfigHash(doc["config"]);
  detail::Emit(cfg.at("out"), out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

inline Json TrainDefaults() {
  Json cfg = detail::GeneratorDefaults();
  cfg.update({{"method", "rgm"},
              {"mu_reg", 0.03},
              {"tau", nullptr},
              {"iters", 200},
              {"alpha", 2.0},
              {"eps", 0.1},
              {"clip_mult", 1.0},
              {"rho", 0.5},
              {"ptr_eps", 1.0},
              {"ptr_delta", 1e-6},
              {"eta_constants", "proven"},
              {"seed", 1},
              {"out", nullptr}});
  return cfg;
}

inline EtaConstants ParseEtaConstants(const std::string& s) {
  if (s == "empirical") return EtaConstants::kEmpirical;
  if (s == "proven") return EtaConstants::kProven;
  throw UsageError("eta_constants must be empirical or proven, got '" + s + "'");
}

/// Single-node GD. RGM certifies the node with C = A and R_c the largest
/// quartic score; the step defaults to 0.5 / lambda_max(A).
inline int RunTrain(const Json& cfg, std::ostream& out, std::ostream& err) {
  const FeatureDataset data = detail::ResolveData(cfg);
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const Method method = ParseMethod(cfg.at("method").get<std::string>());
  NodeState node = MakeNode(0, data, cfg.at("mu_reg").get<double>(), seed);

  GdConfig gd;
  gd.iters = cfg.at("iters").get<int>();
  gd.theta0 = Eigen::VectorXd::Zero(data.dim());
  gd.rng = SeededRng(seed, DeriveStream("train", 0, 0));
  gd.tau = detail::OptionalReal(cfg.at("tau"), 0.5 / linalg::LambdaMax(node.model.a));
  Json echo = detail::Echoable(cfg);
  echo["tau"] = gd.tau;

  Trajectory tr;
  switch (method) {
    case Method::kVanilla:
      tr = VanillaGd(node.model, gd);
      break;
    case Method::kRgm: {
      ExperimentSpec spec;
      spec.rho = cfg.at("rho").get<double>();
      spec.ptr_eps = cfg.at("ptr_eps").get<double>();
      spec.ptr_delta = cfg.at("ptr_delta").get<double>();
      spec.eta_constants = ParseEtaConstants(cfg.at("eta_constants").get<std::string>());
      SeededRng ptr_rng(seed, DeriveStream("ptr", 0, 0));
      const auto res = CertifyNodeForExperiment(node, spec, ptr_rng);
      if (!res.certificate) {
        err << "PTR rejected: " << PtrJson(res.ptr).dump() << '\n';
        return kExitViolation;
      }
      node.data = res.clipped;
      node.model = res.model;
      const auto p = MakePrivatizerRgm(node, cfg.at("alpha").get<double>(),
                                       cfg.at("eps").get<double>(), *res.certificate);
      echo["privatizer"] = PrivatizerJson(p);
      gd.noise = p.noise;
      tr = PrivateGd(node.model, gd);
      break;
    }
    case Method::kClip:
    case Method::kClipHigh:
    case Method::kClipLow: {
      const auto p = MakePrivatizerClipped(node, cfg.at("alpha").get<double>(),
                                           cfg.at("eps").get<double>(),
                                           cfg.at("clip_mult").get<double>());
      echo["privatizer"] = PrivatizerJson(p);
      gd.noise = p;
      tr = ClippedDpGd(node.data, node.model.mu_reg, gd);
      break;
    }
  }
  detail::Emit(cfg.at("out"), out,
               [&](std::ostream& o) { WriteTrajectoryCsv(o, tr, echo, seed); });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fedsim

inline Json FedsimDefaults() {
  Json cfg = detail::GeneratorDefaults();
  cfg.update({{"split", "random"},
              {"num_nodes", 2},
              {"bias_b", 0.0},
              {"samples_per_node", nullptr},
              {"split_seed", 1},
              {"mu_reg", 0.03},
              {"alpha", 2.0},
              {"eps", 0.1},
              {"iters", 200},
              {"rho", 0.5},
              {"ptr_eps", 1.0},
              {"ptr_delta", 1e-6},
              {"clip_mult", 1.0},
              {"clip_high_mult", 10.0},
              {"clip_low_mult", 0.1},
              {"eta_constants", "empirical"},
              {"weighted", false},
              {"methods", {"vanilla", "rgm", "clip", "clip_high", "clip_low"}},
              {"runs", 3},
              {"seed", 1},
              {"out", nullptr},
              {"echo", nullptr}});
  return cfg;
}

inline ExperimentSpec ExperimentSpecFromJson(const Json& cfg) {
  ExperimentSpec s;
  s.split.strategy = ParseSplitStrategy(cfg.at("split").get<std::string>());
  s.split.num_nodes = cfg.at("num_nodes").get<int>();
  s.split.bias_b = cfg.at("bias_b").get<double>();
  if (!cfg.at("samples_per_node").is_null())
    s.split.samples_per_node = cfg.at("samples_per_node").get<std::int64_t>();
  s.split.seed = cfg.at("split_seed").get<std::uint64_t>();
  s.mu_reg = cfg.at("mu_reg").get<double>();
  s.alpha = cfg.at("alpha").get<double>();
  s.eps = cfg.at("eps").get<double>();
  s.iters = cfg.at("iters").get<int>();
  s.rho = cfg.at("rho").get<double>();
  s.ptr_eps = cfg.at("ptr_eps").get<double>();
  s.ptr_delta = cfg.at("ptr_delta").get<double>();
  s.clip_mult = cfg.at("clip_mult").get<double>();
  s.clip_high_mult = cfg.at("clip_high_mult").get<double>();
  s.clip_low_mult = cfg.at("clip_low_mult").get<double>();
  s.eta_constants = ParseEtaConstants(cfg.at("eta_constants").get<std::string>());
  s.weighted = cfg.at("weighted").get<bool>();
  return s;
}

/// Runs every method for `runs` seeds (seed, seed + 1, ...). A rejected PTR
/// leaves no rows and a '# rejected' comment line.
inline int RunFedsim(const Json& cfg, std::ostream& out, std::ostream& err) {
  const FeatureDataset data = detail::ResolveData(cfg);
  const ExperimentSpec spec = ExperimentSpecFromJson(cfg);
  std::vector<Method> methods;
  for (const auto& m : cfg.at("methods")) methods.push_back(ParseMethod(m.get<std::string>()));
  const int runs = cfg.at("runs").get<int>();
  if (runs < 1) throw UsageError("runs must be >= 1");
  const auto seed = cfg.at("seed").get<std::uint64_t>();

  const Json resolved = detail::Echoable(cfg);
  std::ostringstream csv;
  WriteFedCsvHeader(csv, resolved, seed, static_cast<std::size_t>(spec.split.num_nodes));
  Json echo = {{"config", resolved},
               {"config_hash", ConfigHash(resolved)},
               {"runs", Json::array()}};
  for (Method m : methods) {
    for (int r = 0; r < runs; ++r) {
      const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(r);
      const auto run = RunExperiment(data, spec, m, run_seed);
      if (!run.certified) {
        csv << "# rejected method=" << ToString(m) << " run_seed=" << run_seed
            << " node=" << run.echo.at("rejected_node") << '\n';
        err << "PTR rejected for " << ToString(m) << " run_seed=" << run_seed << '\n';
        echo["runs"].push_back(run.echo);
        continue;
      }
      WriteFedCsvRows(csv, ToString(m), run_seed, run.result);
      echo["runs"].push_back(run.result.config_echo);
    }
  }
  detail::Emit(cfg.at("out"), out, [&](std::ostream& o) { o << csv.str(); });
  if (!cfg.at("echo").is_null()) {
    detail::Emit(cfg.at("echo"), out, [&](std::ostream& o) { o << echo.dump(2) << '\n'; });
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::size_t trials = 10000;
  std::uint64_t seed = 7;
  std::size_t delta_instances = 200;
  std::size_t rho_samples = 1000000;
  int utility_seeds = 200;
  int utility_iters = 200;
};

/// Soundness sweep, Delta_+ exhaustive check, gaussian_rho Monte Carlo,
/// utility-bound Monte Carlo; non-vacuity ratios are reported.
inline int RunVerify(const VerifyArgs& a, std::ostream& out) {
  bool ok = true;
  auto verdict = [&](bool pass) {
    ok = ok && pass;
    return pass ? "PASS" : "FAIL";
  };

  const auto sound = verify::SoundnessSweep(a.trials, a.seed);
  out << verdict(sound.violations == 0) << " soundness configurations="
      << sound.configurations << " pairs=" << sound.pairs
      << " violations=" << sound.violations
      << " max_ratio=" << detail::Num(sound.max_ratio) << '\n';

  const auto dp = verify::DeltaPlusExhaustive(a.delta_instances, a.seed);
  out << verdict(dp.mismatches == 0) << " delta_plus instances=" << dp.instances
      << " mismatches=" << dp.mismatches << " zero=" << dp.zero
      << " finite=" << dp.finite << " infinite=" << dp.infinite << '\n';

  double worst_z = 0;
  for (const auto& row : verify::RhoGrid(a.rho_samples, a.seed))
    worst_z = std::max(worst_z, std::abs(row.z()));
  out << verdict(worst_z <= 3) << " gaussian_rho max_abs_z=" << detail::Num(worst_z)
      << '\n';

  const auto util = verify::UtilityMonteCarlo(a.utility_seeds, a.utility_iters, a.seed);
  out << verdict(util.violations_strong == 0 && util.violations_convex == 0)
      << " utility seeds=" << util.seeds << " iters=" << util.iters
      << " worst_z_strong=" << detail::Num(util.worst_z_strong)
      << " worst_z_convex=" << detail::Num(util.worst_z_convex) << '\n';

  for (double eta : {0.01, 0.05}) {
    const auto row = verify::NonVacuity(eta, 1.0, 2.0);
    out << "INFO non_vacuity eta=" << eta << " gamma=1 alpha=2 ratio="
        << detail::Num(row.ratio) << '\n';
  }
  out << (ok ? "verify: all checks passed" : "verify: violations found") << '\n';
  return ok ? kExitOk : kExitViolation;
}

// ---------------------------------------------------------------------------
// gen

inline Json GenDefaults() {
  Json cfg = detail::GeneratorDefaults();
  cfg.erase("data");
  cfg.update({{"alpha_range", {1.0, 1.0}},
              {"beta_range", {1.0, 1.0}},
              {"center", {1.0}},
              {"out", nullptr}});
  return cfg;
}

inline Json QuadraticJson(const QuadraticModel& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.a.cols(); ++j) row.push_back(m.a(i, j));
    a.push_back(row);
  }
  return {{"A", a}, {"b", std::vector<double>(m.b.data(), m.b.data() + m.b.size())}};
}

inline int RunGen(const Json& cfg, std::ostream& out) {
  const auto kind = cfg.at("gen").get<std::string>();
  if (kind == "two_quadratics") {
    TwoQuadraticsSpec spec;
    const auto ar = cfg.at("alpha_range").get<std::vector<double>>();
    const auto br = cfg.at("beta_range").get<std::vector<double>>();
    if (ar.size() != 2 || br.size() != 2)
      throw UsageError("alpha_range and beta_range take two values");
    spec.alpha_min = ar[0];
    spec.alpha_max = ar[1];
    spec.beta_min = br[0];
    spec.beta_max = br[1];
    spec.center = cfg.at("center").get<std::vector<double>>();
    spec.seed = cfg.at("data_seed").get<std::uint64_t>();
    const auto tq = GenTwoQuadratics(spec);
    const Json doc = {{"first", QuadraticJson(tq.first)},
                      {"second", QuadraticJson(tq.second)},
                      {"a", tq.a},
                      {"b", tq.b},
                      {"eta_first", tq.eta_first},
                      {"eta_second", tq.eta_second},
                      {"eta_first_worst", tq.eta_first_worst},
                      {"eta_second_worst", tq.eta_second_worst},
                      {"r_rel", tq.r_rel},
                      {"config", detail::Echoable(cfg)}};
    detail::Emit(cfg.at("out"), out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
    return kExitOk;
  }
  Json with_data = cfg;
  with_data["data"] = nullptr;
  const FeatureDataset data = detail::ResolveData(with_data);
  detail::Emit(cfg.at("out"), out, [&](std::ostream& o) {
    const Json resolved = detail::Echoable(cfg);
    o << "# config_hash=" << ConfigHash(resolved) << " config=" << resolved.dump() << '\n';
    WriteLibsvm(o, data);
  });
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int CliMain(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Relative Gaussian Mechanism toolkit", "rgm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "all subcommand help");

  AccountArgs acc;
  auto* account = app.add_subcommand("account", "privacy accounting table");
  account->add_option("--eta", acc.eta, "relative sensitivity eta")->required();
  account->add_option("--gamma", acc.gamma, "RGM gamma");
  account->add_option("--gamma-mult", acc.gamma_mult, "gamma as a multiple of eta^2");
  account->add_option("--alpha", acc.alpha, "Renyi order for the RDP row");
  account->add_option("--delta", acc.delta, "target delta")->capture_default_str();
  account->add_option("--d", acc.d, "dimension")->capture_default_str();
  account->add_option("--r-rel", acc.r_rel, "R_rel")->capture_default_str();
  account->add_option("--target-eps", acc.target_eps, "calibrate gamma for this eps");

  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat JSON config file");
  };

  detail::Overrides cert_ov;
  auto* certify = app.add_subcommand("certify", "clip + PTR certification");
  add_config(certify);
  detail::AddGeneratorFlags(certify, cert_ov);
  cert_ov.Add<std::string>(certify, "--mode", "mode", "quartic | ellipsoid");
  cert_ov.Add<std::string>(certify, "--clip-matrix", "clip_matrix", "identity | covariance");
  cert_ov.Add<double>(certify, "--rc", "rc", "clip radius R_c");
  cert_ov.Add<double>(certify, "--rho", "rho", "proposed rho");
  cert_ov.Add<double>(certify, "--mu-reg", "mu_reg", "ridge regularization");
  cert_ov.Add<double>(certify, "--ptr-eps", "ptr_eps", "PTR epsilon");
  cert_ov.Add<double>(certify, "--ptr-delta", "ptr_delta", "PTR delta");
  cert_ov.Add<double>(certify, "--b-clip", "b_clip", "bound on ||X_i y_i||");
  cert_ov.Add<std::uint64_t>(certify, "--seed", "seed", "PTR seed");
  cert_ov.Add<std::string>(certify, "--out", "out", "output JSON path");

  detail::Overrides train_ov;
  auto* train = app.add_subcommand("train", "single-node GD, trajectory CSV");
  add_config(train);
  detail::AddGeneratorFlags(train, train_ov);
  train_ov.Add<std::string>(train, "--method", "method", "vanilla | rgm | clip");
  train_ov.Add<double>(train, "--mu-reg", "mu_reg", "ridge regularization");
  train_ov.Add<double>(train, "--tau", "tau", "step size");
  train_ov.Add<int>(train, "--iters", "iters", "iterations T");
  train_ov.Add<double>(train, "--alpha", "alpha", "Renyi order");
  train_ov.Add<double>(train, "--eps", "eps", "target RDP epsilon");
  train_ov.Add<double>(train, "--clip-mult", "clip_mult", "clip threshold multiplier");
  train_ov.Add<double>(train, "--rho", "rho", "proposed rho");
  train_ov.Add<double>(train, "--ptr-eps", "ptr_eps", "PTR epsilon");
  train_ov.Add<std::uint64_t>(train, "--seed", "seed", "run seed");
  train_ov.Add<std::string>(train, "--out", "out", "output CSV path");

  detail::Overrides fed_ov;
  auto* fedsim = app.add_subcommand("fedsim", "multi-node simulation, metrics CSV");
  add_config(fedsim);
  detail::AddGeneratorFlags(fedsim, fed_ov);
  fed_ov.Add<std::string>(fedsim, "--split", "split", "random | label | bias")
      ->check(CLI::IsMember({"random", "label", "bias"}));
  fed_ov.Add<double>(fedsim, "--bias-b", "bias_b", "label shift B on nodes >= 1");
  fed_ov.Add<double>(fedsim, "--mu-reg", "mu_reg", "ridge regularization");
  fed_ov.Add<int>(fedsim, "--iters", "iters", "iterations T");
  fed_ov.Add<double>(fedsim, "--alpha", "alpha", "Renyi order");
  fed_ov.Add<double>(fedsim, "--eps", "eps", "target RDP epsilon");
  fed_ov.Add<double>(fedsim, "--rho", "rho", "proposed rho");
  fed_ov.Add<double>(fedsim, "--clip-mult", "clip_mult", "clip threshold multiplier");
  fed_ov.Add<int>(fedsim, "--runs", "runs", "seeds per method");
  fed_ov.Add<std::uint64_t>(fedsim, "--seed", "seed", "base run seed");
  fed_ov.Add<std::string>(fedsim, "--out", "out", "output CSV path");
  fed_ov.Add<std::string>(fedsim, "--echo", "echo", "output config-echo JSON path");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "oracle suites; exit 1 on violation");
  verify->add_option("--trials", ver.trials, "soundness configurations")->capture_default_str();
  verify->add_option("--seed", ver.seed, "seed")->capture_default_str();
  verify->add_option("--delta-instances", ver.delta_instances, "Delta_+ instances")
      ->capture_default_str();
  verify->add_option("--rho-samples", ver.rho_samples, "Monte Carlo samples per rho cell")
      ->capture_default_str();
  verify->add_option("--utility-seeds", ver.utility_seeds, "utility Monte Carlo seeds")
      ->capture_default_str();

  detail::Overrides gen_ov;
  auto* gen = app.add_subcommand("gen", "synthetic data as LibSVM (or JSON)");
  add_config(gen);
  gen_ov.Add<std::string>(gen, "--kind", "gen", "gaussian | orthogonal | two_quadratics");
  gen_ov.Add<int>(gen, "--d", "d", "dimension");
  gen_ov.Add<std::int64_t>(gen, "--n", "n", "number of records");
  gen_ov.Add<std::string>(gen, "--sigma", "sigma", "identity | diag:<list> | spd:<cond>");
  gen_ov.Add<double>(gen, "--theta", "theta_true", "every coordinate of theta_true");
  gen_ov.Add<double>(gen, "--label-noise", "label_noise", "label noise std");
  gen_ov.Add<double>(gen, "--feature-mean", "feature_mean", "mean of every feature");
  gen_ov.Add<bool>(gen, "--binary", "binary_labels", "sign labels");
  gen_ov.Add<std::vector<double>>(gen, "--scales", "scales", "orthogonal direction scales")
      ->delimiter(',');
  gen_ov.Add<std::vector<double>>(gen, "--alpha-range", "alpha_range", "min,max")
      ->delimiter(',');
  gen_ov.Add<std::vector<double>>(gen, "--beta-range", "beta_range", "min,max")
      ->delimiter(',');
  gen_ov.Add<std::vector<double>>(gen, "--center", "center", "second quadratic center")
      ->delimiter(',');
  gen_ov.Add<std::uint64_t>(gen, "--seed", "data_seed", "generator seed");
  gen_ov.Add<std::string>(gen, "--out", "out", "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (account->parsed()) return RunAccount(acc, *account, out);
    if (verify->parsed()) return RunVerify(ver, out);
    if (certify->parsed())
      return RunCertify(detail::ResolveConfig(CertifyDefaults(), config_path, cert_ov), out);
    if (train->parsed())
      return RunTrain(detail::ResolveConfig(TrainDefaults(), config_path, train_ov), out, err);
    if (fedsim->parsed())
      return RunFedsim(detail::ResolveConfig(FedsimDefaults(), config_path, fed_ov), out, err);
    if (gen->parsed())
      return RunGen(detail::ResolveConfig(GenDefaults(), config_path, gen_ov), out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Json::exception& e) {
    err << "usage error: bad config value: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace rgm::cli
