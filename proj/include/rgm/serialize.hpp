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
// Certificate JSON and metrics CSV writers. Every CSV starts with '#'
// comment lines carrying the config hash, the base seed, and the resolved
// config as one-line JSON.
#pragma once

#include <cstdint>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "rgm/fedsim.hpp"
#include "rgm/optim.hpp"
#include "rgm/sensitivity.hpp"

namespace rgm {

inline std::string FormatReal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// FNV-1a 64 of the canonical (sorted-key, compact) JSON dump, as hex.
inline std::string ConfigHash(const Json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json PtrJson(const PtrOutcome& p) {
  Json j = {{"threshold", p.threshold},
            {"accepted", p.accepted},
            {"eps", p.eps},
            {"delta", p.delta}};
  j["delta_plus"] = p.delta_plus == kInfiniteMargin ? Json("inf") : Json(p.delta_plus);
  j["noisy_delta"] = std::isfinite(p.noisy_delta) ? Json(p.noisy_delta) : Json("inf");
  return j;
}

inline Json CertificateJson(const Certificate& c) {
  return {{"eta", c.eta},
          {"r_rel", c.r_rel},
          {"rho", c.rho},
          {"R_c", c.r_c},
          {"kappa", c.kappa},
          {"mu_reg", c.mu_reg},
          {"b_clip", std::isfinite(c.b_clip) ? Json(c.b_clip) : Json("inf")},
          {"mode", ToString(c.mode)},
          {"ptr", PtrJson(c.ptr)},
          {"seed", c.seed}};
}

inline Json CertifyResultJson(const CertifyResult& r, std::uint64_t seed) {
  if (r.certificate) return CertificateJson(*r.certificate);
  return {{"accepted", false}, {"ptr", PtrJson(r.ptr)}, {"seed", seed}};
}

inline void WriteCsvHeader(std::ostream& out, const Json& config,
                           std::uint64_t seed) {
  out << "# config_hash=" << ConfigHash(config) << " seed=" << seed << '\n';
  out << "# config=" << config.dump() << '\n';
}

/// Columns t, dist_sq, fgap, avg_fgap, noise_power (empty on the last row).
inline void WriteTrajectoryCsv(std::ostream& out, const Trajectory& tr,
                               const Json& config, std::uint64_t seed) {
  WriteCsvHeader(out, config, seed);
  out << "t,dist_sq,fgap,avg_fgap,noise_power\n";
  for (std::size_t t = 0; t < tr.dist_sq.size(); ++t) {
    out << t << ',' << FormatReal(tr.dist_sq[t]) << ','
        << FormatReal(tr.function_gap[t]) << ','
        << FormatReal(tr.averaged_gap[t]) << ',';
    if (t < tr.noise_power.size()) out << FormatReal(tr.noise_power[t]);
    out << '\n';
  }
}

/// Columns method, run_seed, t, dist_sq, fgap, then noise_node<i> per node.
inline void WriteFedCsvHeader(std::ostream& out, const Json& config,
                              std::uint64_t seed, std::size_t num_nodes) {
  WriteCsvHeader(out, config, seed);
  out << "method,run_seed,t,dist_sq,fgap";
  for (std::size_t i = 0; i < num_nodes; ++i) out << ",noise_node" << i;
  out << '\n';
}

inline void WriteFedCsvRows(std::ostream& out, const std::string& method,
                            std::uint64_t run_seed, const FedRunResult& r) {
  const auto& tr = r.trajectory;
  for (std::size_t t = 0; t < tr.dist_sq.size(); ++t) {
    out << method << ',' << run_seed << ',' << t << ','
        << FormatReal(tr.dist_sq[t]) << ',' << FormatReal(tr.function_gap[t]);
    for (const auto& node : r.per_node_noise) {
      out << ',';
      if (t < node.size()) out << FormatReal(node[t]);
    }
    out << '\n';
  }
}

}  // namespace rgm
