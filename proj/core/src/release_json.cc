// Copyright 2026 The gridsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "gridsynth/release_json.h"

#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "gridsynth/compact_model.h"

namespace gridsynth {
namespace {

using nlohmann::json;

json VectorToJson(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

absl::StatusOr<Eigen::VectorXd> VectorFromJson(const json& value,
                                               const char* what) {
  if (!value.is_array()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " is not an array"));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(value.size()));
  for (size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, "[", i, "] is not a number"));
    }
    out[static_cast<Eigen::Index>(i)] = value[i].get<double>();
  }
  return out;
}

absl::StatusOr<QueryKind> ParseQueryKind(const std::string& name) {
  for (QueryKind kind : {QueryKind::kLoadObfuscation,
                         QueryKind::kCostObfuscation, QueryKind::kNoisyMax}) {
    if (QueryKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown query kind '", name, "'"));
}

template <typename T>
absl::Status Require(const json& value, const char* key, T* out) {
  if (!value.contains(key)) {
    return absl::InvalidArgumentError(absl::StrCat("missing key '", key, "'"));
  }
  try {
    *out = value.at(key).get<T>();
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad value for '", key, "': ", e.what()));
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status Optional(const json& value, const char* key, T* out) {
  if (!value.contains(key)) return absl::OkStatus();
  return Require(value, key, out);
}

}  // namespace

json RationalToJson(const Rational& value) { return value.str(); }

absl::StatusOr<Rational> RationalFromJson(const json& value) {
  if (!value.is_string()) {
    return absl::InvalidArgumentError("rational must be a \"p/q\" string");
  }
  try {
    return Rational(value.get<std::string>());
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bad rational '", value.get<std::string>(), "': ", e.what()));
  }
}

json LedgerToJson(const Ledger& ledger) {
  json entries = json::array();
  for (const LedgerEntry& e : ledger.entries) {
    entries.push_back({{"query", e.query},
                       {"kind", QueryKindName(e.kind)},
                       {"sensitivity", e.sensitivity},
                       {"noise_scale", e.noise_scale},
                       {"epsilon", RationalToJson(e.epsilon)},
                       {"epsilon_value", static_cast<double>(e.epsilon)}});
  }
  return {{"entries", std::move(entries)},
          {"total", RationalToJson(ledger.TotalExact())},
          {"total_value", ledger.Total()}};
}

absl::StatusOr<Ledger> LedgerFromJson(const json& value) {
  if (!value.is_object() || !value.contains("entries") ||
      !value["entries"].is_array()) {
    return absl::InvalidArgumentError("ledger needs an 'entries' array");
  }
  Ledger ledger;
  for (const json& item : value["entries"]) {
    LedgerEntry e;
    std::string kind;
    if (absl::Status s = Require(item, "query", &e.query); !s.ok()) return s;
    if (absl::Status s = Require(item, "kind", &kind); !s.ok()) return s;
    if (absl::Status s = Require(item, "sensitivity", &e.sensitivity);
        !s.ok()) {
      return s;
    }
    if (absl::Status s = Require(item, "noise_scale", &e.noise_scale);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<QueryKind> parsed = ParseQueryKind(kind);
    if (!parsed.ok()) return parsed.status();
    e.kind = *parsed;
    if (!item.contains("epsilon")) {
      return absl::InvalidArgumentError("ledger entry without 'epsilon'");
    }
    absl::StatusOr<Rational> eps = RationalFromJson(item["epsilon"]);
    if (!eps.ok()) return eps.status();
    e.epsilon = *eps;
    ledger.Add(std::move(e));
  }
  return ledger;
}

json PrivacyToJson(const PrivacyParams& params) {
  json out = {{"alpha", params.alpha},
              {"epsilon", RationalToJson(params.epsilon)},
              {"split", AlgorithmName(params.algorithm)},
              {"eps1", RationalToJson(params.eps1)},
              {"eps2", RationalToJson(params.eps2)}};
  if (params.algorithm == Algorithm::kCroExp) {
    out["eps3"] = RationalToJson(params.eps3);
    out["tau"] = params.tau;
  }
  return out;
}

absl::StatusOr<PrivacyParams> PrivacyFromJson(const json& value) {
  PrivacyParams p;
  std::string split;
  if (absl::Status s = Require(value, "alpha", &p.alpha); !s.ok()) return s;
  if (absl::Status s = Require(value, "split", &split); !s.ok()) return s;
  if (split == AlgorithmName(Algorithm::kCro)) {
    p.algorithm = Algorithm::kCro;
  } else if (split == AlgorithmName(Algorithm::kCroExp)) {
    p.algorithm = Algorithm::kCroExp;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown budget split '", split, "'"));
  }
  for (auto [key, field] :
       {std::pair<const char*, Rational*>{"epsilon", &p.epsilon},
        {"eps1", &p.eps1},
        {"eps2", &p.eps2}}) {
    if (!value.contains(key)) {
      return absl::InvalidArgumentError(absl::StrCat("missing key '", key,
                                                     "'"));
    }
    absl::StatusOr<Rational> r = RationalFromJson(value[key]);
    if (!r.ok()) return r.status();
    *field = *r;
  }
  if (p.algorithm == Algorithm::kCroExp) {
    if (absl::Status s = Require(value, "tau", &p.tau); !s.ok()) return s;
    if (!value.contains("eps3")) {
      return absl::InvalidArgumentError("missing key 'eps3'");
    }
    absl::StatusOr<Rational> r = RationalFromJson(value["eps3"]);
    if (!r.ok()) return r.status();
    p.eps3 = *r;
  }
  return p;
}

json SynthConfigToJson(const SynthConfig& config) {
  return {{"alpha", config.alpha},
          {"epsilon", config.epsilon},
          {"eta", config.eta},
          {"beta", config.beta},
          {"gamma", config.gamma},
          {"tau", config.tau},
          {"enforce_nonneg_loads", config.enforce_nonneg_loads},
          {"cost_sensitivity_includes_penalty",
           config.cost_sensitivity_includes_penalty},
          {"attack_set_rounds", config.attack_set_rounds},
          {"node_limit", config.solve.node_limit}};
}

absl::StatusOr<SynthConfig> SynthConfigFromJson(const json& value) {
  if (!value.is_object()) {
    return absl::InvalidArgumentError("config must be an object");
  }
  SynthConfig c;
  for (absl::Status status :
       {Optional(value, "alpha", &c.alpha),
        Optional(value, "epsilon", &c.epsilon), Optional(value, "eta", &c.eta),
        Optional(value, "beta", &c.beta), Optional(value, "gamma", &c.gamma),
        Optional(value, "tau", &c.tau),
        Optional(value, "enforce_nonneg_loads", &c.enforce_nonneg_loads),
        Optional(value, "cost_sensitivity_includes_penalty",
                 &c.cost_sensitivity_includes_penalty),
        Optional(value, "attack_set_rounds", &c.attack_set_rounds),
        Optional(value, "node_limit", &c.solve.node_limit)}) {
    if (!status.ok()) return status;
  }
  return c;
}

json ReleaseToJson(const SyntheticRelease& release, const GridCase& grid,
                   const SynthConfig& config) {
  json bus_ids = json::array();
  for (const Bus& bus : grid.buses) bus_ids.push_back(bus.id);
  json rows = json::array();
  for (int k : release.rows) rows.push_back(k);
  return {
      {"format_version", kReleaseFormatVersion},
      {"case", grid.name},
      {"algorithm", ReleaseAlgorithmName(release.algorithm)},
      {"seed", release.seed},
      {"config", SynthConfigToJson(config)},
      {"buses", std::move(bus_ids)},
      {"d_tilde", VectorToJson(release.d_tilde)},
      {"d_initial", VectorToJson(release.d_initial)},
      {"cost_target", release.c_target},
      {"robust_rows", std::move(rows)},
      {"attack_set",
       {{"delta_lo", VectorToJson(release.delta.delta_lo)},
        {"delta_hi", VectorToJson(release.delta.delta_hi)}}},
      {"privacy", PrivacyToJson(release.privacy)},
      {"ledger", LedgerToJson(release.ledger)},
      {"outcome",
       {{"c_opf", release.c_opf},
        {"c_att_ro", release.c_att_ro},
        {"objective", release.stats.objective},
        {"proven_optimal", release.stats.proven_optimal},
        {"status", SolveStatusName(release.stats.status)},
        {"node_count", release.stats.node_count},
        {"lp_solves", release.stats.lp_solves},
        {"rounds", release.rounds}}},
      {"size",
       {{"program", release.size.label},
        {"n_variables", release.size.n_variables},
        {"n_complementarities", release.size.n_complementarities}}}};
}

absl::StatusOr<ReleaseRecord> ReleaseFromJson(const json& value) {
  if (!value.is_object()) {
    return absl::InvalidArgumentError("release must be a JSON object");
  }
  ReleaseRecord r;
  int version = 0;
  std::string algo;
  if (absl::Status s = Require(value, "format_version", &version); !s.ok()) {
    return s;
  }
  if (version != kReleaseFormatVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported release format version ", version));
  }
  for (absl::Status status :
       {Require(value, "case", &r.case_name),
        Require(value, "algorithm", &algo), Require(value, "seed", &r.seed),
        Require(value, "buses", &r.bus_ids),
        Optional(value, "robust_rows", &r.rows)}) {
    if (!status.ok()) return status;
  }
  absl::StatusOr<ReleaseAlgorithm> parsed = ParseReleaseAlgorithm(algo);
  if (!parsed.ok()) return parsed.status();
  r.algorithm = *parsed;
  if (!value.contains("d_tilde")) {
    return absl::InvalidArgumentError("missing key 'd_tilde'");
  }
  absl::StatusOr<Eigen::VectorXd> d = VectorFromJson(value["d_tilde"],
                                                     "d_tilde");
  if (!d.ok()) return d.status();
  if (d->size() != static_cast<Eigen::Index>(r.bus_ids.size())) {
    return absl::InvalidArgumentError(
        absl::StrCat("d_tilde has ", d->size(), " entries for ",
                     r.bus_ids.size(), " buses"));
  }
  r.d_tilde = *std::move(d);
  for (const char* key : {"config", "privacy", "ledger"}) {
    if (!value.contains(key)) {
      return absl::InvalidArgumentError(absl::StrCat("missing key '", key,
                                                     "'"));
    }
  }
  absl::StatusOr<SynthConfig> config = SynthConfigFromJson(value["config"]);
  if (!config.ok()) return config.status();
  r.config = *config;
  absl::StatusOr<PrivacyParams> privacy = PrivacyFromJson(value["privacy"]);
  if (!privacy.ok()) return privacy.status();
  r.privacy = *privacy;
  absl::StatusOr<Ledger> ledger = LedgerFromJson(value["ledger"]);
  if (!ledger.ok()) return ledger.status();
  r.ledger = *std::move(ledger);
  return r;
}

}  // namespace gridsynth
