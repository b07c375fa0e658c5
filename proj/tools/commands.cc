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


#include "commands.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "experiments.h"
#include "gridsynth/attack.h"
#include "gridsynth/case_io.h"
#include "gridsynth/compact_model.h"
#include "gridsynth/dp.h"
#include "gridsynth/opf.h"
#include "gridsynth/release_json.h"
#include "gridsynth/synth.h"
#include "gridsynth/version.h"
#include "nlohmann/json.hpp"
#include "run_config.h"

namespace gridsynth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliState {
  RunConfig config;
  std::string algo = "cro";
  std::string dump_case;
  std::string json_path;
  std::string export_lp;
  std::string attack_mode = "all";
  std::string experiment;
  std::vector<std::string> releases;
  bool eta_given = false;
};

// Exit code for a failed status: missing or malformed inputs are usage
// errors.
int ExitFor(const absl::Status& status) {
  return status.code() == absl::StatusCode::kNotFound ||
                 status.code() == absl::StatusCode::kInvalidArgument
             ? kExitUsage
             : kExitFailure;
}

int Fail(std::ostream& err, const absl::Status& status) {
  err << "gridsynth: " << status.message() << "\n";
  return ExitFor(status);
}

absl::Status WriteFile(const std::string& path, const std::string& content) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  out << content;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("error writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": invalid JSON: ", e.what()));
  }
}

std::string JoinPath(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

absl::StatusOr<LoadedCase> SingleCase(const RunConfig& config) {
  if (config.case_paths.size() != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected exactly one --case, got ",
                     config.case_paths.size()));
  }
  return LoadCase(config.case_paths.front(), config.psi);
}

// Release files named directly or found as release_*.json in a directory,
// sorted by path.
absl::StatusOr<std::vector<std::string>> ExpandReleases(
    const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const std::string& input : inputs) {
    std::error_code ec;
    if (fs::is_directory(input, ec)) {
      std::vector<std::string> found;
      for (const fs::directory_entry& entry : fs::directory_iterator(input)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && absl::StartsWith(name, "release_") &&
            absl::EndsWith(name, ".json")) {
          found.push_back(entry.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(input, ec)) {
      out.push_back(input);
    } else {
      return absl::NotFoundError(absl::StrCat("release not found: ", input));
    }
  }
  if (out.empty()) return absl::NotFoundError("no release files given");
  return out;
}

absl::Status CheckBuses(const ReleaseRecord& record, const GridCase& grid) {
  if (static_cast<int>(record.bus_ids.size()) != grid.num_buses()) {
    return absl::InvalidArgumentError(
        absl::StrCat("release has ", record.bus_ids.size(),
                     " buses, case has ", grid.num_buses()));
  }
  for (int i = 0; i < grid.num_buses(); ++i) {
    if (record.bus_ids[i] != grid.buses[i].id) {
      return absl::InvalidArgumentError(
          absl::StrCat("release bus ", i, " is ", record.bus_ids[i],
                       ", case bus is ", grid.buses[i].id));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ReleaseRecord> ReadRelease(const std::string& path) {
  absl::StatusOr<json> value = ReadJsonFile(path);
  if (!value.ok()) return value.status();
  absl::StatusOr<ReleaseRecord> record = ReleaseFromJson(*value);
  if (!record.ok()) {
    return absl::Status(record.status().code(),
                        absl::StrCat(path, ": ", record.status().message()));
  }
  return record;
}

Eigen::VectorXd LineFlows(const LoadedCase& lc, const Eigen::VectorXd& p,
                          const PtdfMatrix& ptdf) {
  Eigen::VectorXd injection = -lc.d;
  for (int g = 0; g < lc.grid.num_generators(); ++g) {
    injection[lc.grid.BusIndex(lc.grid.generators[g].bus)] += p[g];
  }
  return ptdf.entries * injection;
}

int CmdOpf(const CliState& s, std::ostream& out, std::ostream& err) {
  absl::StatusOr<LoadedCase> lc = SingleCase(s.config);
  if (!lc.ok()) return Fail(err, lc.status());
  if (!s.dump_case.empty()) {
    const std::string text = CaseToJson(lc->grid).dump(2) + "\n";
    if (s.dump_case == "-") {
      out << text;
    } else if (absl::Status st = WriteFile(s.dump_case, text); !st.ok()) {
      return Fail(err, st);
    }
  }
  if (!s.export_lp.empty()) {
    if (absl::Status st =
            WriteFile(s.export_lp, ExportCompactLp(lc->model, lc->d));
        !st.ok()) {
      return Fail(err, st);
    }
  }
  // Keep stdout parseable as JSON.
  if (s.dump_case == "-") return kExitOk;
  const OpfResult opf = SolveOpf(lc->model, lc->d);
  if (!opf.feasible) {
    err << "gridsynth: OPF infeasible: " << opf.certificate << "\n";
    return kExitFailure;
  }
  absl::StatusOr<PtdfMatrix> ptdf = ComputePtdf(lc->grid);
  if (!ptdf.ok()) return Fail(err, ptdf.status());
  const Eigen::VectorXd flows = LineFlows(*lc, opf.p, *ptdf);

  out << absl::StrFormat("case %s\ncost %.6f\n", lc->grid.name, opf.cost);
  json dispatch = json::array();
  for (int g = 0; g < lc->grid.num_generators(); ++g) {
    const Generator& gen = lc->grid.generators[g];
    out << absl::StrFormat("gen %d bus %d p %.6f\n", g, gen.bus, opf.p[g]);
    dispatch.push_back({{"gen", g}, {"bus", gen.bus}, {"p_mw", opf.p[g]}});
  }
  json lines = json::array();
  int violated = 0;
  double total_violation = 0.0;
  for (int l = 0; l < lc->grid.num_branches(); ++l) {
    const Branch& br = lc->grid.branches[l];
    const double v = opf.v[l];
    if (v > 1e-9) {
      ++violated;
      total_violation += v;
    }
    out << absl::StrFormat("line %d %d-%d flow %.6f limit %.6f violation %.6f\n",
                           l, br.from_bus, br.to_bus, flows[l], br.capacity_mw,
                           v);
    lines.push_back({{"line", l},
                     {"from", br.from_bus},
                     {"to", br.to_bus},
                     {"flow_mw", flows[l]},
                     {"violation_mw", v}});
  }
  out << absl::StrFormat("violations %d total %.6f\n", violated,
                         total_violation);
  if (!s.json_path.empty()) {
    const json report = {{"case", lc->grid.name},
                         {"cost", opf.cost},
                         {"dispatch", std::move(dispatch)},
                         {"lines", std::move(lines)},
                         {"violated_lines", violated},
                         {"total_violation_mw", total_violation}};
    if (absl::Status st = WriteFile(s.json_path, report.dump(2) + "\n");
        !st.ok()) {
      return Fail(err, st);
    }
  }
  return kExitOk;
}

int CmdAttack(const CliState& s, std::ostream& out, std::ostream& err) {
  absl::StatusOr<LoadedCase> lc = SingleCase(s.config);
  if (!lc.ok()) return Fail(err, lc.status());
  Eigen::VectorXd d = lc->d;
  if (!s.releases.empty()) {
    if (s.releases.size() != 1) {
      return Fail(err, absl::InvalidArgumentError(
                           "attack takes at most one --release"));
    }
    absl::StatusOr<ReleaseRecord> record = ReadRelease(s.releases.front());
    if (!record.ok()) return Fail(err, record.status());
    if (absl::Status st = CheckBuses(*record, lc->grid); !st.ok()) {
      return Fail(err, st);
    }
    d = record->d_tilde;
  }
  const std::string& mode = s.attack_mode;
  absl::StatusOr<AttackSet> set =
      MakeAttackSet(d.cwiseMax(0.0), s.config.eta);
  if (!set.ok()) return Fail(err, set.status());
  const OpfResult opf = SolveOpf(lc->model, d);
  if (!opf.feasible) {
    err << "gridsynth: OPF infeasible: " << opf.certificate << "\n";
    return kExitFailure;
  }
  json report = {{"case", lc->grid.name},
                 {"eta", s.config.eta},
                 {"c_opf", opf.cost}};
  out << absl::StrFormat("case %s eta %g\nc_opf %.6f\n", lc->grid.name,
                         s.config.eta, opf.cost);
  if (mode == "bo" || mode == "all") {
    BoAttackOptions options;
    options.branch.node_limit = s.config.node_limit;
    absl::StatusOr<AttackResult> bo = BoAttack(lc->model, d, *set, options);
    if (!bo.ok()) return Fail(err, bo.status());
    const double damage =
        opf.cost != 0.0 ? 100.0 * (bo->cost - opf.cost) / opf.cost : 0.0;
    out << absl::StrFormat("c_att_bo %.6f damage_percent %.6f%s\n", bo->cost,
                           damage, bo->proven_optimal ? "" : " (not proven)");
    std::vector<double> delta;
    if (!bo->delta.empty()) {
      delta.assign(bo->delta.front().data(),
                   bo->delta.front().data() + bo->delta.front().size());
      std::vector<std::string> parts;
      for (int i = 0; i < lc->grid.num_buses(); ++i) {
        if (std::abs(delta[i]) > 1e-9) {
          parts.push_back(absl::StrFormat("%d:%+.6f", lc->grid.buses[i].id,
                                          delta[i]));
        }
      }
      out << "delta " << (parts.empty() ? "none" : absl::StrJoin(parts, " "))
          << "\n";
    }
    report["c_att_bo"] = bo->cost;
    report["bo_proven_optimal"] = bo->proven_optimal;
    report["bo_nodes"] = bo->node_count;
    report["delta"] = delta;
    report["damage_percent"] = damage;
  }
  if (mode == "ro" || mode == "all") {
    absl::StatusOr<AttackResult> ro = RoAttack(lc->model, d, *set);
    if (!ro.ok()) return Fail(err, ro.status());
    out << absl::StrFormat("c_att_ro %.6f\n", ro->cost);
    report["c_att_ro"] = ro->cost;
    if (!s.export_lp.empty()) {
      absl::StatusOr<RoLp> lp =
          BuildRoLp(lc->model, d, *set, AttackableRows(lc->model));
      if (!lp.ok()) return Fail(err, lp.status());
      if (absl::Status st = WriteFile(s.export_lp, WriteLpFile(lp->lp));
          !st.ok()) {
        return Fail(err, st);
      }
    }
  }
  if (mode == "oracle" || mode == "all") {
    if (set->NumActive() <= kOracleMaxActive) {
      absl::StatusOr<AttackResult> oracle = OracleAttack(lc->model, d, *set);
      if (!oracle.ok()) return Fail(err, oracle.status());
      out << absl::StrFormat("c_att_oracle %.6f\n", oracle->cost);
      report["c_att_oracle"] = oracle->cost;
    } else if (mode == "oracle") {
      return Fail(err, absl::InvalidArgumentError(absl::StrCat(
                           "oracle needs at most ", kOracleMaxActive,
                           " load buses, case has ", set->NumActive())));
    }
  }
  if (!s.json_path.empty()) {
    if (absl::Status st = WriteFile(s.json_path, report.dump(2) + "\n");
        !st.ok()) {
      return Fail(err, st);
    }
  }
  return kExitOk;
}

int CmdSynthesize(const CliState& s, std::ostream& out, std::ostream& err) {
  const RunConfig& config = s.config;
  absl::StatusOr<LoadedCase> lc = SingleCase(config);
  if (!lc.ok()) return Fail(err, lc.status());
  const SynthConfig synth = ToSynthConfig(config, ResolveAlpha(config, lc->grid));
  struct Done {
    SyntheticRelease release;
    double wall_ms = 0.0;
  };
  std::function<absl::StatusOr<Done>(int)> one =
      [&](int i) -> absl::StatusOr<Done> {
    const auto start = std::chrono::steady_clock::now();
    absl::StatusOr<SyntheticRelease> r = RunRelease(
        lc->model, lc->d, config.algorithm, synth,
        config.seed + static_cast<uint64_t>(i));
    if (!r.ok()) return r.status();
    return Done{*std::move(r),
                std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count()};
  };
  absl::StatusOr<std::vector<Done>> done =
      ParallelMap<Done>(config.samples, config.jobs, one);
  if (!done.ok()) return Fail(err, done.status());

  for (const Done& d : *done) {
    const AccountVerdict verdict = Account(d.release.privacy, d.release.ledger);
    if (!verdict.ok) {
      err << "gridsynth: seed " << d.release.seed << ": privacy ledger "
          << "rejected: " << absl::StrJoin(verdict.messages, "; ") << "\n";
      return kExitFailure;
    }
  }
  const std::string dir = OutputDir(config);
  CsvTable summary;
  summary.header = {"testbed",   "algorithm",      "seed",
                    "c_opf",     "c_target",       "c_att_ro",
                    "objective", "proven_optimal", "node_count",
                    "rounds",    "ledger_entries", "ledger_total"};
  if (config.timings) summary.header.push_back("wall_time_ms");
  for (const Done& d : *done) {
    const SyntheticRelease& r = d.release;
    const std::string path =
        JoinPath(dir, absl::StrCat("release_", r.seed, ".json"));
    if (absl::Status st =
            WriteFile(path, ReleaseToJson(r, lc->grid, synth).dump(2) + "\n");
        !st.ok()) {
      return Fail(err, st);
    }
    std::vector<std::string> row = {
        lc->grid.name,
        ReleaseAlgorithmName(r.algorithm),
        absl::StrCat(r.seed),
        FormatNumber(r.c_opf),
        FormatNumber(r.c_target),
        FormatNumber(r.c_att_ro),
        FormatNumber(r.stats.objective),
        r.stats.proven_optimal ? "1" : "0",
        absl::StrCat(r.stats.node_count),
        absl::StrCat(r.rounds),
        absl::StrCat(r.ledger.entries.size()),
        r.ledger.TotalExact().str()};
    if (config.timings) row.push_back(absl::StrFormat("%.3f", d.wall_ms));
    summary.rows.push_back(std::move(row));
  }
  const std::string summary_path = JoinPath(dir, "summary.csv");
  if (absl::Status st =
          WriteFile(summary_path, summary.Render(ProvenanceLine(config)));
      !st.ok()) {
    return Fail(err, st);
  }
  out << "wrote " << done->size() << " releases and " << summary_path << "\n";
  return kExitOk;
}

int CmdEvaluate(const CliState& s, std::ostream& out, std::ostream& err) {
  const RunConfig& config = s.config;
  absl::StatusOr<LoadedCase> lc = SingleCase(config);
  if (!lc.ok()) return Fail(err, lc.status());
  absl::StatusOr<std::vector<std::string>> paths = ExpandReleases(s.releases);
  if (!paths.ok()) return Fail(err, paths.status());
  std::vector<ReleaseRecord> records;
  for (const std::string& path : *paths) {
    absl::StatusOr<ReleaseRecord> record = ReadRelease(path);
    if (!record.ok()) return Fail(err, record.status());
    if (absl::Status st = CheckBuses(*record, lc->grid); !st.ok()) {
      return Fail(err, absl::InvalidArgumentError(
                           absl::StrCat(path, ": ", st.message())));
    }
    records.push_back(*std::move(record));
  }
  std::function<absl::StatusOr<ExperimentRow>(int)> one =
      [&](int i) -> absl::StatusOr<ExperimentRow> {
    const ReleaseRecord& r = records[i];
    const double eta = s.eta_given ? config.eta : r.config.eta;
    const auto start = std::chrono::steady_clock::now();
    absl::StatusOr<Evaluation> e =
        EvaluateRelease(lc->model, r.d_tilde, eta, config.node_limit);
    if (!e.ok()) return e.status();
    ExperimentRow row;
    row.testbed = lc->grid.name;
    row.algorithm = ReleaseAlgorithmName(r.algorithm);
    row.setting = absl::StrCat("eta=", FormatNumber(eta));
    row.seed = r.seed;
    row.eval = *e;
    row.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    return row;
  };
  absl::StatusOr<std::vector<ExperimentRow>> rows = ParallelMap<ExperimentRow>(
      static_cast<int>(records.size()), config.jobs, one);
  if (!rows.ok()) return Fail(err, rows.status());
  double mean = 0.0;
  for (const ExperimentRow& r : *rows) mean += r.eval.damage_percent;
  mean /= static_cast<double>(rows->size());
  const std::string path = JoinPath(OutputDir(config), "evaluate.csv");
  if (absl::Status st = WriteFile(
          path, RowsTable(*rows, config.timings).Render(ProvenanceLine(config)));
      !st.ok()) {
    return Fail(err, st);
  }
  out << absl::StrFormat("evaluated %d releases, mean damage %.6f%%\nwrote %s\n",
                         rows->size(), mean, path);
  return kExitOk;
}

int CmdExperiment(const CliState& s, std::ostream& out, std::ostream& err) {
  absl::StatusOr<ExperimentOutput> result =
      RunExperiment(s.experiment, s.config);
  if (!result.ok()) return Fail(err, result.status());
  const std::string provenance = ProvenanceLine(s.config);
  for (const auto& [name, table] : result->files) {
    const std::string path = JoinPath(OutputDir(s.config), name);
    if (absl::Status st = WriteFile(path, table.Render(provenance)); !st.ok()) {
      return Fail(err, st);
    }
    out << "wrote " << path << "\n";
  }
  return kExitOk;
}

int CmdValidate(const CliState& s, std::ostream& out, std::ostream& err) {
  int problems = 0;
  std::vector<LoadedCase> cases;
  for (const std::string& path : s.config.case_paths) {
    absl::StatusOr<GridCase> grid = ReadCaseFile(path);
    if (!grid.ok()) return Fail(err, grid.status());
    for (const std::string& w : grid->warnings) {
      out << path << ": warning: " << w << "\n";
    }
    const std::vector<CaseFinding> findings = ValidateCase(*grid);
    for (const CaseFinding& f : findings) {
      out << path << ": " << f.message << "\n";
    }
    problems += static_cast<int>(findings.size());
    if (findings.empty()) {
      absl::StatusOr<LoadedCase> lc = LoadCase(path, s.config.psi);
      if (!lc.ok()) return Fail(err, lc.status());
      out << path << ": ok (" << lc->grid.num_buses() << " buses, "
          << lc->grid.num_branches() << " branches, "
          << lc->grid.num_generators() << " generators, "
          << lc->model.num_rows() << " compact rows)\n";
      cases.push_back(*std::move(lc));
    }
  }
  if (!s.releases.empty()) {
    absl::StatusOr<std::vector<std::string>> paths =
        ExpandReleases(s.releases);
    if (!paths.ok()) return Fail(err, paths.status());
    for (const std::string& path : *paths) {
      absl::StatusOr<ReleaseRecord> record = ReadRelease(path);
      if (!record.ok()) {
        out << path << ": " << record.status().message() << "\n";
        ++problems;
        continue;
      }
      std::vector<std::string> issues;
      const AccountVerdict verdict = Account(record->privacy, record->ledger);
      for (const std::string& m : verdict.messages) issues.push_back(m);
      for (const LoadedCase& lc : cases) {
        if (lc.grid.name != record->case_name) continue;
        if (absl::Status st = CheckBuses(*record, lc.grid); !st.ok()) {
          issues.push_back(std::string(st.message()));
          continue;
        }
        const OpfResult opf = SolveOpf(lc.model, record->d_tilde);
        if (!opf.feasible) {
          issues.push_back(absl::StrCat("no feasible OPF: ", opf.certificate));
        }
        if (record->config.enforce_nonneg_loads &&
            record->d_tilde.minCoeff() < -1e-7) {
          issues.push_back("negative released load");
        }
      }
      for (const std::string& issue : issues) {
        out << path << ": " << issue << "\n";
      }
      if (issues.empty()) {
        out << path << ": ok (ledger total " << verdict.total.str() << ")\n";
      }
      problems += static_cast<int>(issues.size());
    }
  }
  if (s.config.case_paths.empty() && s.releases.empty()) {
    return Fail(err, absl::InvalidArgumentError(
                         "validate needs --case and/or --release"));
  }
  return problems == 0 ? kExitOk : kExitFailure;
}

void AddCommon(CLI::App* sub, CliState* s) {
  sub->add_option("--case", s->config.case_paths, "MATPOWER case file");
  sub->add_option("--config", "JSON run configuration (read before flags)");
  sub->add_option("--psi", s->config.psi,
                  "Violation penalty in $/MW (0: 10x max cost)");
  sub->add_option("-o,--output-dir", s->config.output_dir,
                  absl::StrCat("Output directory (default $", kOutputDirEnv,
                               " or .)"));
  sub->add_option("--jobs", s->config.jobs, "Parallel samples");
  sub->add_option("--node-limit", s->config.node_limit,
                  "Branch-and-bound node budget per solve");
}

void AddEta(CLI::App* sub, CliState* s) {
  sub->add_option("--eta", s->config.eta, "Attack magnitude as a load fraction");
}

void AddSynthesis(CLI::App* sub, CliState* s) {
  RunConfig& c = s->config;
  sub->add_option("--algo", s->algo, "pp, cro or cro-exp")
      ->check(CLI::IsMember({"pp", "cro", "cro-exp"}));
  sub->add_option("--alpha", c.alpha, "Adjacency in MW");
  sub->add_option("--alpha-pct", c.alpha_pct,
                  "Adjacency as a percentage of mean bus load");
  sub->add_option("--epsilon", c.epsilon, "Privacy budget");
  sub->add_option("--beta", c.beta, "Weight of the attack term");
  sub->add_option("--gamma", c.gamma, "Weight of the load deviation term");
  sub->add_option("--tau", c.tau, "Selected rows for cro-exp");
  sub->add_option("--samples", c.samples, "Releases per setting");
  sub->add_option("--seed", c.seed, "Base seed; sample i uses seed + i");
  sub->add_option("--attack-set-rounds", c.attack_set_rounds,
                  "Post-processing solves with attack set widening");
  sub->add_flag("!--allow-negative-loads", c.enforce_nonneg_loads,
                "Do not constrain released loads to be nonnegative");
  sub->add_flag("--sensitivity-includes-penalty",
                c.cost_sensitivity_includes_penalty,
                "Raise the cost sensitivity factor to the violation penalty");
  sub->add_flag("--timings", c.timings,
                "Add wall-clock columns (output no longer reproducible)");
}

// Finds --config in the raw arguments.
absl::StatusOr<std::string> ConfigArgument(const std::vector<std::string>& args) {
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        return absl::InvalidArgumentError("--config needs a file");
      }
      return args[i + 1];
    }
    if (absl::StartsWith(args[i], "--config=")) return args[i].substr(9);
  }
  return std::string();
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CliState s;
  absl::StatusOr<std::string> config_path = ConfigArgument(args);
  if (!config_path.ok()) {
    err << "gridsynth: " << config_path.status().message() << "\n";
    return kExitUsage;
  }
  if (!config_path->empty()) {
    absl::StatusOr<RunConfig> loaded = ReadRunConfigFile(*config_path);
    if (!loaded.ok()) {
      err << "gridsynth: " << loaded.status().message() << "\n";
      return kExitUsage;
    }
    s.config = *loaded;
    s.algo = ReleaseAlgorithmName(s.config.algorithm);
  }

  CLI::App app{"Differentially private synthetic load releases for DC-OPF",
               "gridsynth"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CLI::App* opf = app.add_subcommand("opf", "Solve the DC-OPF of a case");
  AddCommon(opf, &s);
  opf->add_option(
      "--dump-case", s.dump_case,
      "Write the parsed case as JSON; '-' prints it instead of the report");
  opf->add_option("--json", s.json_path, "Write the OPF report as JSON");
  opf->add_option("--export-lp", s.export_lp, "Write the OPF as an LP file");

  CLI::App* attack =
      app.add_subcommand("attack", "Load redistribution attack values");
  AddCommon(attack, &s);
  AddEta(attack, &s);
  attack->add_option("--mode", s.attack_mode, "bo, ro, oracle or all")
      ->check(CLI::IsMember({"bo", "ro", "oracle", "all"}));
  attack->add_option("--release", s.releases,
                     "Attack the released loads of this file");
  attack->add_option("--json", s.json_path, "Write the attack report as JSON");
  attack->add_option("--export-lp", s.export_lp,
                     "Write the robust attack LP file");

  CLI::App* synthesize =
      app.add_subcommand("synthesize", "Generate synthetic releases");
  AddCommon(synthesize, &s);
  AddEta(synthesize, &s);
  AddSynthesis(synthesize, &s);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Attack damage on released loads");
  AddCommon(evaluate, &s);
  CLI::Option* eta_opt =
      evaluate->add_option("--eta", s.config.eta,
                           "Attack magnitude (default: the release's)");
  evaluate->add_option("--release", s.releases,
                       "Release files or directories")
      ->required();
  evaluate->add_flag("--timings", s.config.timings, "Add wall-clock columns");

  CLI::App* experiment =
      app.add_subcommand("experiment", "Reproduce a table or figure as CSV");
  experiment->add_option("name", s.experiment, "table1, table2, fig3 or fig4")
      ->required();
  AddCommon(experiment, &s);
  AddEta(experiment, &s);
  AddSynthesis(experiment, &s);
  experiment->add_option("--tau-max", s.config.tau_max,
                         "Largest tau of the fig4 sweep");

  CLI::App* validate =
      app.add_subcommand("validate", "Check case files and release files");
  AddCommon(validate, &s);
  validate->add_option("--release", s.releases,
                       "Release files or directories to audit");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gridsynth: " << e.what() << "\n";
    for (CLI::App* sub : app.get_subcommands()) {
      err << sub->help();
    }
    return kExitUsage;
  }
  s.eta_given = eta_opt->count() > 0;
  absl::StatusOr<ReleaseAlgorithm> algo = ParseReleaseAlgorithm(s.algo);
  if (!algo.ok()) return Fail(err, algo.status());
  s.config.algorithm = *algo;
  if (absl::Status st = ValidateRunConfig(s.config); !st.ok()) {
    err << "gridsynth: " << st.message() << "\n";
    return kExitUsage;
  }

  if (opf->parsed()) return CmdOpf(s, out, err);
  if (attack->parsed()) return CmdAttack(s, out, err);
  if (synthesize->parsed()) return CmdSynthesize(s, out, err);
  if (evaluate->parsed()) return CmdEvaluate(s, out, err);
  if (experiment->parsed()) return CmdExperiment(s, out, err);
  if (validate->parsed()) return CmdValidate(s, out, err);
  return kExitUsage;
}

}  // namespace gridsynth
