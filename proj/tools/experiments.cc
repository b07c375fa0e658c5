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


#include "experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "gridsynth/attack.h"
#include "gridsynth/dp.h"
#include "gridsynth/opf.h"
#include "gridsynth/synth.h"
#include "gridsynth/version.h"

#ifndef GRIDSYNTH_DATA_DIR
#define GRIDSYNTH_DATA_DIR "data"
#endif

namespace gridsynth {
namespace {

constexpr char kCase5[] = "pglib_opf_case5_pjm__api.m";
constexpr char kCase14[] = "pglib_opf_case14_ieee__api.m";
constexpr char kCase24[] = "pglib_opf_case24_ieee_rts__api_linear.m";
constexpr char kCase118[] = "pglib_opf_case118_ieee__api.m";

constexpr double kTable1Etas[] = {0.05, 0.10, 0.15};
constexpr double kTable2Alphas[] = {20.0, 100.0, 200.0};

std::vector<std::string> CasesOr(const RunConfig& config,
                                 std::vector<std::string> fallback) {
  if (!config.case_paths.empty()) return config.case_paths;
  for (std::string& name : fallback) name = DataPath(name);
  return fallback;
}

std::string EtaLabel(double eta) {
  return absl::StrFormat("%g", std::round(eta * 1000.0) / 10.0);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

struct SampleOutcome {
  std::vector<ExperimentRow> rows;
};

// One release per seed, evaluated at each eta.
absl::StatusOr<std::vector<SampleOutcome>> RunSamples(
    const RunConfig& config, const LoadedCase& lc, ReleaseAlgorithm algo,
    const SynthConfig& synth, const std::vector<double>& etas,
    const std::string& setting_prefix) {
  std::function<absl::StatusOr<SampleOutcome>(int)> one =
      [&](int i) -> absl::StatusOr<SampleOutcome> {
    const uint64_t seed = config.seed + static_cast<uint64_t>(i);
    const Clock::time_point start = Clock::now();
    absl::StatusOr<SyntheticRelease> release =
        RunRelease(lc.model, lc.d, algo, synth, seed);
    if (!release.ok()) {
      return absl::Status(release.status().code(),
                          absl::StrCat(lc.grid.name, " seed ", seed, ": ",
                                       release.status().message()));
    }
    const double release_ms = MillisSince(start);
    SampleOutcome out;
    for (double eta : etas) {
      const Clock::time_point eval_start = Clock::now();
      absl::StatusOr<Evaluation> eval =
          EvaluateRelease(lc.model, release->d_tilde, eta, config.node_limit);
      if (!eval.ok()) return eval.status();
      ExperimentRow row;
      row.testbed = lc.grid.name;
      row.algorithm = ReleaseAlgorithmName(algo);
      row.setting = absl::StrCat(setting_prefix, "eta=", FormatNumber(eta));
      row.seed = seed;
      row.eval = *eval;
      row.wall_time_ms = release_ms + MillisSince(eval_start);
      out.rows.push_back(std::move(row));
    }
    return out;
  };
  return ParallelMap<SampleOutcome>(config.samples, config.jobs, one);
}

void Append(const std::vector<SampleOutcome>& samples,
            std::vector<ExperimentRow>* rows) {
  for (const SampleOutcome& s : samples) {
    rows->insert(rows->end(), s.rows.begin(), s.rows.end());
  }
}

}  // namespace

std::string DataPath(absl::string_view file_name) {
  return absl::StrCat(GRIDSYNTH_DATA_DIR, "/", file_name);
}

absl::StatusOr<LoadedCase> LoadCase(const std::string& path, double psi) {
  LoadedCase lc;
  lc.path = path;
  absl::StatusOr<GridCase> grid = ReadCaseFile(path);
  if (!grid.ok()) return grid.status();
  lc.grid = *std::move(grid);
  absl::StatusOr<PtdfMatrix> ptdf = ComputePtdf(lc.grid);
  if (!ptdf.ok()) return ptdf.status();
  PenaltyConfig penalty;
  penalty.psi = psi;
  absl::StatusOr<CompactModel> model = BuildCompact(lc.grid, *ptdf, penalty);
  if (!model.ok()) return model.status();
  lc.model = *std::move(model);
  const std::vector<double> loads = lc.grid.Loads();
  lc.d = Eigen::Map<const Eigen::VectorXd>(
      loads.data(), static_cast<Eigen::Index>(loads.size()));
  return lc;
}

std::string CsvTable::Render(absl::string_view provenance) const {
  std::string out = absl::StrCat(provenance, "\n");
  absl::StrAppend(&out, absl::StrJoin(header, ","), "\n");
  for (const std::vector<std::string>& row : rows) {
    absl::StrAppend(&out, absl::StrJoin(row, ","), "\n");
  }
  return out;
}

std::string ProvenanceLine(const RunConfig& config) {
  return absl::StrCat("# gridsynth ", kVersion, " config=", ConfigHash(config),
                      " seed=", config.seed);
}

std::string FormatNumber(double value) {
  std::string text = absl::StrFormat("%.6f", value);
  if (text == "-0.000000") text.erase(0, 1);
  return text;
}

absl::StatusOr<Evaluation> EvaluateRelease(const CompactModel& model,
                                           const Eigen::VectorXd& d_tilde,
                                           double eta, int64_t node_limit) {
  const OpfResult opf = SolveOpf(model, d_tilde);
  if (!opf.feasible) {
    return absl::FailedPreconditionError(
        absl::StrCat("released load admits no feasible OPF: ",
                     opf.certificate));
  }
  absl::StatusOr<AttackSet> set = MakeAttackSet(d_tilde.cwiseMax(0.0), eta);
  if (!set.ok()) return set.status();
  BoAttackOptions options;
  options.branch.node_limit = node_limit;
  absl::StatusOr<AttackResult> bo = BoAttack(model, d_tilde, *set, options);
  if (!bo.ok()) return bo.status();
  Evaluation e;
  e.c_opf = opf.cost;
  e.c_att_bo = bo->cost;
  e.proven_optimal = bo->proven_optimal;
  e.damage_percent =
      opf.cost != 0.0 ? 100.0 * (bo->cost - opf.cost) / opf.cost : 0.0;
  return e;
}

CsvTable RowsTable(const std::vector<ExperimentRow>& rows, bool timings) {
  CsvTable t;
  t.header = {"testbed", "algorithm", "setting", "seed", "c_opf",
              "c_att_bo", "damage_percent", "bo_proven_optimal"};
  if (timings) t.header.push_back("wall_time_ms");
  std::vector<const ExperimentRow*> sorted;
  for (const ExperimentRow& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ExperimentRow* a, const ExperimentRow* b) {
                     return a->seed < b->seed;
                   });
  for (const ExperimentRow* r : sorted) {
    std::vector<std::string> cells = {
        r->testbed,
        r->algorithm,
        r->setting,
        absl::StrCat(r->seed),
        FormatNumber(r->eval.c_opf),
        FormatNumber(r->eval.c_att_bo),
        FormatNumber(r->eval.damage_percent),
        r->eval.proven_optimal ? "1" : "0"};
    if (timings) cells.push_back(absl::StrFormat("%.3f", r->wall_time_ms));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

absl::StatusOr<ExperimentOutput> RunTable1(const RunConfig& config) {
  CsvTable summary;
  summary.header = {"testbed", "load", "c_opf"};
  for (double eta : kTable1Etas) {
    summary.header.push_back(absl::StrCat("c_att_bo_eta", EtaLabel(eta)));
  }
  for (double eta : kTable1Etas) {
    summary.header.push_back(absl::StrCat("damage_pct_eta", EtaLabel(eta)));
  }
  std::vector<ExperimentRow> detail;
  const std::vector<double> etas(std::begin(kTable1Etas),
                                 std::end(kTable1Etas));
  for (const std::string& path : CasesOr(config, {kCase5, kCase14})) {
    absl::StatusOr<LoadedCase> lc = LoadCase(path, config.psi);
    if (!lc.ok()) return lc.status();

    std::vector<std::string> actual = {lc->grid.name, "actual"};
    std::vector<double> bo_actual;
    std::vector<double> dmg_actual;
    double c_opf_actual = 0.0;
    for (double eta : etas) {
      absl::StatusOr<Evaluation> e =
          EvaluateRelease(lc->model, lc->d, eta, config.node_limit);
      if (!e.ok()) return e.status();
      c_opf_actual = e->c_opf;
      bo_actual.push_back(e->c_att_bo);
      dmg_actual.push_back(e->damage_percent);
    }
    actual.push_back(FormatNumber(c_opf_actual));
    for (double v : bo_actual) actual.push_back(FormatNumber(v));
    for (double v : dmg_actual) actual.push_back(FormatNumber(v));
    summary.rows.push_back(std::move(actual));

    const SynthConfig synth =
        ToSynthConfig(config, ResolveAlpha(config, lc->grid));
    absl::StatusOr<std::vector<SampleOutcome>> samples =
        RunSamples(config, *lc, ReleaseAlgorithm::kPp, synth, etas, "");
    if (!samples.ok()) return samples.status();
    std::vector<double> c_opf;
    std::vector<std::vector<double>> bo(etas.size());
    std::vector<std::vector<double>> dmg(etas.size());
    for (const SampleOutcome& s : *samples) {
      c_opf.push_back(s.rows.front().eval.c_opf);
      for (size_t j = 0; j < etas.size(); ++j) {
        bo[j].push_back(s.rows[j].eval.c_att_bo);
        dmg[j].push_back(s.rows[j].eval.damage_percent);
      }
    }
    Append(*samples, &detail);
    std::vector<std::string> synth_row = {lc->grid.name, "synthetic",
                                          FormatNumber(Mean(c_opf))};
    for (const auto& v : bo) synth_row.push_back(FormatNumber(Mean(v)));
    for (const auto& v : dmg) synth_row.push_back(FormatNumber(Mean(v)));
    summary.rows.push_back(std::move(synth_row));
  }
  ExperimentOutput out;
  out.files.emplace_back("table1.csv", std::move(summary));
  out.files.emplace_back("table1_samples.csv",
                         RowsTable(detail, config.timings));
  return out;
}

absl::StatusOr<ExperimentOutput> RunTable2(const RunConfig& config) {
  const std::vector<double> betas = {0.0, config.gamma / 2.0, config.gamma,
                                     1.0, 10.0};
  const std::vector<double> alphas(std::begin(kTable2Alphas),
                             std::end(kTable2Alphas));
  CsvTable summary;
  summary.header = {"testbed", "beta"};
  for (double alpha : alphas) {
    const std::string a = absl::StrFormat("%g", alpha);
    summary.header.push_back(absl::StrCat("c_opf_alpha", a));
    summary.header.push_back(absl::StrCat("c_att_bo_alpha", a));
    summary.header.push_back(absl::StrCat("flat_fraction_alpha", a));
  }
  std::vector<ExperimentRow> detail;
  for (const std::string& path : CasesOr(config, {kCase5})) {
    absl::StatusOr<LoadedCase> lc = LoadCase(path, config.psi);
    if (!lc.ok()) return lc.status();
    for (double beta : betas) {
      std::vector<std::string> row = {lc->grid.name, FormatNumber(beta)};
      for (double alpha : alphas) {
        RunConfig run = config;
        run.beta = beta;
        SynthConfig synth = ToSynthConfig(run, alpha);
        absl::StatusOr<std::vector<SampleOutcome>> samples = RunSamples(
            run, *lc, ReleaseAlgorithm::kCro, synth, {config.eta},
            absl::StrCat("beta=", FormatNumber(beta),
                         ";alpha=", FormatNumber(alpha), ";"));
        if (!samples.ok()) return samples.status();
        std::vector<double> c_opf;
        std::vector<double> bo;
        int flat = 0;
        for (const SampleOutcome& s : *samples) {
          const Evaluation& e = s.rows.front().eval;
          c_opf.push_back(e.c_opf);
          bo.push_back(e.c_att_bo);
          if (e.c_att_bo - e.c_opf <= 1e-4 * std::abs(e.c_opf)) ++flat;
        }
        Append(*samples, &detail);
        row.push_back(FormatNumber(Mean(c_opf)));
        row.push_back(FormatNumber(Mean(bo)));
        row.push_back(FormatNumber(static_cast<double>(flat) /
                                   static_cast<double>(samples->size())));
      }
      summary.rows.push_back(std::move(row));
    }
  }
  ExperimentOutput out;
  out.files.emplace_back("table2.csv", std::move(summary));
  out.files.emplace_back("table2_samples.csv",
                         RowsTable(detail, config.timings));
  return out;
}

absl::StatusOr<ExperimentOutput> RunFig3(const RunConfig& config) {
  CsvTable t;
  t.header = {"testbed", "n_bus", "program", "n_variables",
              "n_complementarities"};
  for (const std::string& path :
       CasesOr(config, {kCase5, kCase14, kCase24, kCase118})) {
    absl::StatusOr<LoadedCase> lc = LoadCase(path, config.psi);
    if (!lc.ok()) return lc.status();
    std::vector<int> rows = SelectionCandidates(lc->model);
    if (static_cast<int>(rows.size()) > config.tau) rows.resize(config.tau);
    for (ReleaseAlgorithm algo :
         {ReleaseAlgorithm::kPp, ReleaseAlgorithm::kCroExp,
          ReleaseAlgorithm::kCro}) {
      absl::StatusOr<SizeReport> size = ReportSize(lc->model, algo, rows);
      if (!size.ok()) return size.status();
      t.rows.push_back({lc->grid.name, absl::StrCat(lc->grid.num_buses()),
                        size->label, absl::StrCat(size->n_variables),
                        absl::StrCat(size->n_complementarities)});
    }
  }
  ExperimentOutput out;
  out.files.emplace_back("fig3.csv", std::move(t));
  return out;
}

absl::StatusOr<ExperimentOutput> RunFig4(const RunConfig& config) {
  CsvTable summary;
  summary.header = {"testbed", "tau", "mean_damage_pct", "p10_damage_pct",
                    "p90_damage_pct", "mean_c_opf", "mean_c_att_bo"};
  std::vector<ExperimentRow> detail;
  for (const std::string& path : CasesOr(config, {kCase14})) {
    absl::StatusOr<LoadedCase> lc = LoadCase(path, config.psi);
    if (!lc.ok()) return lc.status();
    for (int tau = 0; tau <= config.tau_max; ++tau) {
      RunConfig run = config;
      run.tau = tau;
      const SynthConfig synth = ToSynthConfig(run, ResolveAlpha(run, lc->grid));
      absl::StatusOr<std::vector<SampleOutcome>> samples =
          RunSamples(run, *lc, ReleaseAlgorithm::kCroExp, synth, {config.eta},
                     absl::StrCat("tau=", tau, ";"));
      if (!samples.ok()) return samples.status();
      std::vector<double> dmg;
      std::vector<double> c_opf;
      std::vector<double> bo;
      for (const SampleOutcome& s : *samples) {
        const Evaluation& e = s.rows.front().eval;
        dmg.push_back(e.damage_percent);
        c_opf.push_back(e.c_opf);
        bo.push_back(e.c_att_bo);
      }
      Append(*samples, &detail);
      summary.rows.push_back(
          {lc->grid.name, absl::StrCat(tau), FormatNumber(Mean(dmg)),
           FormatNumber(Quantile(dmg, 0.1)), FormatNumber(Quantile(dmg, 0.9)),
           FormatNumber(Mean(c_opf)), FormatNumber(Mean(bo))});
    }
  }
  ExperimentOutput out;
  out.files.emplace_back("fig4.csv", std::move(summary));
  out.files.emplace_back("fig4_samples.csv", RowsTable(detail, config.timings));
  return out;
}

absl::StatusOr<ExperimentOutput> RunExperiment(absl::string_view name,
                                               const RunConfig& config) {
  if (name == "table1") return RunTable1(config);
  if (name == "table2") return RunTable2(config);
  if (name == "fig3") return RunFig3(config);
  if (name == "fig4") return RunFig4(config);
  return absl::InvalidArgumentError(
      absl::StrCat("unknown experiment '", name,
                   "'; expected table1, table2, fig3 or fig4"));
}

}  // namespace gridsynth
