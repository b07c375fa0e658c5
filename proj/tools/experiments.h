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


// Monte Carlo experiment harness and CSV output.

#ifndef GRIDSYNTH_TOOLS_EXPERIMENTS_H_
#define GRIDSYNTH_TOOLS_EXPERIMENTS_H_

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "gridsynth/case_io.h"
#include "gridsynth/compact_model.h"
#include "run_config.h"

namespace gridsynth {

struct LoadedCase {
  std::string path;
  GridCase grid;
  CompactModel model;
  Eigen::VectorXd d;
};

absl::StatusOr<LoadedCase> LoadCase(const std::string& path, double psi = 0.0);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Provenance comment, header, then rows.
  std::string Render(absl::string_view provenance) const;
};

// "# gridsynth <version> config=<hash> seed=<seed>".
std::string ProvenanceLine(const RunConfig& config);

// Fixed-precision rendering used in every CSV cell.
std::string FormatNumber(double value);

struct Evaluation {
  double c_opf = 0.0;
  double c_att_bo = 0.0;
  double damage_percent = 0.0;
  bool proven_optimal = true;
};

// Bilevel attack on a released load vector with bounds eta * max(d~, 0).
absl::StatusOr<Evaluation> EvaluateRelease(const CompactModel& model,
                                           const Eigen::VectorXd& d_tilde,
                                           double eta, int64_t node_limit);

struct ExperimentRow {
  std::string testbed;
  std::string algorithm;
  std::string setting;
  uint64_t seed = 0;
  Evaluation eval;
  double wall_time_ms = 0.0;
};

CsvTable RowsTable(const std::vector<ExperimentRow>& rows, bool timings);

// Linear interpolation between order statistics; q in [0, 1].
double Quantile(std::vector<double> values, double q);

// fn(0..count-1) on `jobs` threads. Results keep index order; the first
// error by index wins.
template <typename T>
absl::StatusOr<std::vector<T>> ParallelMap(
    int count, int jobs, const std::function<absl::StatusOr<T>(int)>& fn) {
  std::vector<std::optional<absl::StatusOr<T>>> slots(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) slots[i].emplace(fn(i));
  };
  const int threads = std::max(1, std::min(jobs, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& slot : slots) {
    if (!slot->ok()) return slot->status();
    out.push_back(*std::move(*slot));
  }
  return out;
}

struct ExperimentOutput {
  // File name and table, in writing order.
  std::vector<std::pair<std::string, CsvTable>> files;
};

inline constexpr const char* kExperimentNames[] = {"table1", "table2", "fig3",
                                                   "fig4"};

// Cases default to the bundled testbeds when the config lists none.
absl::StatusOr<ExperimentOutput> RunExperiment(absl::string_view name,
                                               const RunConfig& config);

absl::StatusOr<ExperimentOutput> RunTable1(const RunConfig& config);
absl::StatusOr<ExperimentOutput> RunTable2(const RunConfig& config);
absl::StatusOr<ExperimentOutput> RunFig3(const RunConfig& config);
absl::StatusOr<ExperimentOutput> RunFig4(const RunConfig& config);

// Bundled case file by base name, e.g. "pglib_opf_case5_pjm__api.m".
std::string DataPath(absl::string_view file_name);

}  // namespace gridsynth

#endif  // GRIDSYNTH_TOOLS_EXPERIMENTS_H_
