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

#include "gridsynth/case_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace gridsynth {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Table {
  int first_line = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
};

struct RawCase {
  std::string function_name;
  std::optional<double> base_mva;
  std::map<std::string, Table> tables;
};

std::string StripComment(absl::string_view line) {
  bool in_quote = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\'') in_quote = !in_quote;
    if (line[i] == '%' && !in_quote) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

absl::Status SyntaxError(int line, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrFormat("syntax error at line %d: %s", line, what));
}

absl::StatusOr<double> ParseNumber(absl::string_view token, int line) {
  std::string lower = absl::AsciiStrToLower(token);
  if (lower == "inf" || lower == "+inf") return kInf;
  if (lower == "-inf") return -kInf;
  double value;
  if (!absl::SimpleAtod(token, &value)) {
    return SyntaxError(line, absl::StrCat("bad number '", token, "'"));
  }
  return value;
}

// Splits `text` into matrix rows terminated by ';' or newline and appends the
// numeric rows to `table`.
absl::Status AppendMatrixText(absl::string_view text, int line, Table* table) {
  for (absl::string_view chunk : absl::StrSplit(text, ';')) {
    std::vector<double> row;
    for (absl::string_view token :
         absl::StrSplit(chunk, absl::ByAnyChar(" \t,\r"), absl::SkipEmpty())) {
      auto value = ParseNumber(token, line);
      if (!value.ok()) return value.status();
      row.push_back(*value);
    }
    if (!row.empty()) {
      table->rows.push_back(std::move(row));
      table->row_lines.push_back(line);
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<RawCase> Tokenize(absl::string_view text) {
  RawCase raw;
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  // Name of the matrix currently being read, empty when outside a matrix.
  std::string open_matrix;
  bool in_cell = false;
  int open_line = 0;
  for (size_t n = 0; n < lines.size(); ++n) {
    const int line_no = static_cast<int>(n) + 1;
    std::string line = StripComment(lines[n]);
    absl::string_view body = absl::StripAsciiWhitespace(line);
    if (body.empty()) continue;

    if (in_cell) {
      if (body.find('}') != absl::string_view::npos) in_cell = false;
      continue;
    }
    if (!open_matrix.empty()) {
      Table& table = raw.tables[open_matrix];
      size_t close = body.find(']');
      absl::Status status = AppendMatrixText(body.substr(0, close), line_no,
                                             &table);
      if (!status.ok()) return status;
      if (close != absl::string_view::npos) open_matrix.clear();
      continue;
    }
    if (absl::ConsumePrefix(&body, "function")) {
      size_t eq = body.find('=');
      raw.function_name = std::string(absl::StripAsciiWhitespace(
          eq == absl::string_view::npos ? body : body.substr(eq + 1)));
      continue;
    }
    if (!absl::ConsumePrefix(&body, "mpc.")) {
      return SyntaxError(line_no, absl::StrCat("unexpected text '", body, "'"));
    }
    size_t eq = body.find('=');
    if (eq == absl::string_view::npos) {
      return SyntaxError(line_no, "expected '=' in assignment");
    }
    std::string field(absl::StripAsciiWhitespace(body.substr(0, eq)));
    absl::string_view value = absl::StripAsciiWhitespace(body.substr(eq + 1));
    if (absl::ConsumePrefix(&value, "[")) {
      if (raw.tables.count(field)) {
        return SyntaxError(line_no, absl::StrCat("table '", field,
                                                 "' defined twice"));
      }
      Table& table = raw.tables[field];
      table.first_line = line_no;
      size_t close = value.find(']');
      absl::Status status =
          AppendMatrixText(value.substr(0, close), line_no, &table);
      if (!status.ok()) return status;
      if (close == absl::string_view::npos) {
        open_matrix = field;
        open_line = line_no;
      }
    } else if (absl::ConsumePrefix(&value, "{")) {
      in_cell = value.find('}') == absl::string_view::npos;
      open_line = line_no;
    } else {
      absl::ConsumeSuffix(&value, ";");
      value = absl::StripAsciiWhitespace(value);
      if (field == "baseMVA") {
        auto number = ParseNumber(value, line_no);
        if (!number.ok()) return number.status();
        raw.base_mva = *number;
      }
    }
  }
  if (!open_matrix.empty()) {
    return SyntaxError(open_line,
                       absl::StrCat("unterminated table '", open_matrix, "'"));
  }
  if (in_cell) return SyntaxError(open_line, "unterminated cell array");
  return raw;
}

absl::Status RequireColumns(const Table& table, absl::string_view name,
                            size_t columns) {
  for (size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() < columns) {
      return SyntaxError(table.row_lines[i],
                         absl::StrFormat("%s row has %d columns, need %d", name,
                                         table.rows[i].size(), columns));
    }
  }
  return absl::OkStatus();
}

bool IsInteger(double x) { return std::isfinite(x) && x == std::floor(x); }

// Extracts the linear coefficient from a polynomial gencost row.
absl::StatusOr<double> LinearCost(const std::vector<double>& row, int line,
                                  std::vector<std::string>* warnings) {
  if (row[0] != 2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "line %d: only polynomial (model 2) costs are supported", line));
  }
  if (!IsInteger(row[3]) || row[3] < 1) {
    return SyntaxError(line, "bad gencost term count");
  }
  const size_t n = static_cast<size_t>(row[3]);
  if (row.size() < 4 + n) return SyntaxError(line, "gencost row too short");
  // Coefficients are listed from the highest order down to the constant.
  for (size_t order = n - 1; order >= 2; --order) {
    if (row[4 + (n - 1 - order)] != 0.0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: nonlinear cost term of order %d is not supported", line,
          order));
    }
  }
  if (row[4 + n - 1] != 0.0) {
    warnings->push_back(
        absl::StrFormat("line %d: constant cost term ignored", line));
  }
  return n >= 2 ? row[4 + n - 2] : 0.0;
}

std::string KindName(FindingKind kind) {
  switch (kind) {
    case FindingKind::kDuplicateBus:
      return "duplicate-bus";
    case FindingKind::kDanglingBranch:
      return "dangling-branch";
    case FindingKind::kSelfLoop:
      return "self-loop";
    case FindingKind::kNonpositiveReactance:
      return "nonpositive-reactance";
    case FindingKind::kNegativeCapacity:
      return "negative-capacity";
    case FindingKind::kNonfiniteLoad:
      return "nonfinite-load";
    case FindingKind::kGeneratorBus:
      return "generator-bus";
    case FindingKind::kGeneratorLimits:
      return "generator-limits";
    case FindingKind::kNegativeCost:
      return "negative-cost";
    case FindingKind::kNoGenerator:
      return "no-generator";
    case FindingKind::kBadSlack:
      return "bad-slack";
    case FindingKind::kDisconnected:
      return "disconnected";
    case FindingKind::kBadBaseMva:
      return "bad-base-mva";
  }
  return "unknown";
}

}  // namespace

int GridCase::BusIndex(int id) const {
  for (int i = 0; i < num_buses(); ++i) {
    if (buses[i].id == id) return i;
  }
  return -1;
}

std::vector<double> GridCase::Loads() const {
  std::vector<double> d;
  d.reserve(buses.size());
  for (const Bus& bus : buses) d.push_back(bus.load_mw);
  return d;
}

double GridCase::TotalLoad() const {
  double total = 0.0;
  for (const Bus& bus : buses) total += bus.load_mw;
  return total;
}

double GridCase::MaxGeneratorCost() const {
  double best = 0.0;
  for (const Generator& g : generators) best = std::max(best, g.cost);
  return best;
}

absl::StatusOr<GridCase> ParseCase(absl::string_view text,
                                   absl::string_view name) {
  auto raw_or = Tokenize(text);
  if (!raw_or.ok()) return raw_or.status();
  RawCase& raw = *raw_or;

  for (const char* required : {"bus", "branch", "gen", "gencost"}) {
    if (!raw.tables.count(required)) {
      return absl::InvalidArgumentError(
          absl::StrCat("case is missing the mpc.", required, " table"));
    }
  }
  const Table& bus_table = raw.tables["bus"];
  const Table& branch_table = raw.tables["branch"];
  const Table& gen_table = raw.tables["gen"];
  const Table& cost_table = raw.tables["gencost"];
  if (auto s = RequireColumns(bus_table, "bus", 3); !s.ok()) return s;
  if (auto s = RequireColumns(branch_table, "branch", 6); !s.ok()) return s;
  if (auto s = RequireColumns(gen_table, "gen", 10); !s.ok()) return s;
  if (auto s = RequireColumns(cost_table, "gencost", 5); !s.ok()) return s;
  if (cost_table.rows.size() < gen_table.rows.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gencost has %d rows for %d generators",
                        cost_table.rows.size(), gen_table.rows.size()));
  }

  GridCase grid;
  grid.name = !name.empty() ? std::string(name) : raw.function_name;
  grid.base_mva = raw.base_mva.value_or(100.0);

  for (size_t i = 0; i < bus_table.rows.size(); ++i) {
    const auto& row = bus_table.rows[i];
    if (!IsInteger(row[0]) || !IsInteger(row[1])) {
      return SyntaxError(bus_table.row_lines[i], "bus id and type must be integers");
    }
    grid.buses.push_back({static_cast<int>(row[0]), row[2],
                          static_cast<int>(row[1])});
  }
  for (size_t i = 0; i < branch_table.rows.size(); ++i) {
    const auto& row = branch_table.rows[i];
    if (!IsInteger(row[0]) || !IsInteger(row[1])) {
      return SyntaxError(branch_table.row_lines[i],
                         "branch endpoints must be integers");
    }
    const bool in_service = row.size() <= 10 || row[10] != 0.0;
    if (!in_service) continue;
    const double rating = row[5] == 0.0 ? kInf : row[5];
    grid.branches.push_back(
        {static_cast<int>(row[0]), static_cast<int>(row[1]), row[3], rating});
  }
  for (size_t i = 0; i < gen_table.rows.size(); ++i) {
    const auto& row = gen_table.rows[i];
    if (!IsInteger(row[0])) {
      return SyntaxError(gen_table.row_lines[i], "generator bus must be an integer");
    }
    if (row[7] <= 0.0) continue;
    auto cost = LinearCost(cost_table.rows[i], cost_table.row_lines[i],
                           &grid.warnings);
    if (!cost.ok()) return cost.status();
    Generator gen{static_cast<int>(row[0]), *cost, row[9], row[8]};
    if (gen.p_min < 0.0) {
      grid.warnings.push_back(absl::StrFormat(
          "generator %d: p_min %g clamped to 0", grid.generators.size(),
          gen.p_min));
      gen.p_min = 0.0;
    }
    grid.generators.push_back(gen);
  }

  grid.slack_bus = 0;
  for (const Bus& bus : grid.buses) {
    if (bus.type == 3) {
      grid.slack_bus = bus.id;
      break;
    }
  }
  if (grid.slack_bus == 0 && !grid.generators.empty()) {
    int lowest = std::numeric_limits<int>::max();
    for (const Generator& g : grid.generators) lowest = std::min(lowest, g.bus);
    grid.slack_bus = lowest;
  }

  std::vector<CaseFinding> findings = ValidateCase(grid);
  if (!findings.empty()) {
    std::vector<std::string> messages;
    for (const CaseFinding& f : findings) messages.push_back(f.message);
    return absl::InvalidArgumentError(
        absl::StrCat("invalid case: ", absl::StrJoin(messages, "; ")));
  }
  return grid;
}

absl::StatusOr<GridCase> ReadCaseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCase(buffer.str());
}

std::string RenderCase(const GridCase& grid) {
  std::string out;
  absl::StrAppend(&out, "function mpc = ", grid.name, "\n");
  absl::StrAppend(&out, "mpc.version = '2';\n");
  absl::StrAppendFormat(&out, "mpc.baseMVA = %.17g;\n\n", grid.base_mva);
  absl::StrAppend(&out, "mpc.bus = [\n");
  for (const Bus& bus : grid.buses) {
    absl::StrAppendFormat(&out,
                          "\t%d\t%d\t%.17g\t0\t0\t0\t1\t1\t0\t1\t1\t1.1\t0.9;\n",
                          bus.id, bus.type, bus.load_mw);
  }
  absl::StrAppend(&out, "];\n\nmpc.gen = [\n");
  for (const Generator& g : grid.generators) {
    absl::StrAppendFormat(&out, "\t%d\t0\t0\t0\t0\t1\t%.17g\t1\t%.17g\t%.17g;\n",
                          g.bus, grid.base_mva, g.p_max, g.p_min);
  }
  absl::StrAppend(&out, "];\n\nmpc.branch = [\n");
  for (const Branch& br : grid.branches) {
    const double rating = std::isinf(br.capacity_mw) ? 0.0 : br.capacity_mw;
    absl::StrAppendFormat(&out,
                          "\t%d\t%d\t0\t%.17g\t0\t%.17g\t0\t0\t0\t0\t1\t-360\t360;\n",
                          br.from_bus, br.to_bus, br.reactance, rating);
  }
  absl::StrAppend(&out, "];\n\nmpc.gencost = [\n");
  for (const Generator& g : grid.generators) {
    absl::StrAppendFormat(&out, "\t2\t0\t0\t2\t%.17g\t0;\n", g.cost);
  }
  absl::StrAppend(&out, "];\n");
  return out;
}

std::vector<CaseFinding> ValidateCase(const GridCase& grid) {
  std::vector<CaseFinding> findings;
  auto add = [&findings](FindingKind kind, int index, std::string message) {
    findings.push_back(
        {kind, index, absl::StrCat(KindName(kind), ": ", message)});
  };
  if (!(grid.base_mva > 0.0)) {
    add(FindingKind::kBadBaseMva, -1,
        absl::StrFormat("baseMVA %g is not positive", grid.base_mva));
  }
  std::map<int, int> index_of;
  for (int i = 0; i < grid.num_buses(); ++i) {
    const Bus& bus = grid.buses[i];
    if (!index_of.emplace(bus.id, i).second) {
      add(FindingKind::kDuplicateBus, i,
          absl::StrFormat("bus %d appears more than once", bus.id));
    }
    if (!std::isfinite(bus.load_mw)) {
      add(FindingKind::kNonfiniteLoad, i,
          absl::StrFormat("bus %d has a nonfinite load", bus.id));
    }
  }
  for (int i = 0; i < grid.num_branches(); ++i) {
    const Branch& br = grid.branches[i];
    for (int end : {br.from_bus, br.to_bus}) {
      if (!index_of.count(end)) {
        add(FindingKind::kDanglingBranch, i,
            absl::StrFormat("branch %d references missing bus %d", i, end));
      }
    }
    if (br.from_bus == br.to_bus) {
      add(FindingKind::kSelfLoop, i,
          absl::StrFormat("branch %d connects bus %d to itself", i,
                          br.from_bus));
    }
    if (!(br.reactance > 0.0)) {
      add(FindingKind::kNonpositiveReactance, i,
          absl::StrFormat("branch %d has reactance %g", i, br.reactance));
    }
    if (!(br.capacity_mw >= 0.0)) {
      add(FindingKind::kNegativeCapacity, i,
          absl::StrFormat("branch %d has capacity %g", i, br.capacity_mw));
    }
  }
  if (grid.generators.empty()) {
    add(FindingKind::kNoGenerator, -1, "case has no in-service generator");
  }
  for (int i = 0; i < grid.num_generators(); ++i) {
    const Generator& g = grid.generators[i];
    if (!index_of.count(g.bus)) {
      add(FindingKind::kGeneratorBus, i,
          absl::StrFormat("generator %d references missing bus %d", i, g.bus));
    }
    if (!(g.p_min >= 0.0 && g.p_min <= g.p_max && std::isfinite(g.p_max))) {
      add(FindingKind::kGeneratorLimits, i,
          absl::StrFormat("generator %d has limits [%g, %g]", i, g.p_min,
                          g.p_max));
    }
    if (!(g.cost >= 0.0)) {
      add(FindingKind::kNegativeCost, i,
          absl::StrFormat("generator %d has cost %g", i, g.cost));
    }
  }
  if (!index_of.count(grid.slack_bus)) {
    add(FindingKind::kBadSlack, -1,
        absl::StrFormat("slack bus %d does not exist", grid.slack_bus));
  }

  // Connectivity over branches whose endpoints exist.
  const int n = grid.num_buses();
  if (n > 0) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const Branch& br : grid.branches) {
      auto a = index_of.find(br.from_bus);
      auto b = index_of.find(br.to_bus);
      if (a == index_of.end() || b == index_of.end()) continue;
      parent[find(a->second)] = find(b->second);
    }
    std::set<int> roots;
    for (int i = 0; i < n; ++i) roots.insert(find(i));
    if (roots.size() > 1) {
      add(FindingKind::kDisconnected, -1,
          absl::StrFormat("network has %d connected components", roots.size()));
    }
  }
  return findings;
}

absl::StatusOr<PtdfMatrix> ComputePtdf(const GridCase& grid) {
  return ComputePtdf(grid, grid.slack_bus);
}

absl::StatusOr<PtdfMatrix> ComputePtdf(const GridCase& grid, int slack_bus) {
  const int n = grid.num_buses();
  const int m = grid.num_branches();
  const int slack = grid.BusIndex(slack_bus);
  if (slack < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("slack bus %d does not exist", slack_bus));
  }
  Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd susceptance(m);
  for (int l = 0; l < m; ++l) {
    const Branch& br = grid.branches[l];
    const int from = grid.BusIndex(br.from_bus);
    const int to = grid.BusIndex(br.to_bus);
    if (from < 0 || to < 0 || !(br.reactance > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("branch %d is not well formed", l));
    }
    incidence(l, from) += 1.0;
    incidence(l, to) -= 1.0;
    susceptance(l) = 1.0 / br.reactance;
  }
  const Eigen::MatrixXd branch_b = susceptance.asDiagonal() * incidence;
  const Eigen::MatrixXd bus_b = incidence.transpose() * branch_b;

  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (i != slack) keep.push_back(i);
  }
  const int r = n - 1;
  Eigen::MatrixXd reduced(r, r);
  Eigen::MatrixXd branch_reduced(m, r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) reduced(a, b) = bus_b(keep[a], keep[b]);
    branch_reduced.col(a) = branch_b.col(keep[a]);
  }
  PtdfMatrix ptdf;
  ptdf.slack_bus = slack_bus;
  ptdf.entries = Eigen::MatrixXd::Zero(m, n);
  if (r == 0) return ptdf;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(reduced);
  if (!lu.isInvertible()) {
    return absl::FailedPreconditionError(
        "reduced susceptance matrix is singular; the network is disconnected");
  }
  // F_red = Bf_red * B_red^-1, computed as a solve against the transpose.
  const Eigen::MatrixXd solved =
      lu.solve(branch_reduced.transpose()).transpose();
  for (int a = 0; a < r; ++a) ptdf.entries.col(keep[a]) = solved.col(a);
  return ptdf;
}

nlohmann::json CaseToJson(const GridCase& grid) {
  nlohmann::json j;
  j["name"] = grid.name;
  j["base_mva"] = grid.base_mva;
  j["slack_bus"] = grid.slack_bus;
  for (const Bus& bus : grid.buses) {
    j["buses"].push_back({{"id", bus.id}, {"load_mw", bus.load_mw},
                          {"type", bus.type}});
  }
  for (const Branch& br : grid.branches) {
    nlohmann::json b = {{"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"reactance", br.reactance}};
    if (std::isinf(br.capacity_mw)) {
      b["capacity_mw"] = nullptr;
    } else {
      b["capacity_mw"] = br.capacity_mw;
    }
    j["branches"].push_back(b);
  }
  for (const Generator& g : grid.generators) {
    j["generators"].push_back({{"bus", g.bus},
                               {"cost", g.cost},
                               {"p_min", g.p_min},
                               {"p_max", g.p_max}});
  }
  j["warnings"] = grid.warnings;
  j["total_load_mw"] = grid.TotalLoad();
  return j;
}

}  // namespace gridsynth
