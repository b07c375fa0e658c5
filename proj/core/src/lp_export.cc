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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gridsynth/linear_program.h"

namespace gridsynth {
namespace {

bool ValidName(const std::string& name) {
  if (name.empty() || name.size() > 200) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') {
    return false;
  }
  for (char ch : name) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' &&
        ch != '.') {
      return false;
    }
  }
  return true;
}

std::vector<std::string> UniqueNames(const std::vector<std::string>& raw,
                                     int count, const char* prefix) {
  std::vector<std::string> names(count);
  std::set<std::string> used;
  for (int i = 0; i < count; ++i) {
    std::string candidate =
        i < static_cast<int>(raw.size()) && ValidName(raw[i])
            ? raw[i]
            : absl::StrCat(prefix, i);
    if (!used.insert(candidate).second) {
      candidate = absl::StrCat(prefix, i, "_", candidate);
      used.insert(candidate);
    }
    names[i] = candidate;
  }
  return names;
}

void AppendTerms(std::string* out, const std::vector<LinearTerm>& terms,
                 const std::vector<std::string>& names) {
  if (terms.empty()) {
    absl::StrAppend(out, " 0 ", names.empty() ? "" : names[0]);
    return;
  }
  int on_line = 0;
  for (const LinearTerm& t : terms) {
    absl::StrAppendFormat(out, " %s %.17g %s", t.coef < 0 ? "-" : "+",
                          std::abs(t.coef), names[t.var]);
    if (++on_line % 6 == 0) absl::StrAppend(out, "\n  ");
  }
}

std::string Body(const LinearProgram& lp, const std::vector<std::string>& vars,
                 const std::vector<Constraint>& extra_rows,
                 const std::vector<std::string>& binaries) {
  std::string out = "\\ written by gridsynth\n";
  if (lp.objective_offset != 0.0) {
    absl::StrAppendFormat(&out, "\\ objective offset %.17g\n",
                          lp.objective_offset);
  }
  absl::StrAppend(&out, lp.sense == Sense::kMinimize ? "Minimize\n"
                                                     : "Maximize\n");
  std::vector<LinearTerm> objective;
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.objective[j] != 0.0) objective.push_back({j, lp.objective[j]});
  }
  absl::StrAppend(&out, " obj:");
  AppendTerms(&out, objective, vars);
  absl::StrAppend(&out, "\nSubject To\n");

  std::vector<std::string> raw_rows;
  for (const Constraint& row : lp.rows) raw_rows.push_back(row.name);
  for (const Constraint& row : extra_rows) raw_rows.push_back(row.name);
  const std::vector<std::string> row_names =
      UniqueNames(raw_rows, static_cast<int>(raw_rows.size()), "r");
  auto write_row = [&](const Constraint& row, const std::string& name) {
    absl::StrAppend(&out, " ", name, ":");
    AppendTerms(&out, row.terms, vars);
    const char* rel = row.relation == Relation::kLessEqual    ? "<="
                      : row.relation == Relation::kGreaterEqual ? ">="
                                                                : "=";
    absl::StrAppendFormat(&out, " %s %.17g\n", rel, row.rhs);
  };
  for (int i = 0; i < lp.num_rows(); ++i) write_row(lp.rows[i], row_names[i]);
  for (size_t i = 0; i < extra_rows.size(); ++i) {
    write_row(extra_rows[i], row_names[lp.num_rows() + i]);
  }

  absl::StrAppend(&out, "Bounds\n");
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (std::isinf(lo) && std::isinf(hi)) {
      absl::StrAppend(&out, " ", vars[j], " free\n");
    } else if (lo == hi) {
      absl::StrAppendFormat(&out, " %s = %.17g\n", vars[j], lo);
    } else {
      const std::string lo_text =
          std::isinf(lo) ? "-inf" : absl::StrFormat("%.17g", lo);
      const std::string hi_text =
          std::isinf(hi) ? "+inf" : absl::StrFormat("%.17g", hi);
      absl::StrAppend(&out, " ", lo_text, " <= ", vars[j], " <= ", hi_text,
                      "\n");
    }
  }
  if (!binaries.empty()) {
    absl::StrAppend(&out, "Binaries\n");
    for (const std::string& b : binaries) absl::StrAppend(&out, " ", b, "\n");
  }
  absl::StrAppend(&out, "End\n");
  return out;
}

}  // namespace

std::string WriteLpFile(const LinearProgram& lp) {
  const std::vector<std::string> vars =
      UniqueNames(lp.names, lp.num_vars(), "x");
  return Body(lp, vars, {}, {});
}

double DefaultBigM(const MixedProgram& mp) {
  double scale = 1.0;
  for (double c : mp.lp.objective) scale = std::max(scale, std::abs(c));
  for (const Constraint& row : mp.lp.rows) {
    scale = std::max(scale, std::abs(row.rhs));
  }
  return 1e4 * scale;
}

std::string WriteBigMLpFile(const MixedProgram& mp,
                            std::optional<double> big_m) {
  const double m = big_m.value_or(DefaultBigM(mp));
  LinearProgram lp = mp.lp;
  std::vector<std::string> raw = lp.names;
  raw.resize(lp.num_vars());
  const int first_binary = lp.num_vars();
  std::vector<Constraint> extra;
  for (size_t p = 0; p < mp.pairs.size(); ++p) {
    const ComplementarityPair& pair = mp.pairs[p];
    const int z = lp.AddVariable(0.0, 1.0, 0.0);
    raw.push_back(absl::StrCat("z", p));
    extra.push_back({{{pair.multiplier_var, 1.0}, {z, -m}},
                     Relation::kLessEqual,
                     0.0,
                     absl::StrCat("bigm_mult_", p)});
    std::vector<LinearTerm> terms;
    for (const LinearTerm& t : mp.lp.rows[pair.row].terms) {
      terms.push_back({t.var, -t.coef});
    }
    terms.push_back({z, m});
    extra.push_back({std::move(terms), Relation::kLessEqual,
                     m - mp.lp.rows[pair.row].rhs,
                     absl::StrCat("bigm_slack_", p)});
  }
  const std::vector<std::string> vars =
      UniqueNames(raw, lp.num_vars(), "x");
  std::vector<std::string> binaries(vars.begin() + first_binary, vars.end());
  return Body(lp, vars, extra, binaries);
}

}  // namespace gridsynth
