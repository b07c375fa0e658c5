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

// Differential privacy primitives for load data.
//
// Three queries touch the private load vector d: the identity query (Laplace
// noise on every bus), the OPF cost query, and report-noisy-max selection of
// worst-case rows. Each query appends an entry to a Ledger, and Account()
// checks the entries against the declared budget split in exact rational
// arithmetic.
//
// Randomness comes from mt19937_64 engines seeded through SplitMix64 from a
// 64-bit release seed, a query name and a substream index, so every query has
// an independent and reproducible stream.

#ifndef GRIDSYNTH_DP_H_
#define GRIDSYNTH_DP_H_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "boost/multiprecision/cpp_int.hpp"
#include "gridsynth/attack.h"
#include "gridsynth/compact_model.h"

namespace gridsynth {

using Rational = boost::multiprecision::cpp_rational;

// Exact value of a finite double.
Rational ExactRational(double value);

uint64_t SplitMix64(uint64_t* state);
// 64-bit FNV-1a hash.
uint64_t Fnv1a(absl::string_view text);

class RngStream {
 public:
  explicit RngStream(uint64_t seed);
  // Independent stream for (seed, query, index).
  static RngStream ForQuery(uint64_t seed, absl::string_view query,
                            uint64_t index = 0);

  // Uniform on the open interval (0, 1).
  double UniformOpen();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// n independent zero-mean Laplace draws with the given scale.
absl::StatusOr<Eigen::VectorXd> Laplace(double scale, int n, RngStream& rng);
double LaplaceCdf(double x, double scale);

enum class QueryKind { kLoadObfuscation, kCostObfuscation, kNoisyMax };
std::string QueryKindName(QueryKind kind);

struct LedgerEntry {
  std::string query;
  QueryKind kind;
  double sensitivity = 0.0;
  double noise_scale = 0.0;
  Rational epsilon;
};

struct Ledger {
  std::vector<LedgerEntry> entries;

  void Add(LedgerEntry entry) { entries.push_back(std::move(entry)); }
  Rational TotalExact() const;
  double Total() const { return static_cast<double>(TotalExact()); }
};

enum class Algorithm { kCro, kCroExp };
std::string AlgorithmName(Algorithm algo);

struct PrivacyParams {
  double alpha = 0.0;
  Rational epsilon;
  Algorithm algorithm = Algorithm::kCro;
  Rational eps1;
  Rational eps2;
  // CRO-Exp only.
  Rational eps3;
  int tau = 0;

  double eps1_value() const { return static_cast<double>(eps1); }
  double eps2_value() const { return static_cast<double>(eps2); }
  double eps3_value() const { return static_cast<double>(eps3); }
};

// eps1 = eps2 = eps / 2.
absl::StatusOr<PrivacyParams> MakeCroParams(double alpha, double epsilon);
// eps1 = eps2 = eps / 3 and eps3 = eps / (3 tau).
absl::StatusOr<PrivacyParams> MakeCroExpParams(double alpha, double epsilon,
                                               int tau);

// Sum of the declared split.
Rational SplitTotal(const PrivacyParams& params);

struct AccountVerdict {
  bool ok = false;
  Rational total;
  // Indices into Ledger::entries that are unbudgeted or overcharged.
  std::vector<int> offending;
  std::vector<std::string> messages;
};

AccountVerdict Account(const PrivacyParams& params, const Ledger& ledger);

// A load vector that has passed through the identity query. Only
// ObfuscateLoads and AssumeObfuscated create one.
class ObfuscatedLoads {
 public:
  static ObfuscatedLoads AssumeObfuscated(Eigen::VectorXd values) {
    return ObfuscatedLoads(std::move(values));
  }
  const Eigen::VectorXd& values() const { return values_; }

 private:
  explicit ObfuscatedLoads(Eigen::VectorXd values)
      : values_(std::move(values)) {}
  Eigen::VectorXd values_;
};

struct ObfuscatedLoadResult {
  ObfuscatedLoads loads;
  LedgerEntry entry;
};

// d + Lap(alpha / eps1)^n.
absl::StatusOr<ObfuscatedLoadResult> ObfuscateLoads(const Eigen::VectorXd& d,
                                                    double alpha,
                                                    const Rational& eps1,
                                                    RngStream& rng);

struct ObfuscatedCost {
  double value = 0.0;
  LedgerEntry entry;
};

// C_opf(d) + Lap(alpha * c_bar / eps2). The value may be negative.
absl::StatusOr<ObfuscatedCost> ObfuscateCost(const CompactModel& model,
                                             const Eigen::VectorXd& d,
                                             double alpha, double c_bar,
                                             const Rational& eps2,
                                             RngStream& rng);

// Cost-query sensitivity factor: the largest generator cost, optionally
// raised to the violation penalty.
double CostSensitivity(const CompactModel& model, bool include_penalty);

// Score of a candidate row set.
using RowSetScore =
    std::function<absl::StatusOr<double>(const std::vector<int>& rows)>;

struct NoisyMaxResult {
  std::vector<int> rows;
  std::vector<LedgerEntry> entries;
};

// Report-noisy-max over tau rounds. Round t scores chosen ∪ {k} for every
// remaining candidate, adds Lap(scale) noise from substream (t, k) and keeps
// the argmax, lowest row index first on ties. Every round charges eps3.
absl::StatusOr<NoisyMaxResult> NoisyMaxSelect(
    const std::vector<int>& candidates, int tau, double sensitivity,
    const Rational& eps3, const RowSetScore& score, uint64_t seed);

// Candidate rows for selection: attackable rows that can bind.
std::vector<int> SelectionCandidates(const CompactModel& model);

// Noisy max scored by the reduced robust attack value at d.
absl::StatusOr<NoisyMaxResult> NoisyMaxRows(const CompactModel& model,
                                            const Eigen::VectorXd& d,
                                            const AttackSet& delta, int tau,
                                            double alpha, double c_bar,
                                            const Rational& eps3,
                                            uint64_t seed);

}  // namespace gridsynth

#endif  // GRIDSYNTH_DP_H_
