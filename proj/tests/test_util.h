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


// Shared fixtures for the test suites.

#ifndef GRIDSYNTH_TESTS_TEST_UTIL_H_
#define GRIDSYNTH_TESTS_TEST_UTIL_H_

#include <random>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/strings/string_view.h"
#include "gridsynth/case_io.h"
#include "gridsynth/compact_model.h"
#include "gridsynth/linear_program.h"

namespace gridsynth::testing {

std::string FixturePath(absl::string_view file_name);

struct Fixture {
  GridCase grid;
  PtdfMatrix ptdf;
  CompactModel model;
  Eigen::VectorXd d;
};

// Dies on a broken fixture file.
Fixture LoadFixture(absl::string_view file_name);

inline constexpr const char* kCase2 = "case2_radial.m";
inline constexpr const char* kCase3 = "case3_triangle.m";
inline constexpr const char* kCase4 = "case4_ring.m";
inline constexpr const char* kCase5 = "pglib_opf_case5_pjm__api.m";
inline constexpr const char* kCase14 = "pglib_opf_case14_ieee__api.m";
inline constexpr const char* kCase118 = "pglib_opf_case118_ieee__api.m";

Eigen::VectorXd ToVector(const std::vector<double>& values);

// Loads scaled by independent factors in [1 - spread, 1 + spread], then
// rescaled so the total stays within generation capacity.
Eigen::VectorXd PerturbLoads(const Fixture& fixture, double spread,
                             std::mt19937_64& rng);

// Maximization with `pairs` multiplier/row pairs over n_x box variables. The
// origin is feasible.
MixedProgram RandomMixedProgram(std::mt19937_64& rng, int n_x, int pairs);

// Best objective over all 2^pairs leaves, each solved as an LP: either the
// multiplier is fixed to zero or its row holds with equality.
double LeafEnumeration(const MixedProgram& mp, int* feasible_leaves);

}  // namespace gridsynth::testing

#endif  // GRIDSYNTH_TESTS_TEST_UTIL_H_
