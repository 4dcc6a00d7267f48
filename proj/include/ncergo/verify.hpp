// Copyright 2026 The ncergo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ncergo/report.hpp"

namespace ncergo::cli {

/// Outcome of one built-in acceptance criterion.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::vector<ResidualRecord> records;
  double wall_time_s = 0.0;
};

struct VerifyReport {
  std::uint64_t seed = 1;
  std::vector<CriterionResult> criteria;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Runs every built-in criterion with the given seed.
VerifyReport run_verify(std::uint64_t seed, bool quiet = true);

/// Runs one criterion by id (1 through 8).
CriterionResult run_criterion(int id, std::uint64_t seed);

}  // namespace ncergo::cli
