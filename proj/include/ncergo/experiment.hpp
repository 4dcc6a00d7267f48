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

// Experiment harness: JSON configs describing a fixture and an experiment,
// a runner producing residual records and convergence series, and the
// report / series writers used by the command line tool.
//
// Config schema (every key optional except "experiment"):
//
//   {
//     "fixture": {
//       "block_dims": [2],
//       "state": "tracial" | "random" | "near-degenerate" | "clustered",
//       "d": 2,
//       "action": "random-unitary" | "permutation" | "user-supplied",
//       "permutations": [[1, 2, 3, 0], ...],     // one per generator
//       "unitaries": [[{"re": [[...]], "im": [[...]]}, ...], ...],
//                                                 // per generator, per block
//       "seed": 1
//     },
//     "experiment": "identities" | "dilation" | "rota" | "s2n" | "cesaro" |
//                   "bufetov-vs-brute",
//     "parameters": {"n_max": 4, "depth": 3, "p": [1, 2, 4, "inf"],
//                    "tolerance": 1e-10, "tol_conv": 1e-8, "samples": 5},
//     "output": {"dir": ".", "format": "json" | "csv", "name": "ncergo"}
//   }

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ncergo/errors.hpp"
#include "ncergo/fixtures.hpp"
#include "ncergo/report.hpp"
#include "ncergo/rota.hpp"

namespace ncergo::cli {

/// The config is malformed or outside the supported domain.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ExperimentKind {
  kIdentities,
  kDilation,
  kRota,
  kS2n,
  kCesaro,
  kBufetovVsBrute,
};

std::string_view experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);
const std::vector<ExperimentKind>& all_experiments();

enum class ActionMode { kRandomUnitary, kPermutation, kUserSupplied };
enum class OutputFormat { kJson, kCsv };

struct FixtureSpec {
  std::vector<int> block_dims{2};
  StateKind state = StateKind::kRandom;
  int d = 2;
  ActionMode action = ActionMode::kRandomUnitary;
  std::vector<std::vector<int>> permutations;
  std::vector<std::vector<Matrix>> unitaries;
  std::uint64_t seed = 1;
};

/// Unset values take per-experiment defaults.
struct Parameters {
  std::optional<int> n_max;
  int depth = 3;
  std::vector<double> p_values{1.0, 2.0, 4.0,
                               std::numeric_limits<double>::infinity()};
  std::optional<double> tolerance;
  std::optional<double> tol_conv;
  std::optional<int> samples;
};

struct OutputSpec {
  std::filesystem::path dir = ".";
  OutputFormat format = OutputFormat::kJson;
  std::string name = "ncergo";
};

struct ExperimentConfig {
  FixtureSpec fixture;
  ExperimentKind experiment = ExperimentKind::kIdentities;
  Parameters parameters;
  OutputSpec output;
};

/// Throws ConfigError on unknown keys, wrong types or out-of-domain values
/// (including d < 2: "degenerate transition system").
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Normalized echo of a config (defaults filled in).
nlohmann::json config_to_json(const ExperimentConfig& c);

struct Fixture {
  SpacePtr space;
  FreeAction action;
};

/// Draws the state, then the action, from `rng`.
Fixture build_fixture(const FixtureSpec& spec, FixtureRng& rng);

struct SeriesOutput {
  ConvergenceSeries series;
  std::string file;
};

struct RunReport {
  nlohmann::json config;
  std::string experiment;
  std::vector<ResidualRecord> checks;
  std::vector<SeriesOutput> series;
  std::vector<std::string> suites;
  double wall_time_s = 0.0;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Runs the experiment in memory. Deterministic in the config.
RunReport run(const ExperimentConfig& config);

/// Writes each series and the report (<name>_report.json) under
/// output.dir, atomically. Returns the report path.
std::filesystem::path write_outputs(const RunReport& report,
                                    const OutputSpec& output);

/// The report without wall-time fields.
nlohmann::json canonical(nlohmann::json report);

/// Suite names exercised by the experiments; the union over all selectors
/// must cover suite_registry().
const std::vector<std::string>& suite_registry();

nlohmann::json record_to_json(const ResidualRecord& r);
nlohmann::json series_to_json(const ConvergenceSeries& s);
ConvergenceSeries series_from_json(const nlohmann::json& j);

/// CSV header "n,dist_op,dist_L1,dist_L2" then one row per point with 17
/// significant digits; JSON mirrors series_to_json. Overwrites atomically.
void emit_series(const ConvergenceSeries& series,
                 const std::filesystem::path& path, OutputFormat format);
/// Inverse of emit_series. CSV carries no label or convergence index; the
/// label is taken from the file stem.
ConvergenceSeries parse_series(const std::filesystem::path& path,
                               OutputFormat format);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ncergo::cli
