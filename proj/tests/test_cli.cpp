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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "ncergo/experiment.hpp"

using namespace ncergo;
using namespace ncergo::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ncergo_test_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const json& config) {
  static int counter = 0;
  const fs::path cfg = scratch("cfg" + std::to_string(counter++) + ".json");
  std::ofstream(cfg) << config.dump();
  const std::string cmd = std::string(NCERGO_CLI_PATH) + " run " + cfg.string() + " --out " +
                          scratch("out").string() + " --quiet > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json small(const std::string& experiment) {
  json j = {{"experiment", experiment},
            {"fixture", {{"block_dims", {1, 2}}, {"seed", 3}}},
            {"parameters", {{"n_max", 4}, {"depth", 2}, {"samples", 2}}}};
  if (experiment == "cesaro") j["parameters"]["n_max"] = 20;
  return j;
}

ConvergenceSeries sample_series() {
  ConvergenceSeries s;
  s.label = "demo";
  s.points = {{0, 1.0 / 3.0, 0.1, 2e-17}, {1, 0.12345678901234567, 1e-300, 5.0}};
  s.converged_at = 1;
  return s;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(json{{"experiment", "rota"}});
  CHECK(c.experiment == ExperimentKind::kRota);
  CHECK(c.fixture.block_dims == std::vector<int>{2});
  CHECK(c.fixture.d == 2);

  json j = {{"experiment", "identities"}, {"parameters", {{"p", {1, "inf"}}}}};
  const auto ps = parse_config(j).parameters.p_values;
  REQUIRE(ps.size() == 2);
  CHECK(std::isinf(ps[1]));

  CHECK_THROWS_AS(parse_config(json::object()), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "nope"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "rota"}, {"extra", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "rota"}, {"fixture", {{"d", "two"}}}}),
                  ConfigError);
  try {
    parse_config(json{{"experiment", "rota"}, {"fixture", {{"d", 1}}}});
    FAIL("d = 1 accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("degenerate transition system") != std::string::npos);
  }
  CHECK_THROWS_AS(
      parse_config(json{{"experiment", "rota"},
                        {"fixture", {{"action", "permutation"}, {"permutations", {{0}}}}}}),
      ConfigError);

  const ExperimentConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK_THROWS_AS(load_config(scratch("missing.json")), ConfigError);
}

TEST_CASE("series files") {
  const fs::path csv = scratch("s.csv");
  ConvergenceSeries empty;
  empty.label = "s";
  emit_series(empty, csv, OutputFormat::kCsv);
  CHECK(slurp(csv) == "n,dist_op,dist_L1,dist_L2\n");
  CHECK(parse_series(csv, OutputFormat::kCsv).points.empty());

  ConvergenceSeries one;
  one.label = "s";
  one.points = {{2, 0.5, 0.25, 0.125}};
  emit_series(one, csv, OutputFormat::kCsv);
  CHECK(slurp(csv) == "n,dist_op,dist_L1,dist_L2\n2,0.5,0.25,0.125\n");

  const ConvergenceSeries s = sample_series();
  const fs::path demo = scratch("demo.csv");
  emit_series(s, demo, OutputFormat::kCsv);
  const ConvergenceSeries rc = parse_series(demo, OutputFormat::kCsv);
  CHECK(rc.points == s.points);
  CHECK(rc.label == "demo");

  const fs::path js = scratch("demo.json");
  emit_series(s, js, OutputFormat::kJson);
  CHECK(parse_series(js, OutputFormat::kJson) == s);
  CHECK(series_from_json(series_to_json(s)) == s);
}

TEST_CASE("runs are deterministic and cover every suite") {
  std::set<std::string> seen;
  for (ExperimentKind k : all_experiments()) {
    const ExperimentConfig c = parse_config(small(std::string(experiment_name(k))));
    const RunReport a = run(c);
    const RunReport b = run(c);
    CHECK(canonical(a.to_json()) == canonical(b.to_json()));
    CHECK(a.to_json().contains("wall_times"));
    seen.insert(a.suites.begin(), a.suites.end());
  }
  for (const auto& s : suite_registry()) {
    INFO(s);
    CHECK(seen.count(s) == 1);
  }

  ExperimentConfig c = parse_config(small("rota"));
  c.output.dir = scratch("written");
  c.output.format = OutputFormat::kCsv;
  const RunReport r = run(c);
  const fs::path report = write_outputs(r, c.output);
  CHECK(fs::exists(report));
  CHECK(report.filename() == "ncergo_report.json");
  for (const auto& s : r.series) CHECK(fs::exists(c.output.dir / s.file));
}

TEST_CASE("command line exit codes") {
  CHECK(run_cli(small("identities")) == 0);
  json d1 = small("rota");
  d1["fixture"]["d"] = 1;
  CHECK(run_cli(d1) == 2);
  json unknown = small("rota");
  unknown["bogus"] = true;
  CHECK(run_cli(unknown) == 2);
  json deep = small("dilation");
  deep["parameters"]["depth"] = 7;
  CHECK(run_cli(deep) == 3);
  CHECK(run_cli(small("cesaro")) == 1);
  const json user = json::parse(R"({
    "experiment": "identities",
    "fixture": {"block_dims": [2], "d": 2, "action": "user-supplied",
                "unitaries": [[{"re": [[1, 1], [0, 1]], "im": [[0, 0], [0, 0]]}],
                              [{"re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}]]},
    "parameters": {"n_max": 2}})");
  CHECK(run_cli(user) == 4);
  fs::remove_all(scratch("").parent_path());
}
