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

// ncergo: experiment harness and built-in acceptance suite.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ncergo/errors.hpp"
#include "ncergo/experiment.hpp"
#include "ncergo/verify.hpp"

namespace {

enum ExitCode : int {
  kPass = 0,
  kCheckFailure = 1,
  kConfigError = 2,
  kResourceCap = 3,
  kFixtureError = 4,
  kOtherError = 5,
};

int run_command(const std::string& config_path, const std::optional<std::string>& out,
                const std::optional<std::string>& format,
                const std::optional<std::uint64_t>& seed, bool quiet) {
  using namespace ncergo::cli;
  ExperimentConfig config = load_config(config_path);
  if (out) config.output.dir = *out;
  if (format) config.output.format = *format == "csv" ? OutputFormat::kCsv : OutputFormat::kJson;
  if (seed) config.fixture.seed = *seed;
  const RunReport report = run(config);
  const auto path = write_outputs(report, config.output);
  if (!quiet) {
    std::size_t failed = 0;
    for (const auto& r : report.checks) {
      if (!r.pass) {
        ++failed;
        std::cerr << "FAIL " << r.check << " residual " << r.residual << " > "
                  << r.tolerance << "\n";
      }
    }
    std::cout << experiment_name(config.experiment) << ": " << report.checks.size()
              << " checks, " << failed << " failed; report " << path.string() << "\n";
  }
  return report.pass() ? kPass : kCheckFailure;
}

int verify_command(std::uint64_t seed, const std::optional<std::string>& out, bool quiet) {
  using namespace ncergo::cli;
  const VerifyReport report = run_verify(seed, quiet);
  if (out) {
    std::filesystem::create_directories(*out);
    write_atomic(std::filesystem::path(*out) / "verify_report.json",
                 report.to_json().dump(2) + "\n");
  }
  if (!quiet) std::cout << (report.pass() ? "verify: PASS" : "verify: FAIL") << "\n";
  return report.pass() ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ncergo: noncommutative ergodic averages over free group actions"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out, format;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out, "Output directory");
  run->add_option("--format", format, "Series format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--seed", seed, "Override the fixture seed");
  run->add_flag("--quiet", quiet, "Suppress the summary");

  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Run the built-in acceptance suite");
  verify->add_option("--seed", verify_seed, "Fixture seed");
  verify->add_option("--out", out, "Directory for verify_report.json");
  verify->add_flag("--quiet", quiet, "Suppress per-criterion lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfigError;
  }

  try {
    if (run->parsed()) return run_command(config_path, out, format, seed, quiet);
    return verify_command(verify_seed, out, quiet);
  } catch (const ncergo::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ncergo::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ncergo::ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kResourceCap;
  } catch (const ncergo::FixtureError& e) {
    std::cerr << "fixture error: " << e.what() << "\n";
    return kFixtureError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOtherError;
  }
}
