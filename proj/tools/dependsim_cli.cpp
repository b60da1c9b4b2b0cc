// Copyright 2026 The dependsim Authors.
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

// Command-line front end over the C API.
//
// Exit codes: 0 success, 1 I/O or internal error, 2 scenario validation or
// trace parse error, 3 invariant violations found (with --verify or --check-trace).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "dependsim/dependsim.h"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInvalid = 2;
constexpr int kViolations = 3;

int exit_for(ds_status status) {
  std::cerr << "error: " << ds_last_error() << "\n";
  return status == DS_ERR_CONFIG || status == DS_ERR_MALFORMED_TRACE ? kInvalid
                                                                  : kFailure;
}

struct Text {
  char* p = nullptr;
  ~Text() { ds_string_free(p); }
};

int report_violations(const char* json, size_t count, bool quiet) {
  if (count == 0) {
    if (!quiet) std::cout << "verify: ok\n";
    return kOk;
  }
  std::cerr << "verify: " << count << " violation(s)\n" << json << "\n";
  return kViolations;
}

int check_trace(const std::string& path, const std::string& metrics_out,
                bool quiet) {
  Text violations;
  size_t count = 0;
  if (auto st = ds_verify_trace_file(path.c_str(), &violations.p, &count); st != DS_OK)
    return exit_for(st);
  if (!metrics_out.empty()) {
    Text metrics;
    if (auto st = ds_metrics_trace_file(path.c_str(), &metrics.p); st != DS_OK)
      return exit_for(st);
    if (std::FILE* f = std::fopen(metrics_out.c_str(), "wb")) {
      std::fputs(metrics.p, f);
      std::fclose(f);
    } else {
      std::cerr << "error: cannot write " << metrics_out << "\n";
      return kFailure;
    }
  }
  return report_violations(violations.p, count, quiet);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulation of a self-healing grid runtime"};
  std::string scenario_path, trace_out, metrics_out, check_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> until;
  bool verify = false, quiet = false;

  auto* scenario_opt =
      app.add_option("--scenario", scenario_path, "Scenario file (YAML or JSON)")
          ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--until", until, "Override the run length (ticks)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--trace-out", trace_out, "Write the JSON Lines trace here");
  app.add_option("--metrics-out", metrics_out, "Write the metrics report here");
  app.add_flag("--verify", verify, "Check trace invariants after the run");
  app.add_flag("--quiet", quiet, "Print nothing on success");
  auto* check_opt =
      app.add_option("--check-trace", check_path,
                     "Verify an existing trace file instead of running")
          ->check(CLI::ExistingFile);
  check_opt->excludes(scenario_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (!check_path.empty()) return check_trace(check_path, metrics_out, quiet);
  if (scenario_path.empty()) {
    std::cerr << "error: --scenario or --check-trace is required\n" << app.help();
    return kInvalid;
  }

  ds_scenario* raw_scenario = nullptr;
  if (auto st = ds_scenario_load_file(scenario_path.c_str(), &raw_scenario); st != DS_OK)
    return exit_for(st);
  std::unique_ptr<ds_scenario, decltype(&ds_scenario_free)> scenario(raw_scenario,
                                                                      ds_scenario_free);
  if (seed) ds_scenario_set_seed(scenario.get(), *seed);
  if (until) ds_scenario_set_run_length(scenario.get(), *until);

  ds_run* raw_run = nullptr;
  if (auto st = ds_run_create(scenario.get(), DS_TRACE_FULL, &raw_run); st != DS_OK)
    return exit_for(st);
  std::unique_ptr<ds_run, decltype(&ds_run_free)> run(raw_run, ds_run_free);
  if (auto st = ds_run_finish(run.get()); st != DS_OK) return exit_for(st);

  if (!trace_out.empty())
    if (auto st = ds_run_write_trace(run.get(), trace_out.c_str()); st != DS_OK)
      return exit_for(st);
  if (!metrics_out.empty())
    if (auto st = ds_run_write_metrics(run.get(), metrics_out.c_str()); st != DS_OK)
      return exit_for(st);

  if (!quiet)
    std::cout << "run: t=" << ds_run_now(run.get())
              << " entries=" << ds_run_trace_size(run.get()) << "\n";

  if (!verify) return kOk;
  Text violations;
  size_t count = 0;
  if (auto st = ds_run_verify(run.get(), &violations.p, &count); st != DS_OK)
    return exit_for(st);
  return report_violations(violations.p, count, quiet);
}
