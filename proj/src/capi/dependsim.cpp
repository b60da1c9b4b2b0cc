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

#include "dependsim/dependsim.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "common/error.hpp"
#include "common/trace.hpp"
#include "runtime/world.hpp"
#include "scenario/loader.hpp"
#include "scenario/metrics.hpp"
#include "scenario/verify.hpp"

struct ds_scenario {
  dependsim::scenario::Scenario value;
};

struct ds_run {
  std::unique_ptr<dependsim::runtime::World> world;
};

namespace {

using dependsim::ErrorCode;

thread_local std::string last_error;

ds_status fail(ds_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

ds_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return DS_ERR_CONFIG;
    case ErrorCode::Io: return DS_ERR_IO;
    case ErrorCode::MalformedTrace: return DS_ERR_MALFORMED_TRACE;
    default: return DS_ERR_RUNTIME;
  }
}

template <class F>
ds_status guarded(F&& body) {
  try {
    body();
    return DS_OK;
  } catch (const dependsim::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(DS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DS_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void write_file(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dependsim::Error(ErrorCode::Io, std::string("cannot write ") + path);
  out << text;
  if (!out) throw dependsim::Error(ErrorCode::Io, std::string("write failed: ") + path);
}

dependsim::Trace read_trace(const char* path) {
  std::ifstream in(path);
  if (!in) throw dependsim::Error(ErrorCode::Io, std::string("cannot open ") + path);
  return dependsim::parse_jsonl(in);
}

std::string metrics_text(const dependsim::Trace& trace) {
  return dependsim::scenario::compute_metrics(trace).dump(2) + "\n";
}

ds_status report(const dependsim::Trace& trace, char** violations, size_t* count) {
  return guarded([&] {
    auto found = dependsim::scenario::verify(trace);
    if (count) *count = found.size();
    if (violations) {
      dependsim::Json list = dependsim::Json::array();
      for (const auto& v : found) list.push_back(dependsim::scenario::to_json(v));
      *violations = dup(list.dump());
    }
  });
}

}  // namespace

#define DS_REQUIRE(cond)                                                     \
  do {                                                                       \
    if (!(cond)) return fail(DS_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

extern "C" {

const char* ds_last_error(void) { return last_error.c_str(); }

const char* ds_version(void) { return "0.1.0"; }

void ds_string_free(char* s) { std::free(s); }

ds_status ds_scenario_load_file(const char* path, ds_scenario** out) {
  DS_REQUIRE(path && out);
  return guarded([&] {
    *out = new ds_scenario{dependsim::scenario::load_scenario_file(path)};
  });
}

ds_status ds_scenario_load_string(const char* text, ds_scenario** out) {
  DS_REQUIRE(text && out);
  return guarded([&] {
    *out = new ds_scenario{dependsim::scenario::load_scenario_string(text)};
  });
}

void ds_scenario_free(ds_scenario* s) { delete s; }

ds_status ds_scenario_set_seed(ds_scenario* s, uint64_t seed) {
  DS_REQUIRE(s);
  s->value.seed = seed;
  return DS_OK;
}

ds_status ds_scenario_set_run_length(ds_scenario* s, int64_t run_length) {
  DS_REQUIRE(s && run_length >= 0);
  s->value.run_length = run_length;
  return DS_OK;
}

ds_status ds_scenario_add_patterns(ds_scenario* s, const char* patterns) {
  DS_REQUIRE(s && patterns);
  return guarded([&] {
    auto added = dependsim::scenario::load_patterns_string(patterns);
    auto& list = s->value.engine.patterns;
    for (auto& p : added) {
      for (const auto& q : list)
        if (q.id == p.id)
          throw dependsim::ConfigError("analysis.patterns", 0,
                                       "duplicate pattern '" + p.id + "'");
      list.push_back(std::move(p));
    }
  });
}

ds_status ds_run_create(const ds_scenario* s, ds_trace_level level, ds_run** out) {
  DS_REQUIRE(s && out);
  DS_REQUIRE(level == DS_TRACE_FULL || level == DS_TRACE_PROTOCOL);
  return guarded([&] {
    dependsim::runtime::RunOptions options;
    options.level = level == DS_TRACE_FULL ? dependsim::sim::TraceLevel::Full
                                           : dependsim::sim::TraceLevel::Protocol;
    auto world = std::make_unique<dependsim::runtime::World>(s->value, options);
    *out = new ds_run{std::move(world)};
  });
}

void ds_run_free(ds_run* r) { delete r; }

ds_status ds_run_until(ds_run* r, int64_t t) {
  DS_REQUIRE(r);
  return guarded([&] { r->world->run_until(t); });
}

ds_status ds_run_finish(ds_run* r) {
  DS_REQUIRE(r);
  return guarded([&] { r->world->run(); });
}

int64_t ds_run_now(const ds_run* r) { return r ? r->world->now() : 0; }

size_t ds_run_trace_size(const ds_run* r) { return r ? r->world->trace().size() : 0; }

ds_status ds_run_trace_jsonl(const ds_run* r, char** out) {
  DS_REQUIRE(r && out);
  return guarded([&] { *out = dup(dependsim::to_jsonl(r->world->trace())); });
}

ds_status ds_run_write_trace(const ds_run* r, const char* path) {
  DS_REQUIRE(r && path);
  return guarded([&] { write_file(path, dependsim::to_jsonl(r->world->trace())); });
}

ds_status ds_run_metrics_json(const ds_run* r, char** out) {
  DS_REQUIRE(r && out);
  return guarded([&] { *out = dup(metrics_text(r->world->trace())); });
}

ds_status ds_run_write_metrics(const ds_run* r, const char* path) {
  DS_REQUIRE(r && path);
  return guarded([&] { write_file(path, metrics_text(r->world->trace())); });
}

ds_status ds_run_learned_patterns(const ds_run* r, char** out) {
  DS_REQUIRE(r && out);
  return guarded([&] {
    dependsim::Json list = dependsim::Json::array();
    for (const auto& p : r->world->learned_patterns())
      list.push_back(dependsim::scenario::pattern_to_json(p));
    *out = dup(list.dump());
  });
}

ds_status ds_run_verify(const ds_run* r, char** violations, size_t* count) {
  DS_REQUIRE(r);
  return report(r->world->trace(), violations, count);
}

ds_status ds_verify_trace_file(const char* path, char** violations, size_t* count) {
  DS_REQUIRE(path);
  dependsim::Trace trace;
  if (auto st = guarded([&] { trace = read_trace(path); }); st != DS_OK) return st;
  return report(trace, violations, count);
}

ds_status ds_metrics_trace_file(const char* path, char** out) {
  DS_REQUIRE(path && out);
  return guarded([&] { *out = dup(metrics_text(read_trace(path))); });
}

}  // extern "C"
