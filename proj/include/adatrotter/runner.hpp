// Copyright 2026 The adatrotter Authors
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

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "adatrotter/config.hpp"

namespace adatrotter {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;
inline constexpr int kExitFreezeHalt = 4;

const char *version_string();

struct DispatchResult {
    int exit_code = kExitOk;
    std::string message;
    std::vector<std::filesystem::path> artifacts;
};

/// Runs config.run.mode and writes its artifacts under config.run.out:
///   run-adaptive / run-fixed / run-exact: trace.csv + trace.json
///   scaling-study: scaling.csv + slopes.csv + scaling.json
///   magnus-check: hamiltonian_k{k}.txt per k, truncation.csv (L <= 8), magnus.json
/// Numerical failures are not caught here; see dispatch_guarded.
DispatchResult dispatch(const RunConfig &config);

/// Maps exceptions from `body` to exit codes and writes error.json into
/// `out_dir` (when non-empty) on failure.
DispatchResult run_guarded(const std::filesystem::path &out_dir,
                           const std::function<DispatchResult()> &body);

DispatchResult dispatch_guarded(const RunConfig &config);

/// Metadata sidecar: {"config": <explicit config>, "run_info": {...}}.
nlohmann::json run_metadata(const RunConfig &config, const nlohmann::json &run_info);

/// Worker count for sweeps: TADA_THREADS when set and positive, else 1.
int sweep_thread_count();

/// Independent runs on up to `threads` workers. Output directories must be
/// distinct. Results are returned in input order.
std::vector<DispatchResult> sweep(const std::vector<RunConfig> &configs,
                                  int threads);

} // namespace adatrotter
