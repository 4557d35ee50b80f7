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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "adatrotter/controller.hpp"
#include "adatrotter/hamiltonian.hpp"

namespace adatrotter {

/// Schema or value error. The message starts with the dotted key.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class RunMode {
    run_adaptive,
    run_fixed,
    run_exact,
    scaling_study,
    magnus_check,
};

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string &name);

enum class ControlScheme { off, local, global, both };

std::string to_string(ControlScheme scheme);

struct ControlConfig {
    ControlScheme scheme = ControlScheme::off;
    /// As written in the file; effective() masks the pairs the scheme turns off.
    ToleranceSet tolerances;
    StepPolicy policy;

    ToleranceSet effective() const;
};

struct RunSettings {
    RunMode mode = RunMode::run_adaptive;
    std::optional<int> N_steps;
    std::optional<double> t_final;
    /// Step for run-fixed / run-exact and the window length for magnus-check.
    double dt = 0.2;
    bool oracle = false;
    double oracle_tolerance = 1e-10;
    std::string out = "out";
    std::string checkpoint;
    /// Window start for scaling-study and magnus-check.
    double t = 0.0;
    std::vector<double> dt_grid;
    std::vector<int> k_list{1, 3, 5};
};

struct RunConfig {
    HamiltonianSpec model;
    double theta = 0.0;
    ControlConfig control;
    RunSettings run;
    std::string note;

    StopCondition stop() const;
    OracleOptions oracle() const;
};

/// Accepts either a bare config or a metadata sidecar {"config": ...}.
RunConfig config_from_json(const nlohmann::json &doc);
RunConfig parse_config(const std::filesystem::path &path);

/// Fully explicit form with defaults applied. Infinite tolerances are
/// written as the string "inf".
nlohmann::json config_to_json(const RunConfig &config);

/// Applies "section.key=value" (or "section.sub.key=value") to a raw
/// document. The value is parsed as JSON when possible, else kept as a string.
void apply_override(nlohmann::json &doc, const std::string &assignment);

/// File load + overrides + validation.
RunConfig load_config(const std::filesystem::path &path,
                      const std::vector<std::string> &overrides);

} // namespace adatrotter
