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

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "adatrotter/controller.hpp"

namespace adatrotter {

inline constexpr std::array<std::string_view, 15> kTraceColumns = {
    "m",     "t",      "dt",     "trials", "frozen",
    "E_i",   "E_f",    "var_i",  "var_f",  "cum_dE",
    "cum_dVar", "Mx",  "Mz",     "exact_Mx", "exact_Mz"};

/// Shortest round-trippable rendering with 17 significant digits.
std::string format_double(double v);

std::string trace_to_csv(const TraceLog &log);
TraceLog trace_from_csv(std::string_view text);

std::string scaling_rows_to_csv(const ScalingTable &table);
std::string scaling_slopes_to_csv(const ScalingTable &table);

void write_text_file(const std::filesystem::path &path, std::string_view text);
std::string read_text_file(const std::filesystem::path &path);

} // namespace adatrotter
