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

#include "adatrotter/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace adatrotter {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string optional_cell(const std::optional<double> &v) {
    return v ? format_double(*v) : std::string{};
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_cell(const std::string &s) {
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw std::invalid_argument("bad numeric CSV cell '" + s + "'");
    }
    return v;
}

} // namespace

std::string trace_to_csv(const TraceLog &log) {
    std::string out;
    for (std::size_t i = 0; i < kTraceColumns.size(); ++i) {
        out += kTraceColumns[i];
        out += i + 1 < kTraceColumns.size() ? ',' : '\n';
    }
    for (const auto &r : log.steps) {
        out += std::to_string(r.index) + ',' + format_double(r.t) + ',' +
               format_double(r.dt) + ',' + std::to_string(r.trials) + ',' +
               (r.frozen ? "1" : "0") + ',' + format_double(r.E_i) + ',' +
               format_double(r.E_f) + ',' + format_double(r.var_i) + ',' +
               format_double(r.var_f) + ',' + format_double(r.cum_dE) + ',' +
               format_double(r.cum_dVar) + ',' + format_double(r.Mx) + ',' +
               format_double(r.Mz) + ',' + optional_cell(r.exact_Mx) + ',' +
               optional_cell(r.exact_Mz) + '\n';
    }
    return out;
}

TraceLog trace_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty trace CSV");
    }
    const auto header = split_csv_line(line);
    if (header.size() != kTraceColumns.size()) {
        throw std::invalid_argument("trace CSV header has wrong column count");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != kTraceColumns[i]) {
            throw std::invalid_argument("unexpected trace column '" + header[i] +
                                        "'");
        }
    }
    TraceLog log;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto c = split_csv_line(line);
        if (c.size() != kTraceColumns.size()) {
            throw std::invalid_argument("trace row has wrong column count");
        }
        StepRecord r;
        r.index = static_cast<int>(parse_cell(c[0]));
        r.t = parse_cell(c[1]);
        r.dt = parse_cell(c[2]);
        r.trials = static_cast<int>(parse_cell(c[3]));
        r.frozen = c[4] == "1";
        r.E_i = parse_cell(c[5]);
        r.E_f = parse_cell(c[6]);
        r.var_i = parse_cell(c[7]);
        r.var_f = parse_cell(c[8]);
        r.cum_dE = parse_cell(c[9]);
        r.cum_dVar = parse_cell(c[10]);
        r.Mx = parse_cell(c[11]);
        r.Mz = parse_cell(c[12]);
        if (!c[13].empty()) {
            r.exact_Mx = parse_cell(c[13]);
            r.exact_Mz = parse_cell(c[14]);
            log.has_exact = true;
        }
        log.steps.push_back(r);
    }
    return log;
}

std::string scaling_rows_to_csv(const ScalingTable &table) {
    std::string out = "dt,k,abs_dE,abs_dVar,abs_delta,abs_delta_var,truncation_norm\n";
    for (const auto &r : table.rows) {
        out += format_double(r.dt) + ',' + std::to_string(r.k) + ',' +
               format_double(r.abs_dE) + ',' + format_double(r.abs_dVar) + ',' +
               format_double(r.abs_delta) + ',' +
               format_double(r.abs_delta_var) + ',' +
               format_double(r.truncation_norm) + '\n';
    }
    return out;
}

std::string scaling_slopes_to_csv(const ScalingTable &table) {
    std::string out = "k,slope_dE,slope_dVar,slope_delta,slope_delta_var,"
                      "slope_truncation_norm\n";
    for (const auto &s : table.slopes) {
        out += std::to_string(s.k) + ',' + format_double(s.dE) + ',' +
               format_double(s.dVar) + ',' + format_double(s.delta) + ',' +
               format_double(s.delta_var) + ',' +
               format_double(s.truncation_norm) + '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path &path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace adatrotter
