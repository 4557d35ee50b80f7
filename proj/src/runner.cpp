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

#include "adatrotter/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include "adatrotter/dense.hpp"
#include "adatrotter/errors.hpp"
#include "adatrotter/magnus.hpp"
#include "adatrotter/trace_io.hpp"

#ifndef ADATROTTER_VERSION
#define ADATROTTER_VERSION "0.0.0"
#endif

namespace adatrotter {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json tolerance_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

json trace_summary(const TraceLog &log) {
    return {{"steps", log.steps.size()},
            {"final_time", log.final_time()},
            {"mean_trials", log.mean_trials()},
            {"max_trials", log.max_trials()},
            {"frozen_steps", log.frozen_steps()},
            {"halted_on_freeze", log.halted_on_freeze},
            {"max_norm_drift", log.max_norm_drift},
            {"has_exact", log.has_exact}};
}

json oracle_json(const RunConfig &cfg) {
    return {{"enabled", cfg.run.oracle},
            {"method", "midpoint splitting refined by step doubling with "
                       "Richardson extrapolation"},
            {"tolerance", cfg.run.oracle_tolerance}};
}

json control_json(const RunConfig &cfg) {
    const auto tol = cfg.control.effective();
    const auto &p = cfg.control.policy;
    return {{"effective_tolerances",
             {{"d_E", tolerance_json(tol.d_E)},
              {"d_var", tolerance_json(tol.d_var)},
              {"dg_E", tolerance_json(tol.dg_E)},
              {"dg_var", tolerance_json(tol.dg_var)}}},
            {"trial_bound", p.trial_bound()},
            {"trotter_order", p.lambda},
            {"bisection",
             "first trial at dt_max, then bisection keeping the largest passing "
             "probe; if nothing passes the last probe is dt_min, accepted as "
             "frozen"}};
}

int fixed_step_count(const RunSettings &r) {
    if (r.N_steps) {
        return *r.N_steps;
    }
    return std::max(1, static_cast<int>(std::llround(*r.t_final / r.dt)));
}

DispatchResult write_trace(const RunConfig &cfg, const TraceLog &log,
                           json run_info) {
    DispatchResult res;
    const fs::path out(cfg.run.out);
    const auto csv = out / "trace.csv";
    const auto meta = out / "trace.json";
    write_text_file(csv, trace_to_csv(log));
    run_info.update(trace_summary(log));
    write_text_file(meta, run_metadata(cfg, run_info).dump(2) + "\n");
    res.artifacts = {csv, meta};
    if (!cfg.run.checkpoint.empty()) {
        write_state(log.final_state, cfg.run.checkpoint);
        res.artifacts.emplace_back(cfg.run.checkpoint);
    }
    if (log.halted_on_freeze) {
        res.exit_code = kExitFreezeHalt;
        res.message = "halted on frozen step at t = " +
                      format_double(log.final_time());
    }
    return res;
}

DispatchResult do_scaling(const RunConfig &cfg) {
    const auto table = scaling_study(cfg.model, cfg.theta, cfg.run.t,
                                     cfg.run.dt_grid, cfg.run.k_list);
    const fs::path out(cfg.run.out);
    DispatchResult res;
    res.artifacts = {out / "scaling.csv", out / "slopes.csv", out / "scaling.json"};
    write_text_file(res.artifacts[0], scaling_rows_to_csv(table));
    write_text_file(res.artifacts[1], scaling_slopes_to_csv(table));
    json info = {{"mode", to_string(cfg.run.mode)}, {"trimmed_dt", table.trimmed}};
    write_text_file(res.artifacts[2], run_metadata(cfg, info).dump(2) + "\n");
    return res;
}

DispatchResult do_magnus_check(const RunConfig &cfg) {
    const fs::path out(cfg.run.out);
    DispatchResult res;
    const auto ops = build_static_operators(cfg.model);
    json info = {{"mode", to_string(cfg.run.mode)},
                 {"window", {{"t", cfg.run.t}, {"dt", cfg.run.dt}}}};
    json terms = json::object();
    for (int k : cfg.run.k_list) {
        const auto h = build_piecewise_hamiltonian(cfg.model, ops, cfg.run.t,
                                                   cfg.run.dt, k);
        const auto path = out / ("hamiltonian_k" + std::to_string(k) + ".txt");
        write_text_file(path, h.op.to_text());
        res.artifacts.push_back(path);
        terms[std::to_string(k)] = h.op.terms().size();
    }
    info["term_counts"] = terms;
    if (cfg.model.num_sites <= dense::kMaxOracleSites) {
        std::vector<double> grid = cfg.run.dt_grid;
        if (grid.empty()) {
            grid.push_back(cfg.run.dt);
        }
        std::string csv = "dt,k,norm\n";
        std::vector<double> trimmed;
        for (double dt : grid) {
            try {
                const auto h_inf = dense_h_infinity(cfg.model, cfg.run.t, dt);
                for (int k : cfg.run.k_list) {
                    const auto h = build_piecewise_hamiltonian(cfg.model, ops,
                                                               cfg.run.t, dt, k);
                    const double norm = dense::operator_norm(h_inf - to_dense(h.op));
                    csv += format_double(dt) + ',' + std::to_string(k) + ',' +
                           format_double(norm) + '\n';
                }
            } catch (const BranchError &) {
                trimmed.push_back(dt);
            }
        }
        const auto path = out / "truncation.csv";
        write_text_file(path, csv);
        res.artifacts.push_back(path);
        info["trimmed_dt"] = trimmed;
    }
    const auto meta = out / "magnus.json";
    write_text_file(meta, run_metadata(cfg, info).dump(2) + "\n");
    res.artifacts.push_back(meta);
    return res;
}

void write_error_record(const fs::path &out_dir, int code, const std::string &kind,
                        const std::string &message) {
    if (out_dir.empty()) {
        return;
    }
    const json rec = {{"status", "error"},
                      {"exit_code", code},
                      {"kind", kind},
                      {"message", message},
                      {"version", version_string()}};
    try {
        write_text_file(out_dir / "error.json", rec.dump(2) + "\n");
    } catch (const std::exception &) {
        // The output directory itself may be the problem; stderr still has it.
    }
}

} // namespace

const char *version_string() { return ADATROTTER_VERSION; }

json run_metadata(const RunConfig &config, const json &run_info) {
    json info = run_info;
    info["version"] = version_string();
    info["oracle"] = oracle_json(config);
    info["control"] = control_json(config);
    if (!config.note.empty()) {
        info["note"] = config.note;
    }
    return {{"config", config_to_json(config)}, {"run_info", info}};
}

DispatchResult dispatch(const RunConfig &cfg) {
    const auto &r = cfg.run;
    const int k = cfg.control.policy.k;
    json info = {{"mode", to_string(r.mode)}};
    switch (r.mode) {
    case RunMode::run_adaptive: {
        const auto log = run_adaptive(cfg.model, cfg.theta, cfg.control.effective(),
                                      cfg.control.policy, cfg.stop(), cfg.oracle());
        return write_trace(cfg, log, info);
    }
    case RunMode::run_fixed: {
        const int n = fixed_step_count(r);
        info["N_steps"] = n;
        const auto log = run_fixed(cfg.model, cfg.theta, r.dt, n, cfg.oracle(), k);
        return write_trace(cfg, log, info);
    }
    case RunMode::run_exact: {
        const int n = fixed_step_count(r);
        info["N_steps"] = n;
        const auto log =
            run_exact(cfg.model, cfg.theta, r.dt, n, k, cfg.oracle().exact);
        return write_trace(cfg, log, info);
    }
    case RunMode::scaling_study:
        return do_scaling(cfg);
    case RunMode::magnus_check:
        return do_magnus_check(cfg);
    }
    throw ConfigError("run.mode: unhandled");
}

DispatchResult run_guarded(const fs::path &out_dir,
                           const std::function<DispatchResult()> &body) {
    DispatchResult res;
    std::string kind;
    try {
        res = body();
        if (res.exit_code == kExitFreezeHalt) {
            write_error_record(out_dir, res.exit_code, "freeze_halt", res.message);
        }
        return res;
    } catch (const ConfigError &e) {
        res.exit_code = kExitConfigError;
        kind = "config";
        res.message = e.what();
    } catch (const NumericalError &e) {
        res.exit_code = kExitNumericalError;
        kind = "numerical";
        res.message = e.what();
    } catch (const std::invalid_argument &e) {
        res.exit_code = kExitConfigError;
        kind = "config";
        res.message = e.what();
    } catch (const std::exception &e) {
        res.exit_code = kExitFailure;
        kind = "internal";
        res.message = e.what();
    }
    write_error_record(out_dir, res.exit_code, kind, res.message);
    return res;
}

DispatchResult dispatch_guarded(const RunConfig &config) {
    return run_guarded(config.run.out, [&] { return dispatch(config); });
}

int sweep_thread_count() {
    if (const char *env = std::getenv("TADA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return 1;
}

std::vector<DispatchResult> sweep(const std::vector<RunConfig> &configs,
                                  int threads) {
    std::set<fs::path> outs;
    for (const auto &c : configs) {
        if (!outs.insert(fs::weakly_canonical(c.run.out)).second) {
            throw ConfigError("run.out: sweep entries share output directory " +
                              c.run.out);
        }
    }
    std::vector<DispatchResult> results(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            results[i] = dispatch_guarded(configs[i]);
        }
    };
    const int n = std::clamp<int>(threads, 1, std::max<int>(1, configs.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    return results;
}

} // namespace adatrotter
