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

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adatrotter/config.hpp"
#include "adatrotter/runner.hpp"

namespace fs = std::filesystem;
using namespace adatrotter;

namespace {

struct Flags {
    std::vector<std::string> configs;
    std::vector<std::string> sets;
    std::string out;
    std::string checkpoint;
    std::string oracle;
};

void add_common_flags(CLI::App *cmd, Flags &f, bool many_configs) {
    if (many_configs) {
        cmd->add_option("--config", f.configs, "Config files, one run each")
            ->required()
            ->check(CLI::ExistingFile);
    } else {
        cmd->add_option("--config", f.configs, "Config file")
            ->required()
            ->expected(1)
            ->check(CLI::ExistingFile);
    }
    cmd->add_option("--set", f.sets, "Override, e.g. control.dg_E=0.02")
        ->take_all();
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--checkpoint", f.checkpoint, "Write the final state here");
    cmd->add_option("--oracle", f.oracle, "Co-evolve the reference state")
        ->check(CLI::IsMember({"on", "off"}));
}

std::vector<std::string> overrides_for(const Flags &f, const std::string &mode,
                                       const std::string &out) {
    std::vector<std::string> o = f.sets;
    if (!mode.empty()) {
        o.push_back("run.mode=\"" + mode + "\"");
    }
    if (!out.empty()) {
        o.push_back("run.out=" + nlohmann::json(out).dump());
    }
    if (!f.checkpoint.empty()) {
        o.push_back("run.checkpoint=" + nlohmann::json(f.checkpoint).dump());
    }
    if (!f.oracle.empty()) {
        o.push_back("run.oracle=\"" + f.oracle + "\"");
    }
    return o;
}

int report(const DispatchResult &r) {
    if (r.exit_code != kExitOk) {
        const nlohmann::json rec = {{"status", "error"},
                                    {"exit_code", r.exit_code},
                                    {"message", r.message}};
        std::fprintf(stderr, "%s\n", rec.dump().c_str());
    }
    for (const auto &p : r.artifacts) {
        std::printf("%s\n", p.string().c_str());
    }
    return r.exit_code;
}

int run_single(const Flags &f, const std::string &mode) {
    const fs::path out_hint = f.out.empty() ? fs::path{} : fs::path(f.out);
    RunConfig cfg;
    const auto loaded = run_guarded(out_hint, [&] {
        cfg = load_config(f.configs.at(0), overrides_for(f, mode, f.out));
        return DispatchResult{};
    });
    if (loaded.exit_code != kExitOk) {
        return report(loaded);
    }
    return report(dispatch_guarded(cfg));
}

int run_sweep(const Flags &f) {
    std::vector<RunConfig> cfgs;
    for (const auto &path : f.configs) {
        std::string out;
        if (!f.out.empty()) {
            out = (fs::path(f.out) / fs::path(path).stem()).string();
        }
        const auto loaded = run_guarded({}, [&] {
            cfgs.push_back(load_config(path, overrides_for(f, "", out)));
            return DispatchResult{};
        });
        if (loaded.exit_code != kExitOk) {
            return report(loaded);
        }
    }
    std::vector<DispatchResult> results;
    const auto started = run_guarded({}, [&] {
        results = sweep(cfgs, sweep_thread_count());
        return DispatchResult{};
    });
    if (started.exit_code != kExitOk) {
        return report(started);
    }
    int worst = kExitOk;
    for (const auto &r : results) {
        worst = std::max(worst, report(r));
    }
    return worst;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Adaptive Trotter evolution of driven spin chains"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    Flags flags;
    std::string mode;
    for (const char *name : {"run-adaptive", "run-fixed", "run-exact",
                             "scaling-study", "magnus-check"}) {
        auto *cmd = app.add_subcommand(name, std::string("Mode ") + name);
        add_common_flags(cmd, flags, false);
        cmd->callback([&mode, name] { mode = name; });
    }
    auto *sweep_cmd =
        app.add_subcommand("sweep", "Run several configs, TADA_THREADS workers");
    add_common_flags(sweep_cmd, flags, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }
    if (sweep_cmd->parsed()) {
        return run_sweep(flags);
    }
    return run_single(flags, mode);
}
