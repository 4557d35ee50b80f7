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

#include "adatrotter/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "adatrotter/magnus.hpp"

namespace adatrotter {

using nlohmann::json;

namespace {

constexpr int kMaxConfigSites = 24;

[[noreturn]] void fail(const std::string &key, const std::string &what) {
    throw ConfigError(key + ": " + what);
}

// Reads one JSON object and remembers which keys were consumed so leftovers
// can be reported as unknown.
class Section {
  public:
    Section(const json &node, std::string path)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            fail(path_, "must be an object");
        }
    }

    std::string key_path(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json *find(const std::string &key) {
        used_.insert(key);
        auto it = node_.find(key);
        if (it == node_.end() || it->is_null()) {
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const std::string &key, bool allow_inf = false) {
        const json *v = find(key);
        if (!v) {
            return std::nullopt;
        }
        if (allow_inf && v->is_string()) {
            const auto s = v->get<std::string>();
            if (s == "inf" || s == "Infinity" || s == "infinity") {
                return kDisabled;
            }
            fail(key_path(key), "expected a number or \"inf\", got \"" + s + "\"");
        }
        if (!v->is_number()) {
            fail(key_path(key), "expected a number");
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) {
            fail(key_path(key), "must be finite");
        }
        return d;
    }

    std::optional<int> integer(const std::string &key) {
        const json *v = find(key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_number_integer()) {
            fail(key_path(key), "expected an integer");
        }
        return v->get<int>();
    }

    std::optional<std::string> string(const std::string &key) {
        const json *v = find(key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_string()) {
            fail(key_path(key), "expected a string");
        }
        return v->get<std::string>();
    }

    std::optional<bool> on_off(const std::string &key) {
        const json *v = find(key);
        if (!v) {
            return std::nullopt;
        }
        if (v->is_boolean()) {
            return v->get<bool>();
        }
        if (v->is_string()) {
            const auto s = v->get<std::string>();
            if (s == "on") {
                return true;
            }
            if (s == "off") {
                return false;
            }
        }
        fail(key_path(key), "expected true/false or \"on\"/\"off\"");
    }

    void finish() const {
        for (const auto &item : node_.items()) {
            if (!used_.count(item.key())) {
                fail(key_path(item.key()), "unknown key");
            }
        }
    }

  private:
    const json &node_;
    std::string path_;
    std::set<std::string> used_;
};

DriveSchedule parse_drive(const json &node, const std::string &path) {
    Section s(node, path);
    const auto kind_name = s.string("kind").value_or("constant");
    DriveSchedule d;
    if (kind_name == "constant") {
        d = DriveSchedule::constant(s.number("value").value_or(1.0));
    } else if (kind_name == "damped_cosine") {
        const double tau = s.number("tau").value_or(1.0);
        if (!(tau > 0.0)) {
            fail(s.key_path("tau"), "must be > 0");
        }
        d = DriveSchedule::damped_cosine(s.number("omega").value_or(0.0), tau,
                                         s.number("offset").value_or(0.0),
                                         s.number("amplitude").value_or(1.0));
    } else {
        fail(s.key_path("kind"),
             "must be \"constant\" or \"damped_cosine\", got \"" + kind_name + "\"");
    }
    s.finish();
    return d;
}

json drive_to_json(const DriveSchedule &d) {
    switch (d.kind) {
    case DriveSchedule::Kind::constant:
        return {{"kind", "constant"}, {"value", d.amplitude}};
    case DriveSchedule::Kind::damped_cosine:
        return {{"kind", "damped_cosine"},
                {"amplitude", d.amplitude},
                {"omega", d.omega},
                {"tau", d.tau},
                {"offset", d.offset}};
    case DriveSchedule::Kind::custom:
        break;
    }
    throw ConfigError("drive: custom schedules cannot be serialized");
}

json tolerance_to_json(double v) {
    return std::isinf(v) ? json("inf") : json(v);
}

void require_positive_tolerance(double v, const std::string &key) {
    if (!(v > 0.0)) {
        fail(key, "must be > 0 (use \"inf\" to disable)");
    }
}

void check_k(int k, const std::string &key) {
    if (!is_supported_truncation(k)) {
        fail(key, "must be 1, 3 or 5");
    }
}

} // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::run_adaptive:
        return "run-adaptive";
    case RunMode::run_fixed:
        return "run-fixed";
    case RunMode::run_exact:
        return "run-exact";
    case RunMode::scaling_study:
        return "scaling-study";
    case RunMode::magnus_check:
        return "magnus-check";
    }
    return "?";
}

RunMode run_mode_from_string(const std::string &name) {
    for (auto m : {RunMode::run_adaptive, RunMode::run_fixed, RunMode::run_exact,
                   RunMode::scaling_study, RunMode::magnus_check}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ConfigError("run.mode: unknown mode \"" + name + "\"");
}

std::string to_string(ControlScheme scheme) {
    switch (scheme) {
    case ControlScheme::off:
        return "off";
    case ControlScheme::local:
        return "local";
    case ControlScheme::global:
        return "global";
    case ControlScheme::both:
        return "both";
    }
    return "?";
}

ToleranceSet ControlConfig::effective() const {
    ToleranceSet t;
    if (scheme == ControlScheme::local || scheme == ControlScheme::both) {
        t.d_E = tolerances.d_E;
        t.d_var = tolerances.d_var;
    }
    if (scheme == ControlScheme::global || scheme == ControlScheme::both) {
        t.dg_E = tolerances.dg_E;
        t.dg_var = tolerances.dg_var;
    }
    return t;
}

StopCondition RunConfig::stop() const {
    StopCondition s;
    s.t_final = run.t_final;
    s.max_steps = run.N_steps;
    return s;
}

OracleOptions RunConfig::oracle() const {
    OracleOptions o;
    o.enabled = run.oracle;
    o.exact.tolerance = run.oracle_tolerance;
    return o;
}

RunConfig config_from_json(const json &input) {
    const json *root = &input;
    if (input.is_object() && input.contains("config") && input.contains("run_info")) {
        root = &input.at("config");
    }
    Section top(*root, "");
    RunConfig cfg;
    cfg.note = top.string("note").value_or("");

    // model
    if (const json *m = top.find("model")) {
        Section s(*m, "model");
        const int L = s.integer("L").value_or(cfg.model.num_sites);
        if (L < 2 || L > kMaxConfigSites) {
            fail("model.L", "must be in [2, " + std::to_string(kMaxConfigSites) + "]");
        }
        cfg.model.num_sites = L;
        cfg.model.J_z = s.number("J_z").value_or(cfg.model.J_z);
        cfg.model.h_x = s.number("h_x").value_or(cfg.model.h_x);
        cfg.model.h_z = s.number("h_z").value_or(cfg.model.h_z);
        const auto boundary = s.string("boundary").value_or("periodic");
        if (boundary != "periodic") {
            fail("model.boundary", "only \"periodic\" is supported");
        }
        s.finish();
    } else {
        fail("model", "section is required");
    }

    if (const json *d = top.find("drive")) {
        Section s(*d, "drive");
        if (const json *g = s.find("g")) {
            cfg.model.g = parse_drive(*g, "drive.g");
        }
        if (const json *f = s.find("f")) {
            cfg.model.f = parse_drive(*f, "drive.f");
        }
        s.finish();
    }

    if (const json *i = top.find("initial")) {
        Section s(*i, "initial");
        cfg.theta = s.number("theta").value_or(0.0);
        s.finish();
    }

    // control
    {
        auto &c = cfg.control;
        std::optional<std::string> scheme;
        bool any_local = false;
        bool any_global = false;
        if (const json *n = top.find("control")) {
            Section s(*n, "control");
            scheme = s.string("scheme");
            if (auto v = s.number("d_E", true)) {
                c.tolerances.d_E = *v;
                any_local = any_local || std::isfinite(*v);
            }
            if (auto v = s.number("d_var", true)) {
                c.tolerances.d_var = *v;
                any_local = any_local || std::isfinite(*v);
            }
            if (auto v = s.number("dg_E", true)) {
                c.tolerances.dg_E = *v;
                any_global = any_global || std::isfinite(*v);
            }
            if (auto v = s.number("dg_var", true)) {
                c.tolerances.dg_var = *v;
                any_global = any_global || std::isfinite(*v);
            }
            c.policy.k = s.integer("k").value_or(c.policy.k);
            c.policy.dt_min = s.number("dt_min").value_or(c.policy.dt_min);
            c.policy.dt_max = s.number("dt_max").value_or(c.policy.dt_max);
            c.policy.bisect_eps = s.number("bisect_eps").value_or(c.policy.bisect_eps);
            c.policy.max_trials = s.integer("max_trials").value_or(c.policy.max_trials);
            const auto freeze = s.string("on_freeze").value_or("continue");
            if (freeze == "continue") {
                c.policy.on_freeze = FreezeAction::continue_run;
            } else if (freeze == "halt") {
                c.policy.on_freeze = FreezeAction::halt;
            } else {
                fail("control.on_freeze", "must be \"continue\" or \"halt\"");
            }
            s.finish();
        }
        if (scheme) {
            if (*scheme == "off") {
                c.scheme = ControlScheme::off;
            } else if (*scheme == "local") {
                c.scheme = ControlScheme::local;
            } else if (*scheme == "global") {
                c.scheme = ControlScheme::global;
            } else if (*scheme == "both") {
                c.scheme = ControlScheme::both;
            } else {
                fail("control.scheme", "must be off, local, global or both");
            }
        } else if (any_local && any_global) {
            c.scheme = ControlScheme::both;
        } else if (any_local) {
            c.scheme = ControlScheme::local;
        } else if (any_global) {
            c.scheme = ControlScheme::global;
        }
        require_positive_tolerance(c.tolerances.d_E, "control.d_E");
        require_positive_tolerance(c.tolerances.d_var, "control.d_var");
        require_positive_tolerance(c.tolerances.dg_E, "control.dg_E");
        require_positive_tolerance(c.tolerances.dg_var, "control.dg_var");
        check_k(c.policy.k, "control.k");
        if (!(c.policy.dt_min > 0.0)) {
            fail("control.dt_min", "must be > 0");
        }
        if (!(c.policy.dt_max >= c.policy.dt_min)) {
            fail("control.dt_max", "must be >= control.dt_min");
        }
        if (!(c.policy.bisect_eps > 0.0)) {
            fail("control.bisect_eps", "must be > 0");
        }
        if (c.policy.max_trials < 1) {
            fail("control.max_trials", "must be >= 1");
        }
    }

    // run
    if (const json *n = top.find("run")) {
        auto &r = cfg.run;
        Section s(*n, "run");
        if (auto m = s.string("mode")) {
            r.mode = run_mode_from_string(*m);
        }
        r.N_steps = s.integer("N_steps");
        r.t_final = s.number("t_final");
        r.dt = s.number("dt").value_or(r.dt);
        r.oracle = s.on_off("oracle").value_or(r.oracle);
        r.oracle_tolerance = s.number("oracle_tolerance").value_or(r.oracle_tolerance);
        r.out = s.string("out").value_or(r.out);
        r.checkpoint = s.string("checkpoint").value_or("");
        r.t = s.number("t").value_or(r.t);
        if (const json *g = s.find("dt_grid")) {
            if (!g->is_array()) {
                fail("run.dt_grid", "expected an array of numbers");
            }
            r.dt_grid.clear();
            for (const auto &v : *g) {
                if (!v.is_number() || !std::isfinite(v.get<double>()) ||
                    !(v.get<double>() > 0.0)) {
                    fail("run.dt_grid", "entries must be finite numbers > 0");
                }
                r.dt_grid.push_back(v.get<double>());
            }
        }
        if (const json *kl = s.find("k_list")) {
            if (!kl->is_array() || kl->empty()) {
                fail("run.k_list", "expected a non-empty array of integers");
            }
            r.k_list.clear();
            for (const auto &v : *kl) {
                if (!v.is_number_integer()) {
                    fail("run.k_list", "entries must be integers");
                }
                check_k(v.get<int>(), "run.k_list");
                r.k_list.push_back(v.get<int>());
            }
        }
        s.finish();
    }
    top.finish();

    const auto &r = cfg.run;
    if (r.N_steps && *r.N_steps < 1) {
        fail("run.N_steps", "must be >= 1");
    }
    if (r.t_final && !(*r.t_final > 0.0)) {
        fail("run.t_final", "must be > 0");
    }
    if (!(r.dt > 0.0)) {
        fail("run.dt", "must be > 0");
    }
    if (!(r.oracle_tolerance > 0.0)) {
        fail("run.oracle_tolerance", "must be > 0");
    }
    switch (r.mode) {
    case RunMode::run_adaptive:
    case RunMode::run_fixed:
    case RunMode::run_exact:
        if (!r.N_steps && !r.t_final) {
            fail("run.N_steps", "N_steps or t_final is required for " + to_string(r.mode));
        }
        break;
    case RunMode::scaling_study:
        if (r.dt_grid.size() < 2) {
            fail("run.dt_grid", "scaling-study needs at least two entries");
        }
        if (cfg.model.num_sites > 8) {
            fail("model.L", "scaling-study uses dense matrices and needs L <= 8");
        }
        break;
    case RunMode::magnus_check:
        break;
    }
    if (r.mode != RunMode::run_adaptive && r.mode != RunMode::run_fixed &&
        r.oracle) {
        fail("run.oracle", "only meaningful for run-adaptive and run-fixed");
    }
    if (r.t < 0.0) {
        fail("run.t", "must be >= 0");
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path &path) {
    return load_config(path, {});
}

json config_to_json(const RunConfig &cfg) {
    json j;
    if (!cfg.note.empty()) {
        j["note"] = cfg.note;
    }
    j["model"] = {{"L", cfg.model.num_sites},
                  {"J_z", cfg.model.J_z},
                  {"h_x", cfg.model.h_x},
                  {"h_z", cfg.model.h_z},
                  {"boundary", "periodic"}};
    j["drive"] = {{"g", drive_to_json(cfg.model.g)}, {"f", drive_to_json(cfg.model.f)}};
    j["initial"] = {{"theta", cfg.theta}};
    const auto &c = cfg.control;
    j["control"] = {
        {"scheme", to_string(c.scheme)},
        {"d_E", tolerance_to_json(c.tolerances.d_E)},
        {"d_var", tolerance_to_json(c.tolerances.d_var)},
        {"dg_E", tolerance_to_json(c.tolerances.dg_E)},
        {"dg_var", tolerance_to_json(c.tolerances.dg_var)},
        {"k", c.policy.k},
        {"dt_min", c.policy.dt_min},
        {"dt_max", c.policy.dt_max},
        {"bisect_eps", c.policy.bisect_eps},
        {"max_trials", c.policy.max_trials},
        {"on_freeze", c.policy.on_freeze == FreezeAction::halt ? "halt" : "continue"}};
    const auto &r = cfg.run;
    json run = {{"mode", to_string(r.mode)},
                {"dt", r.dt},
                {"oracle", r.oracle ? "on" : "off"},
                {"oracle_tolerance", r.oracle_tolerance},
                {"out", r.out},
                {"t", r.t},
                {"dt_grid", r.dt_grid},
                {"k_list", r.k_list}};
    if (r.N_steps) {
        run["N_steps"] = *r.N_steps;
    }
    if (r.t_final) {
        run["t_final"] = *r.t_final;
    }
    if (!r.checkpoint.empty()) {
        run["checkpoint"] = r.checkpoint;
    }
    j["run"] = std::move(run);
    return j;
}

void apply_override(json &doc, const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set: expected section.key=value, got \"" + assignment +
                          "\"");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error &) {
        value = text;
    } catch (const json::out_of_range &) {
        throw ConfigError(key + ": number out of range");
    }
    json *node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (part.empty()) {
            throw ConfigError("--set: empty path component in \"" + key + "\"");
        }
        if (!node->is_object()) {
            throw ConfigError(key + ": cannot descend into a non-object");
        }
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) {
            *node = json::object();
        }
        start = dot + 1;
    }
}

RunConfig load_config(const std::filesystem::path &path,
                      const std::vector<std::string> &overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception &e) {
        throw ConfigError("config: " + path.string() + " is not valid JSON (" +
                          e.what() + ")");
    }
    if (doc.is_object() && doc.contains("config") && doc.contains("run_info")) {
        json inner = doc.at("config");
        doc = std::move(inner);
    }
    for (const auto &o : overrides) {
        apply_override(doc, o);
    }
    return config_from_json(doc);
}

} // namespace adatrotter
