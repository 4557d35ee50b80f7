#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "adatrotter/config.hpp"
#include "adatrotter/errors.hpp"
#include "adatrotter/runner.hpp"
#include "adatrotter/trace_io.hpp"

using namespace adatrotter;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const auto p = fs::temp_directory_path() / ("adatrotter_unit_" + name);
    fs::remove_all(p);
    return p;
}

json small_adaptive() {
    return json::parse(R"({
      "model": {"L": 4, "J_z": 1.0, "h_x": 1.0, "h_z": 0.5},
      "drive": {"g": {"kind": "damped_cosine", "omega": 4.0, "tau": 1.0, "offset": 1.0}},
      "initial": {"theta": 2.0},
      "control": {"dg_E": 0.01, "dg_var": 0.02, "dt_min": 0.01, "dt_max": 0.7},
      "run": {"mode": "run-adaptive", "N_steps": 12, "oracle": "on"}
    })");
}

RunConfig with_out(json doc, const fs::path &out) {
    doc["run"]["out"] = out.string();
    return config_from_json(doc);
}

} // namespace

TEST_CASE("config: committed files parse") {
    int n = 0;
    for (const auto &e : fs::directory_iterator(ADATROTTER_CONFIG_DIR)) {
        if (e.path().extension() != ".json") {
            continue;
        }
        CAPTURE(e.path().string());
        CHECK_NOTHROW(parse_config(e.path()));
        ++n;
    }
    CHECK(n >= 9);
}

TEST_CASE("config: fig2 and fig4 values") {
    const fs::path dir(ADATROTTER_CONFIG_DIR);
    const auto local = parse_config(dir / "fig2_local.json");
    CHECK(local.control.scheme == ControlScheme::local);
    CHECK(local.control.effective().d_E == 0.01);
    CHECK(local.control.effective().d_var == 0.02);
    CHECK(std::isinf(local.control.effective().dg_E));
    CHECK(local.run.N_steps == 200);
    CHECK(local.model.g(0.0) == doctest::Approx(2.0));

    const auto fig4 = parse_config(dir / "fig4_adaptive.json");
    CHECK(fig4.control.scheme == ControlScheme::global);
    CHECK(fig4.control.effective().dg_E == 0.03);
    CHECK(fig4.control.effective().dg_var == 0.1);
    CHECK(fig4.control.policy.dt_min == 0.1);
    CHECK(fig4.control.policy.dt_max == 0.7);
    CHECK(fig4.model.h_x == 3.0);
    CHECK(fig4.run.N_steps == 100);
}

TEST_CASE("config: empty control means unconstrained") {
    json doc = small_adaptive();
    doc.erase("control");
    const auto cfg = config_from_json(doc);
    CHECK(cfg.control.scheme == ControlScheme::off);
    const auto tol = cfg.control.effective();
    CHECK(std::isinf(tol.d_E));
    CHECK(std::isinf(tol.d_var));
    CHECK(std::isinf(tol.dg_E));
    CHECK(std::isinf(tol.dg_var));
}

TEST_CASE("config: rejects bad input with the key in the message") {
    auto expect_key = [](json doc, const std::string &key) {
        try {
            config_from_json(doc);
            FAIL("accepted bad config for " << key);
        } catch (const ConfigError &e) {
            CHECK(std::string(e.what()).rfind(key, 0) == 0);
        }
    };
    json doc = small_adaptive();
    doc["model"]["spin"] = 1;
    expect_key(doc, "model.spin");

    doc = small_adaptive();
    doc["model"]["L"] = 1;
    expect_key(doc, "model.L");

    doc = small_adaptive();
    doc["control"]["dg_E"] = -0.1;
    expect_key(doc, "control");

    doc = small_adaptive();
    doc["run"].erase("N_steps");
    expect_key(doc, "run");

    doc = small_adaptive();
    doc["run"]["mode"] = "scaling-study";
    doc["run"]["oracle"] = false;
    doc["run"]["dt_grid"] = {0.1};
    expect_key(doc, "run.dt_grid");

    doc = small_adaptive();
    doc["control"]["on_freeze"] = "explode";
    expect_key(doc, "control.on_freeze");

    const auto dir = scratch("bad");
    write_text_file(dir / "overflow.json", R"({"model": {"L": 4, "h_x": 1e999}})");
    CHECK_THROWS_AS(parse_config(dir / "overflow.json"), ConfigError);
    write_text_file(dir / "truncated.json", R"({"model": {"L": 4)");
    CHECK_THROWS_AS(parse_config(dir / "truncated.json"), ConfigError);
    doc = small_adaptive();
    CHECK_THROWS_AS(apply_override(doc, "model.h_x=1e999"), ConfigError);
    doc["model"]["h_x"] = std::nan("");
    expect_key(doc, "model.h_x");
}

TEST_CASE("config: overrides and round trip") {
    json doc = small_adaptive();
    apply_override(doc, "control.dg_E=0.02");
    apply_override(doc, "drive.g.omega=2.5");
    apply_override(doc, "run.out=some/dir");
    apply_override(doc, "control.d_E=inf");
    const auto cfg = config_from_json(doc);
    CHECK(cfg.control.tolerances.dg_E == 0.02);
    CHECK(cfg.run.out == "some/dir");
    CHECK(cfg.control.scheme == ControlScheme::global);
    CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);

    const auto again = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(again) == config_to_json(cfg));
    CHECK(again.model.g(0.7) == cfg.model.g(0.7));
}

TEST_CASE("trace csv: header and round trip") {
    TraceLog log;
    StepRecord r;
    r.index = 0;
    r.t = 0.1;
    r.dt = 1.0 / 3.0;
    r.trials = 7;
    r.frozen = true;
    r.E_i = -0.123456789012345678;
    r.exact_Mx = 0.5;
    r.exact_Mz = -0.25;
    log.steps.push_back(r);
    r.index = 1;
    r.frozen = false;
    r.exact_Mx.reset();
    r.exact_Mz.reset();
    log.steps.push_back(r);

    const auto csv = trace_to_csv(log);
    CHECK(csv.rfind("m,t,dt,trials,frozen,E_i,E_f,var_i,var_f,cum_dE,cum_dVar,"
                    "Mx,Mz,exact_Mx,exact_Mz\n",
                    0) == 0);
    const auto back = trace_from_csv(csv);
    REQUIRE(back.steps.size() == 2);
    CHECK(back.steps[0].dt == r.dt);
    CHECK(back.steps[0].E_i == r.E_i);
    CHECK(back.steps[0].frozen);
    CHECK(back.steps[0].exact_Mz == -0.25);
    CHECK_FALSE(back.steps[1].exact_Mx.has_value());
    CHECK(trace_to_csv(back) == csv);

    CHECK_THROWS(trace_from_csv("m,t\n0,0\n"));
}

TEST_CASE("runner: trace artifacts, sidecar re-run and determinism") {
    const auto dir = scratch("trace");
    const auto cfg = with_out(small_adaptive(), dir / "a");
    const auto res = dispatch_guarded(cfg);
    REQUIRE(res.exit_code == kExitOk);
    const auto csv = read_text_file(dir / "a" / "trace.csv");
    const auto meta = json::parse(read_text_file(dir / "a" / "trace.json"));
    CHECK(meta["run_info"]["steps"] == 12);
    CHECK(meta["run_info"]["has_exact"] == true);
    CHECK(meta["run_info"]["control"]["trial_bound"] == cfg.control.policy.trial_bound());
    CHECK(meta["config"]["control"]["d_E"] == "inf");

    const auto log = trace_from_csv(csv);
    REQUIRE(log.steps.size() == 12);
    for (const auto &s : log.steps) {
        CHECK(s.exact_Mx.has_value());
        CHECK(std::abs(s.cum_dE) < 0.01 + (s.frozen ? 1.0 : 0.0));
    }

    // The sidecar is itself a config; re-running it reproduces the body.
    auto replay = config_from_json(meta);
    replay.run.out = (dir / "b").string();
    REQUIRE(dispatch_guarded(replay).exit_code == kExitOk);
    CHECK(read_text_file(dir / "b" / "trace.csv") == csv);
}

TEST_CASE("runner: checkpoint holds the final state") {
    const auto dir = scratch("ckpt");
    json doc = small_adaptive();
    doc["run"]["oracle"] = false;
    doc["run"]["checkpoint"] = (dir / "state.bin").string();
    const auto cfg = with_out(doc, dir / "run");
    REQUIRE(dispatch_guarded(cfg).exit_code == kExitOk);
    const auto st = read_state(dir / "state.bin");
    CHECK(st.num_sites() == 4);
    CHECK(std::abs(st.norm() - 1.0) < 1e-12);
}

TEST_CASE("runner: exit codes and error.json") {
    const auto dir = scratch("errors");
    json doc = small_adaptive();
    doc["run"]["oracle"] = false;

    SUBCASE("freeze halt") {
        doc["control"] = {{"d_E", 1e-12}, {"d_var", 1e-12}, {"dt_min", 0.1},
                          {"dt_max", 0.5}, {"on_freeze", "halt"}};
        const auto res = dispatch_guarded(with_out(doc, dir / "halt"));
        CHECK(res.exit_code == kExitFreezeHalt);
        const auto err = json::parse(read_text_file(dir / "halt" / "error.json"));
        CHECK(err["kind"] == "freeze_halt");
        const auto meta = json::parse(read_text_file(dir / "halt" / "trace.json"));
        CHECK(meta["run_info"]["halted_on_freeze"] == true);
        CHECK(meta["run_info"]["steps"] == 0);
    }
    SUBCASE("config error inside the body") {
        const auto res = run_guarded(dir / "cfg", [] () -> DispatchResult {
            throw ConfigError("run.dt: must be positive");
        });
        CHECK(res.exit_code == kExitConfigError);
        CHECK(json::parse(read_text_file(dir / "cfg" / "error.json"))["kind"] == "config");
    }
    SUBCASE("numerical error") {
        const auto res = run_guarded(dir / "num", [] () -> DispatchResult {
            throw BranchError("log near branch cut");
        });
        CHECK(res.exit_code == kExitNumericalError);
        CHECK(json::parse(read_text_file(dir / "num" / "error.json"))["kind"] ==
              "numerical");
    }
    SUBCASE("anything else") {
        const auto res = run_guarded(dir / "other", [] () -> DispatchResult {
            throw std::runtime_error("disk full");
        });
        CHECK(res.exit_code == kExitFailure);
    }
}

TEST_CASE("runner: scaling-study and magnus-check artifacts") {
    const auto dir = scratch("study");
    auto cfg = parse_config(fs::path(ADATROTTER_CONFIG_DIR) / "sm_scaling.json");
    cfg.run.out = (dir / "scaling").string();
    cfg.run.dt_grid = {0.05, 0.1};
    cfg.run.k_list = {1, 3};
    REQUIRE(dispatch_guarded(cfg).exit_code == kExitOk);
    const auto rows = read_text_file(dir / "scaling" / "scaling.csv");
    CHECK(rows.rfind("dt,k,abs_dE,abs_dVar,abs_delta,abs_delta_var,truncation_norm\n", 0) == 0);
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 5);
    const auto slopes = read_text_file(dir / "scaling" / "slopes.csv");
    CHECK(std::count(slopes.begin(), slopes.end(), '\n') == 3);

    auto mc = parse_config(fs::path(ADATROTTER_CONFIG_DIR) / "magnus_check.json");
    mc.run.out = (dir / "magnus").string();
    mc.run.dt_grid = {0.05, 0.1};
    const auto res = dispatch_guarded(mc);
    REQUIRE(res.exit_code == kExitOk);
    for (int k : mc.run.k_list) {
        const auto text =
            read_text_file(dir / "magnus" / ("hamiltonian_k" + std::to_string(k) + ".txt"));
        CHECK_NOTHROW(PauliOperator::from_text(text));
    }
    const auto trunc = read_text_file(dir / "magnus" / "truncation.csv");
    CHECK(trunc.rfind("dt,k,norm\n", 0) == 0);
    CHECK(std::count(trunc.begin(), trunc.end(), '\n') ==
          1 + 2 * static_cast<long>(mc.run.k_list.size()));
}

TEST_CASE("sweep: ordered results, distinct outputs") {
    const auto dir = scratch("sweep");
    json doc = small_adaptive();
    doc["run"]["oracle"] = false;
    std::vector<RunConfig> cfgs;
    for (int i = 0; i < 3; ++i) {
        doc["control"]["dg_E"] = 0.01 * (i + 1);
        cfgs.push_back(with_out(doc, dir / std::to_string(i)));
    }
    const auto serial = sweep(cfgs, 1);
    std::vector<std::string> bodies;
    for (int i = 0; i < 3; ++i) {
        CHECK(serial[i].exit_code == kExitOk);
        bodies.push_back(read_text_file(dir / std::to_string(i) / "trace.csv"));
    }
    const auto threaded = sweep(cfgs, 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(threaded[i].exit_code == kExitOk);
        CHECK(read_text_file(dir / std::to_string(i) / "trace.csv") == bodies[i]);
    }
    cfgs[2].run.out = cfgs[0].run.out;
    CHECK_THROWS_AS(sweep(cfgs, 1), ConfigError);
}
