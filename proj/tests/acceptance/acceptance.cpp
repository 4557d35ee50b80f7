// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Traces are left under
// ADATROTTER_ACCEPT_OUT for inspection.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"

#include "adatrotter/config.hpp"
#include "adatrotter/controller.hpp"
#include "adatrotter/magnus.hpp"
#include "adatrotter/runner.hpp"
#include "adatrotter/statevector.hpp"
#include "adatrotter/trace_io.hpp"

using namespace adatrotter;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs(ADATROTTER_CONFIG_DIR);
const fs::path kOut(ADATROTTER_ACCEPT_OUT);

struct Outcome {
    bool pass = false;
    std::string detail;
};

char buf[512];

template <class... A> std::string fmt(const char *f, A... a) {
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

RunConfig load(const std::string &name, std::vector<std::string> overrides = {}) {
    auto cfg = load_config(kConfigs / (name + ".json"), overrides);
    return cfg;
}

// Runs through the same path as the CLI and reads the trace back from disk.
TraceLog run_trace(RunConfig cfg, const std::string &out) {
    cfg.run.out = (kOut / out).string();
    const auto res = dispatch_guarded(cfg);
    if (res.exit_code != kExitOk) {
        throw std::runtime_error(out + ": exit " + std::to_string(res.exit_code) + " " +
                                 res.message);
    }
    return trace_from_csv(read_text_file(kOut / out / "trace.csv"));
}

double max_norm_drift(const std::string &out) {
    const auto meta = nlohmann::json::parse(read_text_file(kOut / out / "trace.json"));
    return meta["run_info"]["max_norm_drift"].get<double>();
}

std::string csv_body(const std::string &out) {
    const auto text = read_text_file(kOut / out / "trace.csv");
    return text.substr(text.find('\n') + 1);
}

HamiltonianSpec with_sites(HamiltonianSpec s, int L) {
    s.num_sites = L;
    return s;
}

// 1. Constant drives reduce H_[k] to g G + f F.
Outcome static_reduction() {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        HamiltonianSpec s;
        s.num_sites = 2 + trial % 7;
        s.J_z = u(rng);
        s.h_x = u(rng);
        s.h_z = u(rng);
        const double gv = u(rng);
        const double fv = u(rng);
        s.g = DriveSchedule::constant(gv);
        s.f = DriveSchedule::constant(fv);
        // Reference built term by term, not through build_static_operators.
        PauliOperator ref(s.num_sites);
        const int L = s.num_sites;
        for (int j = 0; j < L; ++j) {
            std::string x(L, 'I'), z(L, 'I');
            x[j] = 'X';
            z[j] = 'Z';
            ref.add_term(PauliTerm::from_word(x, gv * s.h_x));
            ref.add_term(PauliTerm::from_word(z, fv * s.h_z));
            if (L > 2 || j == 0) {
                std::string zz(L, 'I');
                zz[j] = 'Z';
                zz[(j + 1) % L] = 'Z';
                ref.add_term(PauliTerm::from_word(zz, fv * s.J_z));
            }
        }
        const double t = std::abs(u(rng)) * 5.0;
        const double dt = 0.01 + std::abs(u(rng)) * 0.4;
        for (int k : {1, 3, 5}) {
            const auto h = build_piecewise_hamiltonian(s, t, dt, k);
            worst = std::max(worst, h.op.max_coefficient_distance(ref));
        }
    }
    return {worst <= 1e-12, fmt("max coefficient deviation %.3e (limit 1e-12)", worst)};
}

// 2. Per-step |E_f - E_i| ~ dt^3 with fig4 couplings at L = 8.
Outcome trotter_order_scaling() {
    const auto cfg = load("fig4_adaptive");
    const auto spec = with_sites(cfg.model, 8);
    const auto psi = prepare_initial(8, cfg.theta);
    const auto grid = oracle::geomspace(0.02, 0.3, 10);
    std::vector<double> err;
    for (double dt : grid) {
        err.push_back(std::abs(evaluate_candidate(psi, spec, 0.0, dt, 5).dE()));
    }
    const double slope = oracle::loglog_slope(grid, err);
    // Asymptotic regime, reported alongside.
    const auto small = oracle::geomspace(0.002, 0.02, 6);
    std::vector<double> err_small;
    for (double dt : small) {
        err_small.push_back(std::abs(evaluate_candidate(psi, spec, 0.0, dt, 5).dE()));
    }
    const double slope_small = oracle::loglog_slope(small, err_small);
    return {std::abs(slope - 3.0) <= 0.2,
            fmt("slope %.3f on dt in [0.02, 0.3] (want 3.0 +- 0.2); "
                "slope %.3f on [0.002, 0.02]",
                slope, slope_small)};
}

// 3. Truncation norm and Delta slopes at L = 4.
Outcome truncation_scaling() {
    const auto cfg = load("sm_scaling");
    const auto grid = oracle::geomspace(0.02, 0.2, 8);
    const auto table = scaling_study(cfg.model, cfg.theta, cfg.run.t, grid, {1, 3, 5});
    bool ok = table.trimmed.empty();
    std::string detail;
    for (int k : {1, 3, 5}) {
        std::vector<double> dts, norm, delta;
        for (const auto &r : table.rows) {
            if (r.k == k) {
                dts.push_back(r.dt);
                norm.push_back(r.truncation_norm);
                delta.push_back(r.abs_delta);
            }
        }
        const double s_norm = oracle::loglog_slope(dts, norm);
        const double s_delta = oracle::loglog_slope(dts, delta);
        const bool k_ok = s_norm >= k - 0.3 && std::abs(s_delta - (k + 1)) <= 0.4;
        ok = ok && k_ok;
        detail += fmt("k=%d norm slope %.2f (>= %.1f), Delta slope %.2f (want %d +- 0.4); ",
                      k, s_norm, k - 0.3, s_delta, k + 1);
    }
    return {ok, detail};
}

// 4. Exact evolution keeps <H_inf> and <H_inf^2> fixed across each window.
Outcome piecewise_conservation() {
    const auto cfg = load("fig4_adaptive");
    const auto spec = with_sites(cfg.model, 6);
    auto psi = prepare_initial(6, cfg.theta);
    ExactOptions opts;
    opts.tolerance = 1e-12;
    double worst_mean = 0.0;
    double worst_second = 0.0;
    double t = 0.0;
    for (double dt : {0.02, 0.05, 0.075, 0.04, 0.06, 0.03}) {
        const auto H = dense_h_infinity(spec, t, dt);
        const Eigen::MatrixXcd H2 = H * H;
        const auto next = exact_evolve(psi, spec, t, t + dt, opts);
        const auto a = psi.to_eigen();
        const auto b = next.to_eigen();
        worst_mean = std::max(
            worst_mean, std::abs((a.adjoint() * H * a)(0) - (b.adjoint() * H * b)(0)));
        worst_second = std::max(
            worst_second, std::abs((a.adjoint() * H2 * a)(0) - (b.adjoint() * H2 * b)(0)));
        psi = next;
        t += dt;
    }
    return {worst_mean < 1e-8 && worst_second < 1e-8,
            fmt("max |change| mean %.3e, second moment %.3e (limit 1e-8)", worst_mean,
                worst_second)};
}

// 5. Local-only control drifts, global-only control does not.
Outcome fig2_drift() {
    const auto local = run_trace(load("fig2_local", {"run.oracle=off"}), "fig2_local");
    const auto global = run_trace(load("fig2_global", {"run.oracle=off"}), "fig2_global");
    const double local_end = local.steps.back().cum_dE;
    double local_max = 0.0;
    for (const auto &s : local.steps) {
        local_max = std::max(local_max, std::abs(s.cum_dE));
    }
    double global_nonfrozen = 0.0;
    int frozen = 0;
    for (const auto &s : global.steps) {
        if (s.frozen) {
            ++frozen;
        } else {
            global_nonfrozen = std::max(global_nonfrozen, std::abs(s.cum_dE));
        }
    }
    const double global_end = std::abs(global.steps.back().cum_dE);
    const bool a = local.steps.size() == 200 && std::abs(local_end) > 0.03;
    const bool b = global_nonfrozen < 0.01 && global_end < 0.01;
    return {a && b,
            fmt("(a) local %zu steps, final cum_dE %.4f, max |cum_dE| %.4f (want final "
                "> 0.03) %s; (b) global max non-frozen |cum_dE| %.4f, final %.4f, "
                "%d frozen (want < 0.01) %s",
                local.steps.size(), local_end, local_max, a ? "ok" : "MISS",
                global_nonfrozen, global_end, frozen, b ? "ok" : "MISS")};
}

// 6. Adaptive beats the fixed dt = 0.2 baseline on Mx error.
Outcome fig4_accuracy() {
    const auto adaptive = run_trace(load("fig4_adaptive"), "fig4_adaptive");
    const auto fixed = run_trace(load("fig4_fixed"), "fig4_fixed");
    const double horizon =
        std::min(adaptive.final_time(), fixed.final_time()) + 1e-9;
    auto max_err = [&](const TraceLog &log) {
        double m = 0.0;
        for (const auto &s : log.steps) {
            if (s.t + s.dt <= horizon) {
                m = std::max(m, std::abs(s.Mx - *s.exact_Mx));
            }
        }
        return m;
    };
    const double ea = max_err(adaptive);
    const double ef = max_err(fixed);
    double lo = 1e300, hi = 0.0;
    for (const auto &s : adaptive.steps) {
        lo = std::min(lo, s.dt);
        hi = std::max(hi, s.dt);
    }
    const bool in_range = lo >= 0.1 - 1e-12 && hi <= 0.7 + 1e-12;
    const bool ok = adaptive.steps.size() == 100 && ea < ef && hi / lo >= 3.0 && in_range;
    return {ok, fmt("max |Mx - exact| adaptive %.4f vs fixed %.4f over t <= %.2f "
                    "(adaptive reaches %.2f, fixed %.2f); dt in [%.4f, %.4f], span %.2f "
                    "(want >= 3)",
                    ea, ef, horizon, adaptive.final_time(), fixed.final_time(), lo, hi,
                    hi / lo)};
}

std::map<int, TraceLog> sm_runs;

const TraceLog &sm_run(int k) {
    auto it = sm_runs.find(k);
    if (it == sm_runs.end()) {
        it = sm_runs
                 .emplace(k, run_trace(load("sm_k135", {"control.k=" + std::to_string(k),
                                                        "run.oracle=off"}),
                                       "sm_k" + std::to_string(k)))
                 .first;
    }
    return it->second;
}

// 7. Trial budget.
Outcome trial_budget() {
    const auto cfg = load("sm_k135");
    const auto &p = cfg.control.policy;
    const int bound =
        static_cast<int>(std::ceil(std::log2((p.dt_max - p.dt_min) / p.bisect_eps))) + 1;
    bool ok = true;
    std::string detail;
    for (int k : {1, 3, 5}) {
        const auto &log = sm_run(k);
        double sum = 0.0;
        int worst = 0;
        for (const auto &s : log.steps) {
            sum += s.trials;
            worst = std::max(worst, s.trials);
        }
        const double mean = sum / log.steps.size();
        ok = ok && mean <= 12.0 && worst <= bound;
        detail += fmt("k=%d mean %.2f max %d; ", k, mean, worst);
    }
    return {ok, detail + fmt("limits mean <= 12, max <= %d", bound)};
}

// 8. Norm drift over committed runs and byte-identical reruns.
Outcome unitarity_determinism() {
    double drift = 0.0;
    std::string worst_run;
    for (const auto &name : {"fig2_local", "fig2_global", "fig3", "fig4_adaptive",
                             "fig4_fixed", "fig5", "sm_k135"}) {
        const std::string out = std::string("norm_") + name;
        run_trace(load(name), out);
        const double d = max_norm_drift(out);
        if (d >= drift) {
            drift = d;
            worst_run = name;
        }
    }
    bool identical = true;
    for (const auto &name : {"fig4_adaptive", "fig2_local", "fig3"}) {
        run_trace(load(name), std::string("rerun_") + name);
        identical = identical && csv_body(std::string("norm_") + name) ==
                                     csv_body(std::string("rerun_") + name);
    }
    return {drift < 1e-9 && identical,
            fmt("max norm drift %.3e (%s, limit 1e-9); reruns byte-identical: %s", drift,
                worst_run.c_str(), identical ? "yes" : "no")};
}

// 9. k = 3 and k = 5 choose the same steps at small dt.
Outcome k_insensitivity() {
    const auto &a = sm_run(3);
    const auto &b = sm_run(5);
    const std::size_t n = std::min(a.steps.size(), b.steps.size());
    double rel = 0.0, mx = 0.0;
    std::size_t first_split = n;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::abs(a.steps[i].dt - b.steps[i].dt) / b.steps[i].dt;
        if (r >= 0.05 && first_split == n) {
            first_split = i;
        }
        rel = std::max(rel, r);
        mx = std::max(mx, std::abs(a.steps[i].Mx - b.steps[i].Mx));
    }
    return {a.steps.size() == b.steps.size() && rel < 0.05 && mx < 1e-3,
            fmt("max relative dt difference %.3f (want < 0.05), first at step %zu; "
                "max |Mx3 - Mx5| %.2e (want < 1e-3)",
                rel, first_split, mx)};
}

struct Criterion {
    int id;
    const char *name;
    double limit_s;
    std::function<Outcome()> body;
};

} // namespace

int main() {
    fs::create_directories(kOut);
    const std::vector<Criterion> criteria = {
        {1, "static reduction", 1, static_reduction},
        {2, "trotter order scaling", 60, trotter_order_scaling},
        {3, "truncation scaling", 120, truncation_scaling},
        {4, "piecewise conservation", 60, piecewise_conservation},
        {5, "local drift vs global bound", 600, fig2_drift},
        {6, "adaptive vs fixed accuracy", 1800, fig4_accuracy},
        {7, "trial budget", 600, trial_budget},
        {8, "unitarity and determinism", 300, unitarity_determinism},
        {9, "k insensitivity", 900, k_insensitivity},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < c.limit_s;
        failed += !pass;
        std::printf("ACCEPTANCE %d %s %s: %s [%.2fs, limit %.0fs]\n", c.id,
                    pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs, c.limit_s);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
