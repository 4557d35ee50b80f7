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

#include "adatrotter/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adatrotter/dense.hpp"
#include "adatrotter/errors.hpp"
#include "adatrotter/fit.hpp"

namespace adatrotter {

namespace {

bool positive_or_disabled(double v) { return v > 0.0 && !std::isnan(v); }

// Relative slack when comparing the running time with t_final.
constexpr double kTimeSlack = 1e-12;

} // namespace

ToleranceSet ToleranceSet::local(double d_E, double d_var) {
    ToleranceSet t;
    t.d_E = d_E;
    t.d_var = d_var;
    return t;
}

ToleranceSet ToleranceSet::global(double dg_E, double dg_var) {
    ToleranceSet t;
    t.dg_E = dg_E;
    t.dg_var = dg_var;
    return t;
}

void ToleranceSet::validate() const {
    for (double v : {d_E, d_var, dg_E, dg_var}) {
        if (!positive_or_disabled(v)) {
            throw std::invalid_argument("tolerances must be > 0 (or infinite)");
        }
    }
}

void StepPolicy::validate() const {
    if (!(dt_min > 0.0) || !(dt_max >= dt_min) || !std::isfinite(dt_max)) {
        throw std::invalid_argument("step policy requires 0 < dt_min <= dt_max");
    }
    if (!(bisect_eps > 0.0)) {
        throw std::invalid_argument("bisect_eps must be > 0");
    }
    if (max_trials < 1) {
        throw std::invalid_argument("max_trials must be >= 1");
    }
    if (!is_supported_truncation(k)) {
        throw std::invalid_argument("k must be 1, 3 or 5");
    }
    if (lambda != kTrotterOrder) {
        throw std::invalid_argument("only the midpoint splitting (lambda = 3) "
                                    "is implemented");
    }
}

int StepPolicy::trial_bound() const {
    const double width = dt_max - dt_min;
    if (!(width > 0.0)) {
        return 1;
    }
    const int probes =
        std::max(1, static_cast<int>(std::ceil(std::log2(width / bisect_eps))));
    return probes + 1;
}

CandidateEvaluation evaluate_candidate(const StateVector &state,
                                       MagnusCache &cache,
                                       const TrotterStepper &stepper, double t,
                                       double dt, int k) {
    const PauliOperator &H = cache.get(t, dt, k).op;
    const double L = state.num_sites();
    CandidateEvaluation c;
    c.dt = dt;
    const auto before = moments(H, state);
    c.E_i = before.mean / L;
    c.var_i = before.second / L - L * c.E_i * c.E_i;
    c.candidate = state;
    stepper.step(c.candidate, t, dt);
    const auto after = moments(H, c.candidate);
    c.E_f = after.mean / L;
    c.var_f = after.second / L - L * c.E_f * c.E_f;
    return c;
}

CandidateEvaluation evaluate_candidate(const StateVector &state,
                                       const HamiltonianSpec &spec, double t,
                                       double dt, int k) {
    MagnusCache cache(spec);
    const TrotterStepper stepper(spec);
    return evaluate_candidate(state, cache, stepper, t, dt, k);
}

bool constraints_ok(double E_i, double var_i, double E_f, double var_f,
                    const GlobalAccumulator &acc, const ToleranceSet &tol) {
    const double dE = E_f - E_i;
    const double dVar = var_f - var_i;
    return std::abs(dE) < tol.d_E && std::abs(dVar) < tol.d_var &&
           std::abs(acc.sum_dE + dE) < tol.dg_E &&
           std::abs(acc.sum_dVar + dVar) < tol.dg_var;
}

bool constraints_ok(const CandidateEvaluation &c, const GlobalAccumulator &acc,
                    const ToleranceSet &tol) {
    return constraints_ok(c.E_i, c.var_i, c.E_f, c.var_f, acc, tol);
}

StepSelection select_step(const StateVector &state, double t,
                          GlobalAccumulator &acc, const ToleranceSet &tol,
                          const StepPolicy &policy, MagnusCache &cache,
                          const TrotterStepper &stepper) {
    StepSelection sel;
    int trials = 0;
    auto evaluate = [&](double dt) {
        ++trials;
        sel.probes.push_back(dt);
        return evaluate_candidate(state, cache, stepper, t, dt, policy.k);
    };

    std::optional<CandidateEvaluation> accepted;
    bool frozen = false;

    auto first = evaluate(policy.dt_max);
    if (constraints_ok(first, acc, tol)) {
        accepted = std::move(first);
    } else if (policy.dt_max <= policy.dt_min) {
        accepted = std::move(first);
        frozen = true;
    } else {
        // Bisection on [dt_min, hi]. `best` is the largest passing probe;
        // with no pass yet the lower end is dt_min itself. The last allowed
        // probe is spent on dt_min when nothing has passed, which keeps the
        // trial count within trial_bound().
        const int max_probes = policy.trial_bound() - 1;
        double hi = policy.dt_max;
        std::optional<CandidateEvaluation> best;
        std::optional<CandidateEvaluation> at_min;
        bool probed_min = false;
        int probes = 0;
        while (probes < max_probes && trials < policy.max_trials) {
            const double lo = best ? best->dt : policy.dt_min;
            if (hi - lo <= policy.bisect_eps) {
                break;
            }
            double dt = 0.5 * (lo + hi);
            if (!best && probes + 1 == max_probes) {
                dt = policy.dt_min;
                probed_min = true;
            }
            auto c = evaluate(dt);
            ++probes;
            if (constraints_ok(c, acc, tol)) {
                best = std::move(c);
            } else {
                hi = dt;
                if (probed_min) {
                    at_min = std::move(c);
                }
            }
            if (probed_min) {
                break;
            }
        }
        if (best) {
            accepted = std::move(best);
        } else {
            if (!at_min) {
                at_min = evaluate(policy.dt_min);
            }
            frozen = !constraints_ok(*at_min, acc, tol);
            accepted = std::move(at_min);
        }
    }

    acc.sum_dE += accepted->dE();
    acc.sum_dVar += accepted->dVar();

    auto &r = sel.record;
    r.t = t;
    r.dt = accepted->dt;
    r.trials = trials;
    r.frozen = frozen;
    r.E_i = accepted->E_i;
    r.E_f = accepted->E_f;
    r.var_i = accepted->var_i;
    r.var_f = accepted->var_f;
    r.cum_dE = acc.sum_dE;
    r.cum_dVar = acc.sum_dVar;
    sel.next_state = std::move(accepted->candidate);
    r.Mx = magnetization(sel.next_state, Axis::x);
    r.Mz = magnetization(sel.next_state, Axis::z);
    return sel;
}

void StopCondition::validate() const {
    if (!t_final && !max_steps) {
        throw std::invalid_argument("run needs t_final or N_steps");
    }
    if (t_final && !(*t_final > 0.0)) {
        throw std::invalid_argument("t_final must be > 0");
    }
    if (max_steps && *max_steps < 1) {
        throw std::invalid_argument("N_steps must be >= 1");
    }
}

double TraceLog::final_time() const {
    return steps.empty() ? 0.0 : steps.back().t + steps.back().dt;
}

double TraceLog::mean_trials() const {
    if (steps.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (const auto &r : steps) {
        s += r.trials;
    }
    return s / static_cast<double>(steps.size());
}

int TraceLog::max_trials() const {
    int m = 0;
    for (const auto &r : steps) {
        m = std::max(m, r.trials);
    }
    return m;
}

int TraceLog::frozen_steps() const {
    return static_cast<int>(
        std::count_if(steps.begin(), steps.end(),
                      [](const StepRecord &r) { return r.frozen; }));
}

namespace {

void co_evolve(TraceLog &log, StepRecord &r, const HamiltonianSpec &spec,
               const OracleOptions &oracle) {
    if (!oracle.enabled) {
        return;
    }
    auto &phi = *log.final_exact_state;
    phi = exact_evolve(phi, spec, r.t, r.t + r.dt, oracle.exact);
    r.exact_Mx = magnetization(phi, Axis::x);
    r.exact_Mz = magnetization(phi, Axis::z);
}

void start_log(TraceLog &log, const HamiltonianSpec &spec, double theta,
               const OracleOptions &oracle) {
    log.final_state = prepare_initial(spec.num_sites, theta);
    log.has_exact = oracle.enabled;
    if (oracle.enabled) {
        log.final_exact_state = log.final_state;
    }
}

} // namespace

TraceLog run_adaptive(const HamiltonianSpec &spec, double theta,
                      const ToleranceSet &tol, const StepPolicy &policy,
                      const StopCondition &stop, const OracleOptions &oracle) {
    spec.validate();
    tol.validate();
    policy.validate();
    stop.validate();

    MagnusCache cache(spec);
    const TrotterStepper stepper(spec);
    TraceLog log;
    start_log(log, spec, theta, oracle);
    GlobalAccumulator acc;
    double t = 0.0;

    for (int m = 0;; ++m) {
        if (stop.max_steps && m >= *stop.max_steps) {
            break;
        }
        StepPolicy step_policy = policy;
        if (stop.t_final) {
            const double remaining = *stop.t_final - t;
            if (remaining <= kTimeSlack * std::max(1.0, *stop.t_final)) {
                break;
            }
            // The final window may be shorter than dt_min.
            step_policy.dt_max = std::min(policy.dt_max, remaining);
            step_policy.dt_min = std::min(policy.dt_min, step_policy.dt_max);
        }
        cache.clear();
        GlobalAccumulator trial_acc = acc;
        auto sel = select_step(log.final_state, t, trial_acc, tol, step_policy,
                               cache, stepper);
        if (sel.record.frozen && policy.on_freeze == FreezeAction::halt) {
            log.halted_on_freeze = true;
            break;
        }
        acc = trial_acc;
        sel.record.index = m;
        log.final_state = std::move(sel.next_state);
        log.max_norm_drift =
            std::max(log.max_norm_drift, log.final_state.norm_drift());
        co_evolve(log, sel.record, spec, oracle);
        t = sel.record.t + sel.record.dt;
        log.steps.push_back(sel.record);
    }
    return log;
}

TraceLog run_fixed(const HamiltonianSpec &spec, double theta, double dt,
                   int steps, const OracleOptions &oracle, int k) {
    spec.validate();
    if (!(dt > 0.0) || steps < 1) {
        throw std::invalid_argument("run_fixed requires dt > 0 and N >= 1");
    }
    MagnusCache cache(spec);
    const TrotterStepper stepper(spec);
    TraceLog log;
    start_log(log, spec, theta, oracle);
    GlobalAccumulator acc;
    for (int m = 0; m < steps; ++m) {
        const double t = m * dt;
        cache.clear();
        auto c = evaluate_candidate(log.final_state, cache, stepper, t, dt, k);
        acc.sum_dE += c.dE();
        acc.sum_dVar += c.dVar();
        StepRecord r;
        r.index = m;
        r.t = t;
        r.dt = dt;
        r.trials = 1;
        r.E_i = c.E_i;
        r.E_f = c.E_f;
        r.var_i = c.var_i;
        r.var_f = c.var_f;
        r.cum_dE = acc.sum_dE;
        r.cum_dVar = acc.sum_dVar;
        log.final_state = std::move(c.candidate);
        log.max_norm_drift =
            std::max(log.max_norm_drift, log.final_state.norm_drift());
        r.Mx = magnetization(log.final_state, Axis::x);
        r.Mz = magnetization(log.final_state, Axis::z);
        co_evolve(log, r, spec, oracle);
        log.steps.push_back(r);
    }
    return log;
}

TraceLog run_exact(const HamiltonianSpec &spec, double theta, double dt,
                   int steps, int k, const ExactOptions &exact) {
    spec.validate();
    if (!(dt > 0.0) || steps < 1) {
        throw std::invalid_argument("run_exact requires dt > 0 and N >= 1");
    }
    MagnusCache cache(spec);
    TraceLog log;
    log.has_exact = true;
    log.final_state = prepare_initial(spec.num_sites, theta);
    GlobalAccumulator acc;
    const double L = spec.num_sites;
    for (int m = 0; m < steps; ++m) {
        const double t = m * dt;
        cache.clear();
        const auto &H = cache.get(t, dt, k).op;
        const auto before = moments(H, log.final_state);
        log.final_state = exact_evolve(log.final_state, spec, t, t + dt, exact);
        const auto after = moments(H, log.final_state);
        StepRecord r;
        r.index = m;
        r.t = t;
        r.dt = dt;
        r.trials = 1;
        r.E_i = before.mean / L;
        r.var_i = before.second / L - L * r.E_i * r.E_i;
        r.E_f = after.mean / L;
        r.var_f = after.second / L - L * r.E_f * r.E_f;
        acc.sum_dE += r.E_f - r.E_i;
        acc.sum_dVar += r.var_f - r.var_i;
        r.cum_dE = acc.sum_dE;
        r.cum_dVar = acc.sum_dVar;
        r.Mx = magnetization(log.final_state, Axis::x);
        r.Mz = magnetization(log.final_state, Axis::z);
        r.exact_Mx = r.Mx;
        r.exact_Mz = r.Mz;
        log.max_norm_drift =
            std::max(log.max_norm_drift, log.final_state.norm_drift());
        log.steps.push_back(r);
    }
    log.final_exact_state = log.final_state;
    return log;
}

ScalingTable scaling_study(const HamiltonianSpec &spec, double theta, double t,
                           const std::vector<double> &dt_grid,
                           const std::vector<int> &k_list) {
    spec.validate();
    if (spec.num_sites > dense::kMaxOracleSites) {
        throw DimensionError("scaling_study uses the dense oracle (L <= 8)");
    }
    for (int k : k_list) {
        if (!is_supported_truncation(k)) {
            throw std::invalid_argument("k must be 1, 3 or 5");
        }
    }
    const auto psi = prepare_initial(spec.num_sites, theta);
    const Eigen::VectorXcd v_i = psi.to_eigen();
    const double L = spec.num_sites;
    const auto ops = build_static_operators(spec);
    const TrotterStepper stepper(spec);
    ScalingTable table;

    auto dense_moments = [&](const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v) {
        const Eigen::VectorXcd Hv = H * v;
        const double mean = v.dot(Hv).real() / L;
        return std::pair{mean, Hv.squaredNorm() / L - L * mean * mean};
    };

    for (double dt : dt_grid) {
        Eigen::MatrixXcd h_inf;
        try {
            h_inf = dense_h_infinity(spec, t, dt);
        } catch (const BranchError &) {
            table.trimmed.push_back(dt);
            continue;
        }
        StateVector psi_f = psi;
        stepper.step(psi_f, t, dt);
        const Eigen::VectorXcd v_f = psi_f.to_eigen();
        const auto [Ei_inf, Vi_inf] = dense_moments(h_inf, v_i);
        const auto [Ef_inf, Vf_inf] = dense_moments(h_inf, v_f);
        for (int k : k_list) {
            const auto hk = build_piecewise_hamiltonian(spec, ops, t, dt, k);
            const auto before = moments(hk.op, psi);
            const auto after = moments(hk.op, psi_f);
            const double Ei = before.mean / L;
            const double Ef = after.mean / L;
            const double Vi = before.second / L - L * Ei * Ei;
            const double Vf = after.second / L - L * Ef * Ef;
            ScalingRow row;
            row.dt = dt;
            row.k = k;
            row.abs_dE = std::abs(Ef - Ei);
            row.abs_dVar = std::abs(Vf - Vi);
            row.abs_delta = std::abs((Ef_inf - Ei_inf) - (Ef - Ei));
            row.abs_delta_var = std::abs((Vf_inf - Vi_inf) - (Vf - Vi));
            row.truncation_norm = dense::operator_norm(
                h_inf - to_dense(hk.op, dense::kMaxOracleSites));
            table.rows.push_back(row);
        }
    }

    for (int k : k_list) {
        std::vector<double> dts, dE, dVar, delta, delta_var, norm;
        for (const auto &r : table.rows) {
            if (r.k != k) {
                continue;
            }
            dts.push_back(r.dt);
            dE.push_back(r.abs_dE);
            dVar.push_back(r.abs_dVar);
            delta.push_back(r.abs_delta);
            delta_var.push_back(r.abs_delta_var);
            norm.push_back(r.truncation_norm);
        }
        ScalingSlopes s;
        s.k = k;
        s.dE = fit_loglog(dts, dE).slope;
        s.dVar = fit_loglog(dts, dVar).slope;
        s.delta = fit_loglog(dts, delta).slope;
        s.delta_var = fit_loglog(dts, delta_var).slope;
        s.truncation_norm = fit_loglog(dts, norm).slope;
        table.slopes.push_back(s);
    }
    return table;
}

} // namespace adatrotter
