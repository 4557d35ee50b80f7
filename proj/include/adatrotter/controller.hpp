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

#include <limits>
#include <optional>
#include <vector>

#include "adatrotter/hamiltonian.hpp"
#include "adatrotter/magnus.hpp"
#include "adatrotter/statevector.hpp"

namespace adatrotter {

inline constexpr double kDisabled = std::numeric_limits<double>::infinity();

/// Thresholds on the per-site mean and variance of H_[k]. The d_* pair
/// bounds each step on its own; the dg_* pair bounds the running sums over
/// all accepted steps. +inf disables a constraint.
struct ToleranceSet {
    double d_E = kDisabled;
    double d_var = kDisabled;
    double dg_E = kDisabled;
    double dg_var = kDisabled;

    static ToleranceSet local(double d_E, double d_var);
    static ToleranceSet global(double dg_E, double dg_var);

    void validate() const;
};

enum class FreezeAction { continue_run, halt };

struct StepPolicy {
    double dt_min = 0.1;
    double dt_max = 0.7;
    double bisect_eps = 0.01;
    int max_trials = 20;
    int k = 5;
    int lambda = kTrotterOrder;
    FreezeAction on_freeze = FreezeAction::continue_run;

    void validate() const;

    /// Worst-case candidate evaluations per step:
    /// ceil(log2((dt_max - dt_min) / bisect_eps)) + 1, at least 2 when the
    /// search interval is non-degenerate.
    int trial_bound() const;
};

/// Running sums of accepted per-step changes (per site).
struct GlobalAccumulator {
    double sum_dE = 0.0;
    double sum_dVar = 0.0;
};

/// Measurements of H_[k](t, dt) before and after one trial step.
struct CandidateEvaluation {
    double dt = 0.0;
    double E_i = 0.0;
    double var_i = 0.0;
    double E_f = 0.0;
    double var_f = 0.0;
    StateVector candidate;

    double dE() const { return E_f - E_i; }
    double dVar() const { return var_f - var_i; }
};

/// Builds H_[k](t, dt), measures it on `state`, applies one midpoint step and
/// measures the same operator on the result. `state` is left untouched.
CandidateEvaluation evaluate_candidate(const StateVector &state,
                                       MagnusCache &cache,
                                       const TrotterStepper &stepper, double t,
                                       double dt, int k);
CandidateEvaluation evaluate_candidate(const StateVector &state,
                                       const HamiltonianSpec &spec, double t,
                                       double dt, int k);

bool constraints_ok(double E_i, double var_i, double E_f, double var_f,
                    const GlobalAccumulator &acc, const ToleranceSet &tol);
bool constraints_ok(const CandidateEvaluation &c, const GlobalAccumulator &acc,
                    const ToleranceSet &tol);

struct StepRecord {
    int index = 0;
    double t = 0.0;
    double dt = 0.0;
    int trials = 1;
    bool frozen = false;
    double E_i = 0.0;
    double E_f = 0.0;
    double var_i = 0.0;
    double var_f = 0.0;
    double cum_dE = 0.0;
    double cum_dVar = 0.0;
    /// Magnetizations of the state after the step, i.e. at t + dt.
    double Mx = 0.0;
    double Mz = 0.0;
    std::optional<double> exact_Mx;
    std::optional<double> exact_Mz;
};

struct StepSelection {
    StepRecord record;
    StateVector next_state;
    /// Every dt evaluated, in order.
    std::vector<double> probes;
};

/// One step of the feedback loop: try dt_max, then bisect towards dt_min
/// keeping the largest passing probe. When nothing passes, dt_min is
/// accepted with frozen = true. The accumulator is advanced by the accepted
/// step. `policy` bounds must already be clamped by the caller.
StepSelection select_step(const StateVector &state, double t,
                          GlobalAccumulator &acc, const ToleranceSet &tol,
                          const StepPolicy &policy, MagnusCache &cache,
                          const TrotterStepper &stepper);

/// Either bound may be set; the run stops at whichever comes first.
struct StopCondition {
    std::optional<double> t_final;
    std::optional<int> max_steps;

    void validate() const;
};

struct OracleOptions {
    bool enabled = false;
    ExactOptions exact;
};

struct TraceLog {
    std::vector<StepRecord> steps;
    bool has_exact = false;
    bool halted_on_freeze = false;
    double max_norm_drift = 0.0;
    StateVector final_state;
    std::optional<StateVector> final_exact_state;

    double final_time() const;
    double mean_trials() const;
    int max_trials() const;
    int frozen_steps() const;
};

TraceLog run_adaptive(const HamiltonianSpec &spec, double theta,
                      const ToleranceSet &tol, const StepPolicy &policy,
                      const StopCondition &stop, const OracleOptions &oracle);

/// Fixed-step baseline on the same trace schema. E/var columns are measured
/// with H_[k](t, dt) but never constrain the step.
TraceLog run_fixed(const HamiltonianSpec &spec, double theta, double dt,
                   int steps, const OracleOptions &oracle, int k = 5);

/// Reference-only trace on a fixed grid. Both magnetization column pairs
/// hold the reference values; E/var columns hold H_[k] moments of the
/// reference state at the window ends.
TraceLog run_exact(const HamiltonianSpec &spec, double theta, double dt,
                   int steps, int k = 5, const ExactOptions &exact = {});

struct ScalingRow {
    double dt = 0.0;
    int k = 0;
    double abs_dE = 0.0;
    double abs_dVar = 0.0;
    /// Mean and variance truncation errors Delta; NaN when the dense oracle
    /// refused the window.
    double abs_delta = 0.0;
    double abs_delta_var = 0.0;
    double truncation_norm = 0.0;
};

struct ScalingSlopes {
    int k = 0;
    double dE = 0.0;
    double dVar = 0.0;
    double delta = 0.0;
    double delta_var = 0.0;
    double truncation_norm = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    std::vector<ScalingSlopes> slopes;
    /// dt values dropped because the dense logarithm hit the branch cut.
    std::vector<double> trimmed;
};

/// Per-step errors against dt for a product state prepared with `theta` and
/// placed at time t. Uses the dense oracle, so L <= 8.
ScalingTable scaling_study(const HamiltonianSpec &spec, double theta, double t,
                           const std::vector<double> &dt_grid,
                           const std::vector<int> &k_list);

} // namespace adatrotter
