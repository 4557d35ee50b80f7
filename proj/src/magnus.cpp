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

#include "adatrotter/magnus.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "adatrotter/dense.hpp"
#include "adatrotter/errors.hpp"

namespace adatrotter {

bool is_supported_truncation(int k) { return k == 1 || k == 3 || k == 5; }

MagnusTerms build_magnus_terms(const HamiltonianSpec &spec,
                               const StaticOperators &ops, double t, double dt,
                               int k) {
    if (!is_supported_truncation(k)) {
        throw std::invalid_argument("truncation order k must be 1, 3 or 5, got " +
                                    std::to_string(k));
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("window length dt must be positive");
    }
    const int L = spec.num_sites;
    MagnusTerms terms{build_A(spec, ops, t, dt, 1), PauliOperator(L),
                      PauliOperator(L)};
    if (k == 1) {
        return terms;
    }
    const auto &A1 = terms.omega1;
    const auto A2 = build_A(spec, ops, t, dt, 2);
    const auto A1A2 = commutator(A1, A2);
    terms.omega3 = Complex(-1.0 / 6.0) * A1A2;
    if (k == 3) {
        return terms;
    }
    const auto A3 = build_A(spec, ops, t, dt, 3);
    terms.omega5 = Complex(1.0 / 60.0) * commutator(A1, commutator(A1, A3)) -
                   Complex(1.0 / 60.0) * commutator(A2, A1A2) +
                   Complex(1.0 / 360.0) * commutator(A1, commutator(A1, A1A2)) -
                   Complex(1.0 / 30.0) * commutator(A2, A3);
    return terms;
}

PiecewiseHamiltonian build_piecewise_hamiltonian(const HamiltonianSpec &spec,
                                                 const StaticOperators &ops,
                                                 double t, double dt, int k) {
    const auto terms = build_magnus_terms(spec, ops, t, dt, k);
    PauliOperator sum = terms.omega1 + terms.omega3 + terms.omega5;
    sum *= Complex(0.0, 1.0 / dt);
    if (!sum.is_hermitian(1e-12 * std::max(1.0, sum.one_norm()))) {
        throw NumericalError("piecewise Hamiltonian lost hermiticity");
    }
    // Hermitian strings carry real coefficients; drop rounding residue.
    PauliOperator op(spec.num_sites);
    for (const auto &[key, c] : sum.terms()) {
        op.add_term(key, c.real());
    }
    return {t, dt, k, std::move(op)};
}

PiecewiseHamiltonian build_piecewise_hamiltonian(const HamiltonianSpec &spec,
                                                 double t, double dt, int k) {
    return build_piecewise_hamiltonian(spec, build_static_operators(spec), t,
                                       dt, k);
}

MagnusCache::MagnusCache(HamiltonianSpec spec)
    : spec_(std::move(spec)), ops_(build_static_operators(spec_)) {}

const PiecewiseHamiltonian &MagnusCache::get(double t, double dt, int k) {
    const auto key = std::make_tuple(t, dt, k);
    if (auto it = cache_.find(key); it != cache_.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    auto [it, inserted] = cache_.emplace(
        key, build_piecewise_hamiltonian(spec_, ops_, t, dt, k));
    return it->second;
}

Eigen::MatrixXcd dense_h_infinity(const HamiltonianSpec &spec, double t,
                                  double dt) {
    if (spec.num_sites > dense::kMaxOracleSites) {
        throw DimensionError("dense_h_infinity limited to L <= 8");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dense_h_infinity requires dt > 0");
    }
    // Eigenphases of U come back wrapped into (-pi, pi], so the phase test
    // alone cannot see a generator whose spectrum already crossed the cut.
    // Bound the generator's spectral radius by max_s ||H(s)|| over the window.
    const auto ops = build_static_operators(spec);
    constexpr int kSamples = 9;
    double radius = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double s = t + dt * i / (kSamples - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
            dense::hamiltonian_matrix(spec, ops, s), Eigen::EigenvaluesOnly);
        radius = std::max(radius, eig.eigenvalues().cwiseAbs().maxCoeff());
    }
    if (radius * dt >= kMaxPropagatorPhase) {
        throw BranchError("window generator spectrum reaches the log branch cut "
                          "(||H|| dt = " + std::to_string(radius * dt) +
                          "); shrink dt");
    }
    const Eigen::MatrixXcd U = dense::propagator(spec, t, t + dt);
    return dense::hermitian_generator(U, dt, kMaxPropagatorPhase);
}

double truncation_error_norm(const HamiltonianSpec &spec, double t, double dt,
                             int k) {
    const Eigen::MatrixXcd h_inf = dense_h_infinity(spec, t, dt);
    const auto h_k = build_piecewise_hamiltonian(spec, t, dt, k);
    return dense::operator_norm(h_inf - to_dense(h_k.op, dense::kMaxOracleSites));
}

} // namespace adatrotter
