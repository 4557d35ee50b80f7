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

#include <map>
#include <memory>
#include <tuple>

#include <Eigen/Dense>

#include "adatrotter/hamiltonian.hpp"
#include "adatrotter/pauli.hpp"

namespace adatrotter {

/// Hermitian generator of one window [t, t + dt], truncated at Magnus
/// order k. For constant drives it is exactly g G + f F.
struct PiecewiseHamiltonian {
    double t = 0.0;
    double dt = 0.0;
    int k = 5;
    PauliOperator op;
};

bool is_supported_truncation(int k);

/// The odd Magnus terms Omega_1, Omega_3, Omega_5 of one window, built from
/// the Legendre moment operators A_1..A_3. Even orders vanish.
struct MagnusTerms {
    PauliOperator omega1;
    PauliOperator omega3;
    PauliOperator omega5;
};

MagnusTerms build_magnus_terms(const HamiltonianSpec &spec,
                               const StaticOperators &ops, double t, double dt,
                               int k);

/// H_[k] = (i / dt) * sum_{n <= k} Omega_n.
PiecewiseHamiltonian build_piecewise_hamiltonian(const HamiltonianSpec &spec,
                                                 const StaticOperators &ops,
                                                 double t, double dt, int k);
PiecewiseHamiltonian build_piecewise_hamiltonian(const HamiltonianSpec &spec,
                                                 double t, double dt, int k);

/// Per-run memo of H_[k] keyed on the exact (t, dt, k) triple. Not shared
/// between threads.
class MagnusCache {
  public:
    explicit MagnusCache(HamiltonianSpec spec);

    const HamiltonianSpec &spec() const { return spec_; }
    const StaticOperators &static_operators() const { return ops_; }

    const PiecewiseHamiltonian &get(double t, double dt, int k);

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    void clear() { cache_.clear(); }

  private:
    HamiltonianSpec spec_;
    StaticOperators ops_;
    std::map<std::tuple<double, double, int>, PiecewiseHamiltonian> cache_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

/// Principal-log branch guard: eigenphases of the window propagator must
/// stay below pi - 0.1 in magnitude.
inline constexpr double kMaxPropagatorPhase = 3.141592653589793 - 0.1;

/// i log(U(t + dt, t)) / dt from the dense exact propagator (L <= 8).
Eigen::MatrixXcd dense_h_infinity(const HamiltonianSpec &spec, double t,
                                  double dt);

/// ||H_[inf] - H_[k]||_2 (L <= 8).
double truncation_error_norm(const HamiltonianSpec &spec, double t, double dt,
                             int k);

} // namespace adatrotter
