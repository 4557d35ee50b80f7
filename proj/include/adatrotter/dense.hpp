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

// Small dense linear-algebra helpers used by the exact oracles.

#pragma once

#include <Eigen/Dense>

#include "adatrotter/hamiltonian.hpp"

namespace adatrotter::dense {

/// Site cap for every dense oracle (matrix dimension 256).
inline constexpr int kMaxOracleSites = 8;

/// exp(-i H tau) for hermitian H.
Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd &H, double tau);

/// Closest unitary in Frobenius norm (polar factor).
Eigen::MatrixXcd nearest_unitary(const Eigen::MatrixXcd &M);

/// Hermitian K with U = exp(-i K tau), using the principal logarithm.
/// Throws BranchError when an eigenphase magnitude reaches max_phase.
Eigen::MatrixXcd hermitian_generator(const Eigen::MatrixXcd &U, double tau,
                                     double max_phase);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXcd &M);

struct PropagatorOptions {
    double tolerance = 1e-13;
    int max_levels = 14;
};

/// U(t1, t0) from midpoint exponentials exp(-i H(t_mid) h) of the full
/// matrix, refined by step doubling with Richardson extrapolation in h^2.
/// The result is projected onto the unitary group.
Eigen::MatrixXcd propagator(const HamiltonianSpec &spec, double t0, double t1,
                            const PropagatorOptions &options = {});

/// Dense g(t) G + f(t) F.
Eigen::MatrixXcd hamiltonian_matrix(const HamiltonianSpec &spec,
                                    const StaticOperators &ops, double t);

} // namespace adatrotter::dense
