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

#include "adatrotter/dense.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "adatrotter/errors.hpp"

namespace adatrotter::dense {

Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd &H, double tau) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
    const Eigen::VectorXd &lambda = eig.eigenvalues();
    Eigen::VectorXcd phases(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        phases(i) = std::polar(1.0, -lambda(i) * tau);
    }
    const auto &V = eig.eigenvectors();
    return V * phases.asDiagonal() * V.adjoint();
}

Eigen::MatrixXcd nearest_unitary(const Eigen::MatrixXcd &M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU |
                                                  Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

Eigen::MatrixXcd hermitian_generator(const Eigen::MatrixXcd &U, double tau,
                                     double max_phase) {
    // U is normal, so its complex Schur form is diagonal up to rounding.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(U);
    const auto &T = schur.matrixT();
    const auto &Q = schur.matrixU();
    Eigen::VectorXd phases(T.rows());
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
        phases(i) = std::arg(T(i, i));
        if (std::abs(phases(i)) >= max_phase) {
            throw BranchError("propagator eigenphase " +
                              std::to_string(phases(i)) +
                              " too close to the log branch cut; shrink dt");
        }
    }
    Eigen::MatrixXcd K = -Q * phases.cast<Complex>().asDiagonal() *
                         Q.adjoint() / tau;
    return 0.5 * (K + K.adjoint());
}

double operator_norm(const Eigen::MatrixXcd &M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(0);
}

Eigen::MatrixXcd hamiltonian_matrix(const HamiltonianSpec &spec,
                                    const StaticOperators &ops, double t) {
    return to_dense(instantaneous_hamiltonian(spec, ops, t), kMaxOracleSites);
}

Eigen::MatrixXcd propagator(const HamiltonianSpec &spec, double t0, double t1,
                            const PropagatorOptions &options) {
    if (spec.num_sites > kMaxOracleSites) {
        throw DimensionError("dense propagator limited to " +
                             std::to_string(kMaxOracleSites) + " sites");
    }
    const auto ops = build_static_operators(spec);
    const Eigen::MatrixXcd G = to_dense(ops.G, kMaxOracleSites);
    const Eigen::MatrixXcd F = to_dense(ops.F, kMaxOracleSites);
    const double span = t1 - t0;

    auto compose = [&](int n) {
        const double h = span / n;
        Eigen::MatrixXcd U =
            Eigen::MatrixXcd::Identity(G.rows(), G.cols());
        for (int i = 0; i < n; ++i) {
            const double tm = t0 + (i + 0.5) * h;
            const Eigen::MatrixXcd H = spec.g(tm) * G + spec.f(tm) * F;
            U = expm_hermitian(H, h) * U;
        }
        return U;
    };

    // The midpoint composition is symmetric, so its error expands in h^2.
    constexpr int kMaxExtrapolation = 5;
    std::vector<Eigen::MatrixXcd> previous;
    double last_diff = 0.0;
    for (int level = 0; level <= options.max_levels; ++level) {
        std::vector<Eigen::MatrixXcd> row{compose(1 << level)};
        const int depth = std::min<int>(level, kMaxExtrapolation);
        for (int m = 1; m <= depth; ++m) {
            const double factor = std::pow(4.0, m) - 1.0;
            row.push_back(row[m - 1] + (row[m - 1] - previous[m - 1]) / factor);
        }
        if (level >= 2) {
            last_diff =
                (row.back() - previous.back()).cwiseAbs().maxCoeff();
            if (last_diff < options.tolerance) {
                return nearest_unitary(row.back());
            }
        }
        previous = std::move(row);
    }
    throw ConvergenceError("dense propagator did not converge (last difference " +
                           std::to_string(last_diff) + ")");
}

} // namespace adatrotter::dense
