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

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "adatrotter/hamiltonian.hpp"
#include "adatrotter/pauli.hpp"

namespace adatrotter {

inline constexpr int kMaxStateSites = 26;

/// Amplitudes in the computational basis. Site 0 is the most significant
/// bit of the index; bit value 0 is spin up.
class StateVector {
  public:
    StateVector() = default;
    /// |up ... up>.
    explicit StateVector(int num_sites);
    StateVector(int num_sites, std::vector<Complex> amplitudes);

    static StateVector basis_state(int num_sites, std::size_t index);
    static StateVector from_eigen(int num_sites, const Eigen::VectorXcd &v);

    int num_sites() const { return num_sites_; }
    std::size_t dimension() const { return amplitudes_.size(); }

    std::span<const Complex> amplitudes() const { return amplitudes_; }
    std::span<Complex> amplitudes() { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_[i]; }
    Complex &operator[](std::size_t i) { return amplitudes_[i]; }

    double norm() const;
    double norm_drift() const;
    void normalize();

    /// <this|other>.
    Complex inner(const StateVector &other) const;
    double max_abs_difference(const StateVector &other) const;

    Eigen::VectorXcd to_eigen() const;

    bool operator==(const StateVector &) const = default;

  private:
    int num_sites_ = 0;
    std::vector<Complex> amplitudes_;
};

/// Product state prod_j exp(-i theta X_j) |down ... down>.
StateVector prepare_initial(int num_sites, double theta);

/// Order of the midpoint splitting: U = U_exact + O(dt^3).
inline constexpr int kTrotterOrder = 3;

/// Applies the midpoint splitting
///   exp(-i g G dt/2) exp(-i f F dt) exp(-i g G dt/2),
/// with both drives sampled at t + dt/2. G is swept as identical
/// single-site X rotations; F is a diagonal phase drawn from a table of
/// its distinct eigenvalues.
class TrotterStepper {
  public:
    explicit TrotterStepper(HamiltonianSpec spec);

    const HamiltonianSpec &spec() const { return spec_; }

    void step(StateVector &state, double t, double dt) const;

    /// exp(-i angle sum_j X_j).
    void rotate_x(StateVector &state, double angle) const;
    /// exp(-i scale F / f) with F taken at unit drive.
    void diagonal_phase(StateVector &state, double scale) const;

    /// Diagonal of F (unit drive) for basis index s.
    double diagonal_value(std::size_t s) const {
        return levels_[level_index_[s]];
    }

  private:
    HamiltonianSpec spec_;
    std::vector<double> levels_;
    std::vector<std::uint32_t> level_index_;
};

StateVector apply_trotter_step(const StateVector &state,
                               const HamiltonianSpec &spec, double t,
                               double dt);

/// n equal midpoint steps over [t0, t1].
void trotter_compose(StateVector &state, const TrotterStepper &stepper,
                     double t0, double t1, std::size_t substeps);

struct ExactOptions {
    double tolerance = 1e-10;
    std::size_t max_substeps = std::size_t{1} << 20;
    /// Richardson-extrapolate successive refinements in h^2.
    bool extrapolate = true;
};

struct ExactEvolution {
    StateVector state;
    std::size_t substeps = 0;
    double last_difference = 0.0;
};

/// Reference evolution |phi(t1)> from |phi(t0)>: the midpoint splitting is
/// composed with the substep count doubled until successive refinements
/// differ by less than the tolerance in every amplitude.
ExactEvolution exact_evolve_detailed(const StateVector &state,
                                     const HamiltonianSpec &spec, double t0,
                                     double t1, const ExactOptions &options = {});
StateVector exact_evolve(const StateVector &state, const HamiltonianSpec &spec,
                         double t0, double t1, const ExactOptions &options = {});

/// Dense-matrix variant for small chains: midpoint exponentials of the full
/// matrix H(t_mid) with step doubling.
StateVector dense_exact_evolve(const StateVector &state,
                               const HamiltonianSpec &spec, double t0,
                               double t1);

/// O|psi>.
std::vector<Complex> apply_operator(const PauliOperator &op,
                                    const StateVector &state);

/// Re <psi|O|psi>. Requires a hermitian operator.
double expectation(const PauliOperator &op, const StateVector &state);

/// <psi|O^2|psi> = ||O psi||^2. Requires a hermitian operator.
double second_moment(const PauliOperator &op, const StateVector &state);

/// Expectation and second moment from a single operator application.
struct Moments {
    double mean = 0.0;
    double second = 0.0;
};
Moments moments(const PauliOperator &op, const StateVector &state);

enum class Axis { x, z };

/// <sum_j sigma_j^axis> / L.
double magnetization(const StateVector &state, Axis axis);

/// Binary dump: little-endian uint32 L, then 2^L interleaved (re, im)
/// little-endian doubles.
void write_state(const StateVector &state, const std::filesystem::path &path);
StateVector read_state(const std::filesystem::path &path);

} // namespace adatrotter
