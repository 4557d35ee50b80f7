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

#include "adatrotter/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "adatrotter/dense.hpp"
#include "adatrotter/errors.hpp"

namespace adatrotter {

static_assert(std::endian::native == std::endian::little,
              "state dumps assume a little-endian host");

namespace {

void check_state_sites(int num_sites) {
    if (num_sites < 1 || num_sites > kMaxStateSites) {
        throw DimensionError("state vectors support 1.." +
                             std::to_string(kMaxStateSites) + " sites");
    }
}

Mask to_index_mask(Mask site_mask, int num_sites) {
    Mask out = 0;
    for (int j = 0; j < num_sites; ++j) {
        out |= ((site_mask >> j) & 1) << (num_sites - 1 - j);
    }
    return out;
}

void require_hermitian(const PauliOperator &op, const char *what) {
    if (!op.is_hermitian()) {
        throw std::invalid_argument(std::string(what) +
                                    " requires a hermitian operator");
    }
}

void require_same_size(const PauliOperator &op, const StateVector &state) {
    if (op.num_sites() != state.num_sites()) {
        throw DimensionError("operator and state act on different site counts");
    }
}

} // namespace

StateVector::StateVector(int num_sites) : num_sites_(num_sites) {
    check_state_sites(num_sites);
    amplitudes_.assign(std::size_t{1} << num_sites, Complex{});
    amplitudes_[0] = 1.0;
}

StateVector::StateVector(int num_sites, std::vector<Complex> amplitudes)
    : num_sites_(num_sites), amplitudes_(std::move(amplitudes)) {
    check_state_sites(num_sites);
    if (amplitudes_.size() != (std::size_t{1} << num_sites)) {
        throw DimensionError("amplitude count must be 2^L");
    }
}

StateVector StateVector::basis_state(int num_sites, std::size_t index) {
    StateVector s(num_sites);
    if (index >= s.dimension()) {
        throw DimensionError("basis index out of range");
    }
    s.amplitudes_[0] = 0.0;
    s.amplitudes_[index] = 1.0;
    return s;
}

StateVector StateVector::from_eigen(int num_sites, const Eigen::VectorXcd &v) {
    return StateVector(num_sites, std::vector<Complex>(v.data(), v.data() + v.size()));
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amplitudes_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

double StateVector::norm_drift() const { return std::abs(norm() - 1.0); }

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) {
        throw NumericalError("cannot normalize the zero vector");
    }
    for (auto &a : amplitudes_) {
        a /= n;
    }
}

Complex StateVector::inner(const StateVector &other) const {
    if (other.dimension() != dimension()) {
        throw DimensionError("inner product of states of different size");
    }
    Complex s{};
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        s += std::conj(amplitudes_[i]) * other.amplitudes_[i];
    }
    return s;
}

double StateVector::max_abs_difference(const StateVector &other) const {
    if (other.dimension() != dimension()) {
        throw DimensionError("states of different size");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        worst = std::max(worst, std::abs(amplitudes_[i] - other.amplitudes_[i]));
    }
    return worst;
}

Eigen::VectorXcd StateVector::to_eigen() const {
    return Eigen::Map<const Eigen::VectorXcd>(
        amplitudes_.data(), static_cast<Eigen::Index>(amplitudes_.size()));
}

StateVector prepare_initial(int num_sites, double theta) {
    if (num_sites < 2) {
        throw std::invalid_argument("prepare_initial requires L >= 2");
    }
    // exp(-i theta X)|down> = cos(theta)|down> - i sin(theta)|up>.
    const Complex up{0.0, -std::sin(theta)};
    const Complex down{std::cos(theta), 0.0};
    StateVector s(num_sites);
    auto amps = s.amplitudes();
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        Complex a{1.0, 0.0};
        for (int b = 0; b < num_sites; ++b) {
            a *= ((idx >> b) & 1) ? down : up;
        }
        amps[idx] = a;
    }
    return s;
}

TrotterStepper::TrotterStepper(HamiltonianSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int L = spec_.num_sites;
    check_state_sites(L);
    const std::size_t dim = std::size_t{1} << L;
    const int bonds = L == 2 ? 1 : L;
    std::map<double, std::uint32_t> lookup;
    level_index_.resize(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        auto z = [&](int site) {
            return ((s >> (L - 1 - site)) & 1) ? -1.0 : 1.0;
        };
        double d = 0.0;
        for (int j = 0; j < bonds; ++j) {
            d += spec_.J_z * z(j) * z((j + 1) % L);
        }
        for (int j = 0; j < L; ++j) {
            d += spec_.h_z * z(j);
        }
        auto [it, inserted] =
            lookup.try_emplace(d, static_cast<std::uint32_t>(levels_.size()));
        if (inserted) {
            levels_.push_back(d);
        }
        level_index_[s] = it->second;
    }
}

void TrotterStepper::rotate_x(StateVector &state, double angle) const {
    const double c = std::cos(angle);
    const Complex ms{0.0, -std::sin(angle)};
    auto amps = state.amplitudes();
    const std::size_t dim = amps.size();
    for (int b = 0; b < state.num_sites(); ++b) {
        const std::size_t bit = std::size_t{1} << b;
        for (std::size_t s = 0; s < dim; ++s) {
            if (s & bit) {
                continue;
            }
            const Complex a0 = amps[s];
            const Complex a1 = amps[s | bit];
            amps[s] = c * a0 + ms * a1;
            amps[s | bit] = ms * a0 + c * a1;
        }
    }
}

void TrotterStepper::diagonal_phase(StateVector &state, double scale) const {
    std::vector<Complex> phase(levels_.size());
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        phase[i] = std::polar(1.0, -scale * levels_[i]);
    }
    auto amps = state.amplitudes();
    for (std::size_t s = 0; s < amps.size(); ++s) {
        amps[s] *= phase[level_index_[s]];
    }
}

void TrotterStepper::step(StateVector &state, double t, double dt) const {
    if (state.num_sites() != spec_.num_sites) {
        throw DimensionError("state and Hamiltonian site counts differ");
    }
    const double tm = t + 0.5 * dt;
    const double half_angle = spec_.h_x * spec_.g(tm) * 0.5 * dt;
    rotate_x(state, half_angle);
    diagonal_phase(state, spec_.f(tm) * dt);
    rotate_x(state, half_angle);
}

StateVector apply_trotter_step(const StateVector &state,
                               const HamiltonianSpec &spec, double t,
                               double dt) {
    StateVector out = state;
    TrotterStepper(spec).step(out, t, dt);
    return out;
}

void trotter_compose(StateVector &state, const TrotterStepper &stepper,
                     double t0, double t1, std::size_t substeps) {
    const double h = (t1 - t0) / static_cast<double>(substeps);
    for (std::size_t i = 0; i < substeps; ++i) {
        stepper.step(state, t0 + static_cast<double>(i) * h, h);
    }
}

ExactEvolution exact_evolve_detailed(const StateVector &state,
                                     const HamiltonianSpec &spec, double t0,
                                     double t1, const ExactOptions &options) {
    if (!(t1 > t0)) {
        throw std::invalid_argument("exact_evolve requires t1 > t0");
    }
    const TrotterStepper stepper(spec);
    // Symmetric splitting: the refinement error expands in even powers of h,
    // so Richardson extrapolation removes one power of h^2 per column.
    constexpr int kMaxExtrapolation = 4;
    std::vector<StateVector> previous;
    double diff = 0.0;
    for (std::size_t n = 1, level = 0; n <= options.max_substeps;
         n *= 2, ++level) {
        StateVector refined = state;
        trotter_compose(refined, stepper, t0, t1, n);
        std::vector<StateVector> row{std::move(refined)};
        if (options.extrapolate) {
            const int depth = std::min<int>(static_cast<int>(level), kMaxExtrapolation);
            for (int m = 1; m <= depth; ++m) {
                const double factor = std::pow(4.0, m) - 1.0;
                StateVector next = row[m - 1];
                auto out = next.amplitudes();
                auto fine = row[m - 1].amplitudes();
                auto coarse = previous[m - 1].amplitudes();
                for (std::size_t i = 0; i < out.size(); ++i) {
                    out[i] = fine[i] + (fine[i] - coarse[i]) / factor;
                }
                row.push_back(std::move(next));
            }
        }
        if (!previous.empty()) {
            diff = row.back().max_abs_difference(previous.back());
            if (diff < options.tolerance && level >= 2) {
                StateVector result = std::move(row.back());
                result.normalize();
                return {std::move(result), n, diff};
            }
        }
        previous = std::move(row);
    }
    throw ConvergenceError("exact_evolve did not converge within " +
                           std::to_string(options.max_substeps) +
                           " substeps (last difference " + std::to_string(diff) +
                           ")");
}

StateVector exact_evolve(const StateVector &state, const HamiltonianSpec &spec,
                         double t0, double t1, const ExactOptions &options) {
    return exact_evolve_detailed(state, spec, t0, t1, options).state;
}

StateVector dense_exact_evolve(const StateVector &state,
                               const HamiltonianSpec &spec, double t0,
                               double t1) {
    const Eigen::MatrixXcd U = dense::propagator(spec, t0, t1);
    return StateVector::from_eigen(state.num_sites(), U * state.to_eigen());
}

std::vector<Complex> apply_operator(const PauliOperator &op,
                                    const StateVector &state) {
    require_same_size(op, state);
    const int L = state.num_sites();
    const auto amps = state.amplitudes();
    std::vector<Complex> out(amps.size(), Complex{});
    constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto &[key, c] : op.terms()) {
        const Mask xs = to_index_mask(key.x, L);
        const Mask zs = to_index_mask(key.z, L);
        const Complex w = kPowersOfI[std::popcount(key.x & key.z) % 4] * c;
        for (std::size_t s = 0; s < amps.size(); ++s) {
            const Complex v = w * amps[s];
            if (std::popcount(zs & s) & 1) {
                out[s ^ xs] -= v;
            } else {
                out[s ^ xs] += v;
            }
        }
    }
    return out;
}

Moments moments(const PauliOperator &op, const StateVector &state) {
    require_hermitian(op, "moments");
    const auto phi = apply_operator(op, state);
    const auto amps = state.amplitudes();
    Complex mean{};
    double second = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        mean += std::conj(amps[i]) * phi[i];
        second += std::norm(phi[i]);
    }
    if (std::abs(mean.imag()) > 1e-10 * std::max(1.0, std::abs(mean.real()))) {
        throw NumericalError("expectation value has imaginary part " +
                             std::to_string(mean.imag()));
    }
    return {mean.real(), second};
}

double expectation(const PauliOperator &op, const StateVector &state) {
    return moments(op, state).mean;
}

double second_moment(const PauliOperator &op, const StateVector &state) {
    require_hermitian(op, "second_moment");
    const auto phi = apply_operator(op, state);
    double second = 0.0;
    for (const auto &a : phi) {
        second += std::norm(a);
    }
    return second;
}

double magnetization(const StateVector &state, Axis axis) {
    const int L = state.num_sites();
    const auto amps = state.amplitudes();
    double total = 0.0;
    if (axis == Axis::z) {
        for (std::size_t s = 0; s < amps.size(); ++s) {
            const int down = std::popcount(s);
            total += std::norm(amps[s]) * (L - 2 * down);
        }
    } else {
        // <X_j> = 2 Re sum_{s: bit clear} conj(a_s) a_{s|bit}.
        for (int b = 0; b < L; ++b) {
            const std::size_t bit = std::size_t{1} << b;
            for (std::size_t s = 0; s < amps.size(); ++s) {
                if (!(s & bit)) {
                    total += 2.0 * (std::conj(amps[s]) * amps[s | bit]).real();
                }
            }
        }
    }
    return total / L;
}

void write_state(const StateVector &state, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    const auto L = static_cast<std::uint32_t>(state.num_sites());
    out.write(reinterpret_cast<const char *>(&L), sizeof L);
    const auto amps = state.amplitudes();
    out.write(reinterpret_cast<const char *>(amps.data()),
              static_cast<std::streamsize>(amps.size() * sizeof(Complex)));
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

StateVector read_state(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::uint32_t L = 0;
    in.read(reinterpret_cast<char *>(&L), sizeof L);
    if (!in || L < 1 || L > kMaxStateSites) {
        throw std::runtime_error("corrupt state header in " + path.string());
    }
    std::vector<Complex> amps(std::size_t{1} << L);
    in.read(reinterpret_cast<char *>(amps.data()),
            static_cast<std::streamsize>(amps.size() * sizeof(Complex)));
    if (!in) {
        throw std::runtime_error("truncated state dump " + path.string());
    }
    return StateVector(static_cast<int>(L), std::move(amps));
}

} // namespace adatrotter
