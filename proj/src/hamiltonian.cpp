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

#include "adatrotter/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adatrotter {

DriveSchedule DriveSchedule::constant(double value) {
    DriveSchedule s;
    s.kind = Kind::constant;
    s.amplitude = value;
    return s;
}

DriveSchedule DriveSchedule::damped_cosine(double omega, double tau,
                                           double offset, double amplitude) {
    DriveSchedule s;
    s.kind = Kind::damped_cosine;
    s.omega = omega;
    s.tau = tau;
    s.offset = offset;
    s.amplitude = amplitude;
    s.validate();
    return s;
}

DriveSchedule DriveSchedule::custom(std::function<double(double)> f) {
    DriveSchedule s;
    s.kind = Kind::custom;
    s.evaluator = std::move(f);
    s.validate();
    return s;
}

double DriveSchedule::operator()(double t) const {
    switch (kind) {
    case Kind::constant:
        return amplitude;
    case Kind::damped_cosine:
        return amplitude * std::cos(omega * t) * std::exp(-t / tau) + offset;
    case Kind::custom:
        return evaluator(t);
    }
    return 0.0;
}

void DriveSchedule::validate() const {
    if (kind == Kind::damped_cosine && !(tau > 0.0)) {
        throw std::invalid_argument("damped_cosine drive requires tau > 0");
    }
    if (kind == Kind::custom && !evaluator) {
        throw std::invalid_argument("custom drive requires an evaluator");
    }
    for (double v : {amplitude, omega, tau, offset}) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("drive parameters must be finite");
        }
    }
}

std::string to_string(DriveSchedule::Kind kind) {
    switch (kind) {
    case DriveSchedule::Kind::constant:
        return "constant";
    case DriveSchedule::Kind::damped_cosine:
        return "damped_cosine";
    case DriveSchedule::Kind::custom:
        return "custom";
    }
    return "unknown";
}

DriveSchedule::Kind drive_kind_from_string(const std::string &name) {
    if (name == "constant") {
        return DriveSchedule::Kind::constant;
    }
    if (name == "damped_cosine") {
        return DriveSchedule::Kind::damped_cosine;
    }
    throw std::invalid_argument("unknown drive kind '" + name +
                                "' (expected constant or damped_cosine)");
}

void HamiltonianSpec::validate() const {
    if (num_sites < 2 || num_sites > kMaxPauliSites) {
        throw std::invalid_argument("model.L must be >= 2");
    }
    for (double v : {J_z, h_x, h_z}) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("couplings must be finite");
        }
    }
    g.validate();
    f.validate();
}

StaticOperators build_static_operators(const HamiltonianSpec &spec) {
    spec.validate();
    const int L = spec.num_sites;
    StaticOperators ops{PauliOperator(L), PauliOperator(L)};
    for (int j = 0; j < L; ++j) {
        ops.G.add_term(PauliTerm::single(L, 'X', j, spec.h_x));
        ops.F.add_term(PauliTerm::single(L, 'Z', j, spec.h_z));
    }
    const int bonds = L == 2 ? 1 : L;
    for (int j = 0; j < bonds; ++j) {
        const int k = (j + 1) % L;
        ops.F.add_term(PauliKey{0, (Mask{1} << j) | (Mask{1} << k)}, spec.J_z);
    }
    return ops;
}

LegendreBasis::LegendreBasis(int order) {
    if (order < 1) {
        throw std::invalid_argument("LegendreBasis order must be >= 1");
    }
    // (n+1) P_{n+1}(y) = (2n+1) y P_n(y) - n P_{n-1}(y) with y = 2x - 1.
    coefficients_.push_back({1.0});
    if (order > 1) {
        coefficients_.push_back({-1.0, 2.0});
    }
    for (int n = 1; n + 1 < order; ++n) {
        const auto &pn = coefficients_[n];
        const auto &pm = coefficients_[n - 1];
        std::vector<double> next(n + 2, 0.0);
        for (std::size_t i = 0; i < pn.size(); ++i) {
            next[i] -= (2 * n + 1) * pn[i];
            next[i + 1] += 2.0 * (2 * n + 1) * pn[i];
        }
        for (std::size_t i = 0; i < pm.size(); ++i) {
            next[i] -= n * pm[i];
        }
        for (auto &c : next) {
            c /= (n + 1);
        }
        coefficients_.push_back(std::move(next));
    }
}

const std::vector<double> &LegendreBasis::coefficients(int n) const {
    if (n < 0 || n >= order()) {
        throw std::out_of_range("Legendre index outside basis");
    }
    return coefficients_[n];
}

double LegendreBasis::evaluate(int n, double x) const {
    const auto &c = coefficients(n);
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

GaussLegendreRule::GaussLegendreRule(int nodes) {
    if (nodes < 1) {
        throw std::invalid_argument("quadrature needs at least one node");
    }
    nodes_.resize(nodes);
    weights_.resize(nodes);
    // Newton iteration on the Legendre polynomial of degree `nodes` in [-1, 1].
    const int m = (nodes + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (nodes + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < nodes; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
            }
            dp = nodes * (z * p0 - p1) / (z * z - 1.0);
            const double z_prev = z;
            z = z_prev - p0 / dp;
            if (std::abs(z - z_prev) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes_[i] = 0.5 * (1.0 - z);
        nodes_[nodes - 1 - i] = 0.5 * (1.0 + z);
        weights_[i] = weights_[nodes - 1 - i] = 0.5 * w;
    }
}

const GaussLegendreRule &GaussLegendreRule::default_rule() {
    static const GaussLegendreRule rule;
    return rule;
}

namespace {

const LegendreBasis &moment_basis() {
    static const LegendreBasis basis(kMaxMomentOrder);
    return basis;
}

} // namespace

double legendre_moment(const DriveSchedule &sched, double t, double dt, int n) {
    if (n < 1) {
        throw std::invalid_argument("legendre_moment requires n >= 1");
    }
    if (n > kMaxMomentOrder) {
        throw std::invalid_argument("legendre_moment: n = " + std::to_string(n) +
                                    " exceeds supported order " +
                                    std::to_string(kMaxMomentOrder));
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("legendre_moment requires dt > 0");
    }
    const auto &basis = moment_basis();
    if (sched.kind == DriveSchedule::Kind::constant) {
        return n == 1 ? sched.amplitude : 0.0;
    }
    return GaussLegendreRule::default_rule().integrate_unit(
        [&](double x) { return sched(t + x * dt) * basis.evaluate(n - 1, x); });
}

PauliOperator build_A(const HamiltonianSpec &spec, const StaticOperators &ops,
                      double t, double dt, int n) {
    const double mg = legendre_moment(spec.g, t, dt, n);
    const double mf = legendre_moment(spec.f, t, dt, n);
    const Complex prefactor{0.0, -(2.0 * n - 1.0) * dt};
    return prefactor * (mg * ops.G + mf * ops.F);
}

PauliOperator build_A(const HamiltonianSpec &spec, double t, double dt, int n) {
    return build_A(spec, build_static_operators(spec), t, dt, n);
}

PauliOperator instantaneous_hamiltonian(const HamiltonianSpec &spec,
                                        const StaticOperators &ops, double t) {
    return spec.g(t) * ops.G + spec.f(t) * ops.F;
}

} // namespace adatrotter
