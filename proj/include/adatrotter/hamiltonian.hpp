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

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "adatrotter/pauli.hpp"

namespace adatrotter {

/// Scalar drive multiplying one of the two static operators.
///
///   constant:       amplitude
///   damped_cosine:  amplitude * cos(omega t) * exp(-t / tau) + offset
///   custom:         evaluator(t), library use only (not serializable)
struct DriveSchedule {
    enum class Kind { constant, damped_cosine, custom };

    Kind kind = Kind::constant;
    double amplitude = 1.0;
    double omega = 0.0;
    double tau = 1.0;
    double offset = 0.0;
    std::function<double(double)> evaluator;

    static DriveSchedule constant(double value);
    static DriveSchedule damped_cosine(double omega, double tau, double offset,
                                       double amplitude = 1.0);
    static DriveSchedule custom(std::function<double(double)> f);

    double operator()(double t) const;
    void validate() const;
};

std::string to_string(DriveSchedule::Kind kind);
DriveSchedule::Kind drive_kind_from_string(const std::string &name);

/// H(t) = g(t) G + f(t) F on a periodic chain, with
/// G = h_x sum_j X_j and F = J_z sum_j Z_j Z_{j+1} + h_z sum_j Z_j.
struct HamiltonianSpec {
    int num_sites = 2;
    double J_z = 1.0;
    double h_x = 1.0;
    double h_z = 0.0;
    DriveSchedule g = DriveSchedule::constant(1.0);
    DriveSchedule f = DriveSchedule::constant(1.0);

    void validate() const;
};

/// The pair (G, F). At L = 2 the two ring bonds coincide and only one
/// Z0 Z1 bond is kept.
struct StaticOperators {
    PauliOperator G;
    PauliOperator F;
};

StaticOperators build_static_operators(const HamiltonianSpec &spec);

/// Shifted Legendre polynomials on [0, 1] with P_0 = 1, P_1 = 2x - 1, ...,
/// normalized so that (2n + 1) * int_0^1 P_m P_n = delta_mn.
class LegendreBasis {
  public:
    explicit LegendreBasis(int order);

    int order() const { return static_cast<int>(coefficients_.size()); }

    /// Monomial coefficients of P_n, lowest power first.
    const std::vector<double> &coefficients(int n) const;

    double evaluate(int n, double x) const;

  private:
    std::vector<std::vector<double>> coefficients_;
};

/// Fixed-order Gauss-Legendre rule mapped to [0, 1].
class GaussLegendreRule {
  public:
    static constexpr int kDefaultNodes = 32;

    explicit GaussLegendreRule(int nodes = kDefaultNodes);

    const std::vector<double> &nodes() const { return nodes_; }
    const std::vector<double> &weights() const { return weights_; }

    template <class F> double integrate_unit(F &&f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            s += weights_[i] * f(nodes_[i]);
        }
        return s;
    }

    static const GaussLegendreRule &default_rule();

  private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Highest n accepted by legendre_moment / build_A (A_1..A_3 suffice for
/// truncation orders up to 5).
inline constexpr int kMaxMomentOrder = 3;

/// int_0^1 sched(t + x dt) P_{n-1}(x) dx.
double legendre_moment(const DriveSchedule &sched, double t, double dt, int n);

/// A_n = -i (2n - 1) dt [ m_g G + m_f F ] with m the Legendre moments of the
/// two drives over the window [t, t + dt]. Anti-hermitian.
PauliOperator build_A(const HamiltonianSpec &spec, const StaticOperators &ops,
                      double t, double dt, int n);
PauliOperator build_A(const HamiltonianSpec &spec, double t, double dt, int n);

/// g(t) G + f(t) F.
PauliOperator instantaneous_hamiltonian(const HamiltonianSpec &spec,
                                        const StaticOperators &ops, double t);

} // namespace adatrotter
