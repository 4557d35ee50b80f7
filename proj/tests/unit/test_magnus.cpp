#include <cmath>

#include "doctest.h"
#include "oracle.hpp"

#include "adatrotter/dense.hpp"
#include "adatrotter/errors.hpp"
#include "adatrotter/magnus.hpp"

using namespace adatrotter;
using oracle::C;

namespace {

HamiltonianSpec chain(int L, double h_x = 1.0) {
    HamiltonianSpec s;
    s.num_sites = L;
    s.J_z = 1.0;
    s.h_x = h_x;
    s.h_z = 0.5;
    s.g = DriveSchedule::damped_cosine(4.0, 1.0, 1.0);
    return s;
}

} // namespace

TEST_CASE("constant drives reduce to g G + f F") {
    auto s = chain(5);
    s.g = DriveSchedule::constant(0.6);
    s.f = DriveSchedule::constant(1.4);
    const auto ops = build_static_operators(s);
    const auto ref = ops.G * 0.6 + ops.F * 1.4;
    for (int k : {1, 3, 5}) {
        for (double t : {0.0, 2.3}) {
            for (double dt : {0.01, 0.4, 1.5}) {
                const auto h = build_piecewise_hamiltonian(s, t, dt, k);
                CHECK(h.op.max_coefficient_distance(ref) < 1e-12);
            }
        }
    }
}

TEST_CASE("k = 1 uses window averages") {
    const auto s = chain(4);
    const auto ops = build_static_operators(s);
    const double t = 0.3, dt = 0.4;
    const double gbar = oracle::integrate(s.g, t, t + dt) / dt;
    const auto h = build_piecewise_hamiltonian(s, t, dt, 1);
    CHECK(h.op.max_coefficient_distance(ops.G * gbar + ops.F) < 1e-12);
}

TEST_CASE("unsupported truncation orders") {
    CHECK(is_supported_truncation(1));
    CHECK(is_supported_truncation(5));
    CHECK_FALSE(is_supported_truncation(2));
    CHECK_FALSE(is_supported_truncation(7));
    CHECK_THROWS(build_piecewise_hamiltonian(chain(3), 0.0, 0.1, 4));
    CHECK_THROWS(build_piecewise_hamiltonian(chain(3), 0.0, 0.0, 3));
}

TEST_CASE("H_[k] is hermitian for random drives") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int trial = 0; trial < 15; ++trial) {
        HamiltonianSpec s;
        s.num_sites = 5;
        s.J_z = u(rng);
        s.h_x = u(rng);
        s.h_z = u(rng) - 1.5;
        s.g = DriveSchedule::damped_cosine(u(rng), u(rng), u(rng) - 1.0, u(rng));
        s.f = DriveSchedule::damped_cosine(u(rng), u(rng), u(rng));
        for (int k : {1, 3, 5}) {
            const auto h = build_piecewise_hamiltonian(s, u(rng), u(rng) / 3, k);
            CHECK(h.op.is_hermitian(1e-12));
            for (const auto &[key, c] : h.op.terms()) {
                CHECK(c.imag() == 0.0);
            }
        }
    }
}

TEST_CASE("assembly from the odd Magnus terms") {
    const auto s = chain(4, 3.0);
    const auto ops = build_static_operators(s);
    const double t = 0.2, dt = 0.3;
    const auto a1 = build_A(s, ops, t, dt, 1);
    const auto a2 = build_A(s, ops, t, dt, 2);
    const auto a3 = build_A(s, ops, t, dt, 3);
    const auto o3 = commutator(a1, a2) * (-1.0 / 6);
    const auto o5 = commutator(a1, commutator(a1, a3)) * (1.0 / 60) -
                    commutator(a2, commutator(a1, a2)) * (1.0 / 60) +
                    commutator(a1, commutator(a1, commutator(a1, a2))) * (1.0 / 360) -
                    commutator(a2, a3) * (1.0 / 30);
    const auto terms = build_magnus_terms(s, ops, t, dt, 5);
    CHECK(terms.omega1.max_coefficient_distance(a1) < 1e-15);
    CHECK(terms.omega3.max_coefficient_distance(o3) < 1e-15);
    CHECK(terms.omega5.max_coefficient_distance(o5) < 1e-15);

    // Explicit zero placeholders for the even orders change nothing.
    const PauliOperator omega2(4), omega4(4);
    const auto sum = (a1 + omega2 + o3 + omega4 + o5) * C(0, 1.0 / dt);
    const auto h = build_piecewise_hamiltonian(s, ops, t, dt, 5);
    CHECK(h.op.max_coefficient_distance(sum) < 1e-14);
    const auto h3 = build_piecewise_hamiltonian(s, ops, t, dt, 3);
    CHECK(h3.op.max_coefficient_distance((a1 + o3) * C(0, 1.0 / dt)) < 1e-14);
}

TEST_CASE("nested commutators stay local") {
    const auto s = chain(8, 3.0);
    const auto h3 = build_piecewise_hamiltonian(s, 0.1, 0.3, 3);
    const auto h5 = build_piecewise_hamiltonian(s, 0.1, 0.3, 5);
    int w3 = 0, w5 = 0;
    for (const auto &[k, c] : h3.op.terms()) {
        w3 = std::max(w3, PauliOperator::ring_support_width(k, 8));
    }
    for (const auto &[k, c] : h5.op.terms()) {
        w5 = std::max(w5, PauliOperator::ring_support_width(k, 8));
    }
    CHECK(w3 <= 3);
    CHECK(w5 <= 5);
    CHECK(w5 > w3);
}

TEST_CASE("memo cache") {
    MagnusCache cache(chain(4));
    const auto &a = cache.get(0.1, 0.2, 5);
    const auto &b = cache.get(0.1, 0.2, 5);
    CHECK(&a == &b);
    CHECK(cache.hits() == 1);
    CHECK(cache.misses() == 1);
    cache.get(0.1, 0.2, 3);
    CHECK(cache.misses() == 2);
    CHECK(a.op.max_coefficient_distance(build_piecewise_hamiltonian(chain(4), 0.1, 0.2, 5).op) == 0.0);
}

TEST_CASE("dense H_inf") {
    SUBCASE("static chain") {
        auto s = chain(4, 3.0);
        s.g = DriveSchedule::constant(0.5);
        const auto st = oracle::statics(s);
        const auto h = dense_h_infinity(s, 1.0, 0.1);
        CHECK(oracle::max_abs(h - (0.5 * st.G + st.F)) < 1e-10);
        CHECK(truncation_error_norm(s, 1.0, 0.1, 1) < 1e-10);
        CHECK(truncation_error_norm(s, 1.0, 0.1, 5) < 1e-10);
    }
    SUBCASE("hermitian and reproduces the propagator") {
        const auto s = chain(4);
        const double t = 0.3, dt = 0.2;
        const auto h = dense_h_infinity(s, t, dt);
        CHECK(oracle::max_abs(h - h.adjoint()) < 1e-10);
        const oracle::Mat U = oracle::propagator(s, t, t + dt, 200);
        CHECK(oracle::max_abs(oracle::expm(C(0, -dt) * h) - U) < 1e-9);
        // Independent principal log of the independent propagator.
        const oracle::Mat hl = C(0, 1.0 / dt) * oracle::logm(U);
        CHECK(oracle::max_abs(hl - h) < 1e-8);
        CHECK(oracle::max_abs(dense::propagator(s, t, t + dt) - U) < 1e-11);
    }
    SUBCASE("midpoint limit") {
        const auto s = chain(4);
        const auto st = oracle::statics(s);
        const double t = 0.3;
        const auto dts = oracle::geomspace(0.01, 0.1, 6);
        std::vector<double> errs;
        for (double dt : dts) {
            const oracle::Mat mid = oracle::hamiltonian(s, st, t + dt / 2);
            errs.push_back(oracle::spectral_norm(dense_h_infinity(s, t, dt) - mid));
        }
        CHECK(oracle::loglog_slope(dts, errs) == doctest::Approx(2.0).epsilon(0.1));
    }
    SUBCASE("branch guard") {
        CHECK_THROWS_AS(dense_h_infinity(chain(4, 3.0), 0.0, 0.5), BranchError);
        CHECK_THROWS_AS(dense_h_infinity(chain(9), 0.0, 0.1), DimensionError);
    }
}

TEST_CASE("truncation error ordering") {
    const auto s = chain(4);
    const double t = 0.3, dt = 0.2;
    const double e1 = truncation_error_norm(s, t, dt, 1);
    const double e3 = truncation_error_norm(s, t, dt, 3);
    const double e5 = truncation_error_norm(s, t, dt, 5);
    CHECK(e5 < e3);
    CHECK(e3 < e1);
    const auto h5 = build_piecewise_hamiltonian(s, t, dt, 5);
    CHECK(oracle::spectral_norm(oracle::dense(h5.op) - dense_h_infinity(s, t, dt)) ==
          doctest::Approx(e5).epsilon(1e-6));
}
