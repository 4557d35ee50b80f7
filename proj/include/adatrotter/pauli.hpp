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

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace adatrotter {

using Complex = std::complex<double>;
using Mask = std::uint64_t;

inline constexpr int kMaxPauliSites = 63;

/// Raised when operands live on different numbers of sites, or when a
/// requested size exceeds a configured cap.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Key of a Pauli string. Bit j of each mask refers to site j.
///
/// A site with only the x bit set carries X, only the z bit carries Z, and
/// both bits carry Y. Strings are therefore products of hermitian
/// single-site Paulis, and a hermitian operator has purely real
/// coefficients.
struct PauliKey {
    Mask x = 0;
    Mask z = 0;

    friend auto operator<=>(const PauliKey &, const PauliKey &) = default;
};

struct PauliTerm {
    int num_sites = 0;
    Mask x_mask = 0;
    Mask z_mask = 0;
    Complex coefficient{1.0, 0.0};

    /// Parses a word such as "XIZY"; character j is site j.
    static PauliTerm from_word(std::string_view word, Complex coefficient = 1.0);

    /// Single-site term, e.g. single(4, 'X', 0).
    static PauliTerm single(int num_sites, char pauli, int site,
                            Complex coefficient = 1.0);

    std::string word() const;
    PauliKey key() const { return {x_mask, z_mask}; }
};

/// Exact product a*b. The returned phase is a power of i times the product
/// of the coefficients.
PauliTerm term_multiply(const PauliTerm &a, const PauliTerm &b);

/// True iff the two strings commute.
bool strings_commute(PauliKey a, PauliKey b);

/// Sparse weighted sum of Pauli strings on a fixed number of sites.
///
/// Coefficients with magnitude at or below the prune threshold are dropped
/// after every arithmetic operation, so nested commutator chains stay free
/// of exact-zero debris.
class PauliOperator {
  public:
    static constexpr double kDefaultPruneThreshold = 1e-14;

    using TermMap = std::map<PauliKey, Complex>;

    PauliOperator() = default;
    explicit PauliOperator(int num_sites,
                           double prune_threshold = kDefaultPruneThreshold);

    static PauliOperator identity(int num_sites);
    static PauliOperator from_terms(int num_sites,
                                    const std::vector<PauliTerm> &terms);

    /// Parses the debug text format produced by to_text().
    static PauliOperator from_text(std::string_view text);

    int num_sites() const { return num_sites_; }
    double prune_threshold() const { return prune_threshold_; }
    const TermMap &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Coefficient of a string, zero when absent.
    Complex coefficient(PauliKey key) const;
    Complex coefficient(std::string_view word) const;

    /// Accumulates a term and prunes that entry if it cancels.
    void add_term(const PauliTerm &term);
    void add_term(PauliKey key, Complex coefficient);

    bool is_hermitian(double tolerance = 1e-12) const;
    PauliOperator adjoint() const;

    /// Sum of coefficient magnitudes.
    double one_norm() const;

    /// Largest |coefficient difference| over the union of supports.
    double max_coefficient_distance(const PauliOperator &other) const;

    /// Number of sites in the shortest arc of the periodic ring that covers
    /// every non-identity site of the string (0 for the identity).
    static int ring_support_width(PauliKey key, int num_sites);

    PauliOperator &operator+=(const PauliOperator &other);
    PauliOperator &operator-=(const PauliOperator &other);
    PauliOperator &operator*=(Complex scalar);

    friend PauliOperator operator+(PauliOperator a, const PauliOperator &b) {
        return a += b;
    }
    friend PauliOperator operator-(PauliOperator a, const PauliOperator &b) {
        return a -= b;
    }
    friend PauliOperator operator*(PauliOperator a, Complex s) { return a *= s; }
    friend PauliOperator operator*(Complex s, PauliOperator a) { return a *= s; }
    friend PauliOperator operator*(const PauliOperator &a,
                                   const PauliOperator &b);

    /// Lines of "coeff_re coeff_im word", one per term, in key order.
    std::string to_text() const;

  private:
    void check_compatible(const PauliOperator &other) const;
    void prune();

    int num_sites_ = 0;
    double prune_threshold_ = kDefaultPruneThreshold;
    TermMap terms_;
};

/// ab - ba.
PauliOperator commutator(const PauliOperator &a, const PauliOperator &b);

inline constexpr int kDefaultDenseSiteCap = 10;

/// Dense 2^L x 2^L matrix. Site 0 is the leftmost Kronecker factor and the
/// computational basis state |0> is spin up (sigma^z = +1).
Eigen::MatrixXcd to_dense(const PauliOperator &op,
                          int max_sites = kDefaultDenseSiteCap);

} // namespace adatrotter
