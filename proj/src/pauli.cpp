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

#include "adatrotter/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace adatrotter {

namespace {

constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

Mask site_mask(int num_sites) {
    return num_sites >= 64 ? ~Mask{0} : ((Mask{1} << num_sites) - 1);
}

void check_sites(int num_sites) {
    if (num_sites < 1 || num_sites > kMaxPauliSites) {
        throw DimensionError("number of sites must be in [1, 63], got " +
                             std::to_string(num_sites));
    }
}

// Exponent e such that P(a) P(b) = i^e P(a xor b), with P(x, z) the
// hermitian string i^{|x&z|} X^x Z^z.
int product_phase_exponent(PauliKey a, PauliKey b) {
    const Mask x = a.x ^ b.x;
    const Mask z = a.z ^ b.z;
    int e = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) +
            2 * std::popcount(a.z & b.x) - std::popcount(x & z);
    return ((e % 4) + 4) % 4;
}

} // namespace

bool strings_commute(PauliKey a, PauliKey b) {
    return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

PauliTerm PauliTerm::from_word(std::string_view word, Complex coefficient) {
    const int n = static_cast<int>(word.size());
    check_sites(n);
    PauliTerm t;
    t.num_sites = n;
    t.coefficient = coefficient;
    for (int j = 0; j < n; ++j) {
        const Mask bit = Mask{1} << j;
        switch (word[j]) {
        case 'I':
            break;
        case 'X':
            t.x_mask |= bit;
            break;
        case 'Y':
            t.x_mask |= bit;
            t.z_mask |= bit;
            break;
        case 'Z':
            t.z_mask |= bit;
            break;
        default:
            throw std::invalid_argument("invalid Pauli letter '" +
                                        std::string(1, word[j]) + "'");
        }
    }
    return t;
}

PauliTerm PauliTerm::single(int num_sites, char pauli, int site,
                            Complex coefficient) {
    check_sites(num_sites);
    if (site < 0 || site >= num_sites) {
        throw DimensionError("site " + std::to_string(site) +
                             " out of range");
    }
    std::string word(num_sites, 'I');
    word[site] = pauli;
    return from_word(word, coefficient);
}

std::string PauliTerm::word() const {
    std::string w(num_sites, 'I');
    for (int j = 0; j < num_sites; ++j) {
        const bool x = (x_mask >> j) & 1;
        const bool z = (z_mask >> j) & 1;
        w[j] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }
    return w;
}

PauliTerm term_multiply(const PauliTerm &a, const PauliTerm &b) {
    if (a.num_sites != b.num_sites) {
        throw DimensionError("term_multiply: site counts differ");
    }
    const int e = product_phase_exponent(a.key(), b.key());
    PauliTerm r;
    r.num_sites = a.num_sites;
    r.x_mask = a.x_mask ^ b.x_mask;
    r.z_mask = a.z_mask ^ b.z_mask;
    r.coefficient = kPowersOfI[e] * a.coefficient * b.coefficient;
    return r;
}

PauliOperator::PauliOperator(int num_sites, double prune_threshold)
    : num_sites_(num_sites), prune_threshold_(prune_threshold) {
    check_sites(num_sites);
}

PauliOperator PauliOperator::identity(int num_sites) {
    PauliOperator op(num_sites);
    op.add_term(PauliKey{}, 1.0);
    return op;
}

PauliOperator PauliOperator::from_terms(int num_sites,
                                        const std::vector<PauliTerm> &terms) {
    PauliOperator op(num_sites);
    for (const auto &t : terms) {
        op.add_term(t);
    }
    return op;
}

PauliOperator PauliOperator::from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    PauliOperator op;
    bool sized = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::istringstream fields(line);
        double re = 0, im = 0;
        std::string word;
        if (!(fields >> re >> im >> word)) {
            throw std::invalid_argument("malformed operator line " +
                                        std::to_string(line_no));
        }
        const auto term = PauliTerm::from_word(word, {re, im});
        if (!sized) {
            op = PauliOperator(term.num_sites);
            sized = true;
        }
        op.add_term(term);
    }
    if (!sized) {
        throw std::invalid_argument("operator text contains no terms");
    }
    return op;
}

Complex PauliOperator::coefficient(PauliKey key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Complex{} : it->second;
}

Complex PauliOperator::coefficient(std::string_view word) const {
    const auto t = PauliTerm::from_word(word);
    if (t.num_sites != num_sites_) {
        throw DimensionError("word length differs from operator size");
    }
    return coefficient(t.key());
}

void PauliOperator::add_term(const PauliTerm &term) {
    if (term.num_sites != num_sites_) {
        throw DimensionError("add_term: site counts differ");
    }
    add_term(term.key(), term.coefficient);
}

void PauliOperator::add_term(PauliKey key, Complex coefficient) {
    const Mask valid = site_mask(num_sites_);
    if ((key.x & ~valid) || (key.z & ~valid)) {
        throw DimensionError("mask has bits beyond the last site");
    }
    auto [it, inserted] = terms_.try_emplace(key, coefficient);
    if (!inserted) {
        it->second += coefficient;
    }
    if (std::abs(it->second) <= prune_threshold_) {
        terms_.erase(it);
    }
}

bool PauliOperator::is_hermitian(double tolerance) const {
    return std::all_of(terms_.begin(), terms_.end(), [&](const auto &kv) {
        return std::abs(kv.second.imag()) <= tolerance;
    });
}

PauliOperator PauliOperator::adjoint() const {
    PauliOperator r = *this;
    for (auto &[key, c] : r.terms_) {
        c = std::conj(c);
    }
    return r;
}

double PauliOperator::one_norm() const {
    double s = 0.0;
    for (const auto &[key, c] : terms_) {
        s += std::abs(c);
    }
    return s;
}

double PauliOperator::max_coefficient_distance(
    const PauliOperator &other) const {
    check_compatible(other);
    double worst = 0.0;
    for (const auto &[key, c] : terms_) {
        worst = std::max(worst, std::abs(c - other.coefficient(key)));
    }
    for (const auto &[key, c] : other.terms_) {
        if (!terms_.contains(key)) {
            worst = std::max(worst, std::abs(c));
        }
    }
    return worst;
}

int PauliOperator::ring_support_width(PauliKey key, int num_sites) {
    const Mask support = key.x | key.z;
    if (support == 0) {
        return 0;
    }
    // The covering arc is the ring minus its longest run of identity sites.
    int longest_gap = 0;
    for (int start = 0; start < num_sites; ++start) {
        if ((support >> start) & 1) {
            continue;
        }
        int run = 0;
        while (run < num_sites && !((support >> ((start + run) % num_sites)) & 1)) {
            ++run;
        }
        longest_gap = std::max(longest_gap, run);
    }
    return num_sites - longest_gap;
}

void PauliOperator::check_compatible(const PauliOperator &other) const {
    if (num_sites_ != other.num_sites_) {
        throw DimensionError("operators act on " + std::to_string(num_sites_) +
                             " and " + std::to_string(other.num_sites_) +
                             " sites");
    }
}

void PauliOperator::prune() {
    std::erase_if(terms_, [&](const auto &kv) {
        return std::abs(kv.second) <= prune_threshold_;
    });
}

PauliOperator &PauliOperator::operator+=(const PauliOperator &other) {
    check_compatible(other);
    for (const auto &[key, c] : other.terms_) {
        auto [it, inserted] = terms_.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
        }
    }
    prune();
    return *this;
}

PauliOperator &PauliOperator::operator-=(const PauliOperator &other) {
    check_compatible(other);
    for (const auto &[key, c] : other.terms_) {
        auto [it, inserted] = terms_.try_emplace(key, -c);
        if (!inserted) {
            it->second -= c;
        }
    }
    prune();
    return *this;
}

PauliOperator &PauliOperator::operator*=(Complex scalar) {
    for (auto &[key, c] : terms_) {
        c *= scalar;
    }
    prune();
    return *this;
}

PauliOperator operator*(const PauliOperator &a, const PauliOperator &b) {
    a.check_compatible(b);
    PauliOperator r(a.num_sites_, a.prune_threshold_);
    for (const auto &[ka, ca] : a.terms_) {
        for (const auto &[kb, cb] : b.terms_) {
            const PauliKey k{ka.x ^ kb.x, ka.z ^ kb.z};
            const Complex c = kPowersOfI[product_phase_exponent(ka, kb)] * ca * cb;
            auto [it, inserted] = r.terms_.try_emplace(k, c);
            if (!inserted) {
                it->second += c;
            }
        }
    }
    r.prune();
    return r;
}

PauliOperator commutator(const PauliOperator &a, const PauliOperator &b) {
    if (a.num_sites() != b.num_sites()) {
        throw DimensionError("commutator: site counts differ");
    }
    // Commuting string pairs cancel; anticommuting pairs contribute 2ab.
    PauliOperator r(a.num_sites(), a.prune_threshold());
    for (const auto &[ka, ca] : a.terms()) {
        for (const auto &[kb, cb] : b.terms()) {
            if (strings_commute(ka, kb)) {
                continue;
            }
            const Complex c =
                2.0 * kPowersOfI[product_phase_exponent(ka, kb)] * ca * cb;
            r.add_term(PauliKey{ka.x ^ kb.x, ka.z ^ kb.z}, c);
        }
    }
    return r;
}

std::string PauliOperator::to_text() const {
    std::string out;
    char buf[64];
    for (const auto &[key, c] : terms_) {
        PauliTerm t{num_sites_, key.x, key.z, c};
        std::snprintf(buf, sizeof buf, "%.17g %.17g ", c.real(), c.imag());
        out += buf;
        out += t.word();
        out += '\n';
    }
    return out;
}

Eigen::MatrixXcd to_dense(const PauliOperator &op, int max_sites) {
    const int n = op.num_sites();
    if (n > max_sites) {
        throw DimensionError("to_dense: " + std::to_string(n) +
                             " sites exceeds cap of " +
                             std::to_string(max_sites));
    }
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto &[key, c] : op.terms()) {
        // Site j is bit (n-1-j) of the basis index.
        Mask xs = 0, zs = 0;
        for (int j = 0; j < n; ++j) {
            xs |= ((key.x >> j) & 1) << (n - 1 - j);
            zs |= ((key.z >> j) & 1) << (n - 1 - j);
        }
        const Complex phase = kPowersOfI[std::popcount(key.x & key.z) % 4] * c;
        for (Eigen::Index s = 0; s < dim; ++s) {
            const double sign =
                (std::popcount(zs & static_cast<Mask>(s)) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(static_cast<Mask>(s) ^ xs), s) +=
                sign * phase;
        }
    }
    return m;
}

} // namespace adatrotter
