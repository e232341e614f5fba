#pragma once

#include "arcs.hpp"
#include "counting.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

// Exact cross-checks shared by the experiment driver and the acceptance run.

namespace wfl {

// ---------------------------------------------------------------- circle identity

struct CircleCheck {
    std::vector<Int> direct;
    std::vector<Rational> circle;
    std::uint64_t values = 0, mismatches = 0;
    std::optional<std::uint64_t> first_mismatch;  // f index
    bool passed() const { return values > 0 && mismatches == 0; }
};

/// Brute-force N(f) against q^{-(ke+1)} sum_alpha S_1(alpha)^s conj psi(alpha(f)), for every f.
inline CircleCheck circle_verify(const Field& F, unsigned k, unsigned s, unsigned e, std::uint64_t budget = kDefaultOracleBudget) {
    auto rhs = circle_counts(F, k, s, e);
    auto lhs = count_bruteforce_all(F, k, s, e, budget);
    CircleCheck out;
    out.values = rhs.size();
    for (std::size_t f = 0; f < rhs.size(); ++f) out.direct.push_back(from_u128(lhs.values[f]));
    out.circle = std::move(rhs);
    for (std::size_t f = 0; f < out.values; ++f)
        if (out.circle[f] != Rational(out.direct[f])) {
            ++out.mismatches;
            if (!out.first_mismatch) out.first_mismatch = f;
        }
    return out;
}

// ---------------------------------------------------------------- local sums at one place

struct LocalTableCheck {
    std::uint64_t forms = 0;          // (v, m, ell) triples checked
    std::uint64_t exact_checked = 0, exact_failures = 0;
    std::uint64_t bound_checked = 0, bound_failures = 0;
    std::uint64_t direct_checked = 0, direct_failures = 0;
    double worst_bound_ratio = 0;     // max |S| / bound over m = 1 mod k
    std::string first_failure;
    bool passed() const { return forms > 0 && !exact_failures && !bound_failures && !direct_failures; }
};

namespace detail {

inline std::vector<Fq> digits_vector(const Field& F, std::uint64_t idx, std::size_t len) {
    std::vector<Fq> out(len);
    for (auto& x : out) {
        x = Fq{static_cast<std::uint32_t>(idx % F.q())};
        idx /= F.q();
    }
    return out;
}

inline std::vector<Fq> random_nondegenerate(const Field& F, const Place& v, int m, std::mt19937_64& rng) {
    std::vector<Fq> ell(static_cast<std::size_t>(m * v.degree));
    for (;;) {
        for (auto& x : ell) x = Fq{static_cast<std::uint32_t>(rng() % F.q())};
        if (RestrictedForm{DivisorP1{{{v, m}}}, {ell}}.is_nondegenerate()) return ell;
    }
}

}  // namespace detail

/// For deg v <= dv_max and 1 <= m <= 2k+1: S is q^{-ceil(m/k) deg v} when m is
/// not 1 mod k, and |S| <= (k-1) q^{-((m-1)/k + 1/2) deg v} otherwise. Forms are
/// listed exhaustively while there are at most `exhaustive_cap` of them and
/// sampled otherwise; the local recursion is compared with direct summation
/// whenever O/pi^m has at most `direct_cap` elements.
inline LocalTableCheck local_sum_table(const Field& F, unsigned k, int dv_max, std::mt19937_64& rng, std::uint64_t exhaustive_cap = 2500,
                                       std::uint64_t samples = 12, std::uint64_t direct_cap = 2500) {
    LocalTableCheck out;
    const double q = F.q();
    for (int dv = 1; dv <= dv_max; ++dv) {
        const Place v = places_of_degree(F, dv).front();
        for (int m = 1; m <= static_cast<int>(2 * k + 1); ++m) {
            const std::size_t len = static_cast<std::size_t>(m * dv);
            std::uint64_t size = 1;
            bool small = true;
            for (std::size_t i = 0; i < len && small; ++i) {
                size *= F.q();
                small = size <= exhaustive_cap;
            }
            std::vector<std::vector<Fq>> forms;
            if (small) {
                for (std::uint64_t idx = 0; idx < size; ++idx) {
                    auto ell = detail::digits_vector(F, idx, len);
                    if (RestrictedForm{DivisorP1{{{v, m}}}, {ell}}.is_nondegenerate()) forms.push_back(std::move(ell));
                }
            } else {
                for (std::uint64_t t = 0; t < samples; ++t) forms.push_back(detail::random_nondegenerate(F, v, m, rng));
            }
            const bool direct = small && size <= direct_cap;
            for (const auto& ell : forms) {
                ++out.forms;
                const Cyclotomic S = SZ_local(v, m, ell, k);
                auto fail = [&](const char* what) {
                    if (out.first_failure.empty()) out.first_failure = std::string(what) + " deg v=" + std::to_string(dv) + " m=" + std::to_string(m);
                };
                if (m % static_cast<int>(k) != 1) {
                    ++out.exact_checked;
                    const long ce = (m + static_cast<long>(k) - 1) / static_cast<long>(k);
                    if (S != Cyclotomic::integer(F.p(), rpow(Rational(F.q()), -ce * dv))) {
                        ++out.exact_failures;
                        fail("exact value");
                    }
                } else {
                    ++out.bound_checked;
                    const double bound = (k - 1.0) * std::pow(q, -((m - 1.0) / k + 0.5) * dv);
                    const double mag = S.abs();
                    out.worst_bound_ratio = std::max(out.worst_bound_ratio, mag / bound);
                    if (mag > bound + 1e-9) {
                        ++out.bound_failures;
                        fail("magnitude bound");
                    }
                }
                if (direct) {
                    ++out.direct_checked;
                    if (S != SZ_direct(RestrictedForm{DivisorP1{{{v, m}}}, {ell}}, F, k)) {
                        ++out.direct_failures;
                        fail("recursion vs direct");
                    }
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- multiplicativity

struct MultiplicativityCheck {
    std::uint64_t trials = 0, failures = 0;
    std::string first_failure;
    bool passed() const { return trials > 0 && failures == 0; }
};

/// Random Z = Z1 + Z2 with disjoint supports and deg Z <= max_degree, random
/// nondegenerate local forms; S_Z by direct summation over O/Z against the
/// product of direct sums over Z1 and Z2.
inline MultiplicativityCheck multiplicativity_check(const Field& F, unsigned k, unsigned trials, int max_degree, std::mt19937_64& rng) {
    MultiplicativityCheck out;
    auto pl = places_up_to(F, max_degree, true);
    while (out.trials < trials) {
        DivisorP1 Z;
        int budget = max_degree;
        const int parts = 2 + static_cast<int>(rng() % 2);
        for (int t = 0; t < parts && budget > 0; ++t) {
            const Place& v = pl[rng() % pl.size()];
            if (Z.mult(v) || v.degree > budget) continue;
            const int m = 1 + static_cast<int>(rng() % static_cast<unsigned>(budget / v.degree));
            Z.parts.emplace_back(v, m);
            budget -= m * v.degree;
        }
        if (Z.parts.size() < 2) continue;
        Z.normalize();
        RestrictedForm whole{Z, {}};
        for (const auto& [v, m] : Z.parts) whole.local.push_back(detail::random_nondegenerate(F, v, m, rng));
        // Cut the sorted parts at a random point.
        const std::size_t cut = 1 + rng() % (Z.parts.size() - 1);
        RestrictedForm a, b;
        for (std::size_t t = 0; t < Z.parts.size(); ++t) {
            auto& side = t < cut ? a : b;
            side.Z.parts.push_back(Z.parts[t]);
            side.local.push_back(whole.local[t]);
        }
        ++out.trials;
        if (SZ_direct(whole, F, k) != SZ_direct(a, F, k) * SZ_direct(b, F, k)) {
            ++out.failures;
            if (out.first_failure.empty()) out.first_failure = "Z=" + Z.to_string();
        }
    }
    return out;
}

// ---------------------------------------------------------------- major arcs

struct MajorArcCheck {
    std::uint64_t alphas = 0, pairs = 0, failures = 0;
    std::optional<std::uint64_t> first_failure;  // alpha index
    bool passed() const { return pairs > 0 && failures == 0; }
};

/// S_1(alpha) = q^{e+1} S_Z(restriction) for every alpha with deg alpha <= e+1,
/// at every minimal Z.
inline MajorArcCheck major_arc_check(const Field& F, unsigned k, unsigned e) {
    auto tab = S1_table(F, k, e);
    const int D = static_cast<int>(k * e);
    const Rational scale(ipow(Int(F.q()), e + 1));
    MajorArcCheck out;
    for (std::uint64_t idx = 0; idx < tab.size(); ++idx) {
        LinearForm a = LinearForm::from_index(F, idx, D);
        auto md = min_degree(a);
        if (md.degree > static_cast<int>(e) + 1) continue;
        ++out.alphas;
        for (const auto& Z : md.minimal) {
            ++out.pairs;
            auto rf = restrict_form(a, Z);
            if (!rf || tab.value(idx) != SZ(*rf, F, k) * scale) {
                ++out.failures;
                if (!out.first_failure) out.first_failure = idx;
            }
        }
    }
    return out;
}

}  // namespace wfl
