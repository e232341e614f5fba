#pragma once

#include "errors.hpp"
#include "group_fourier.hpp"
#include "places.hpp"
#include "poly.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wfl {

inline constexpr std::uint64_t kDefaultOracleBudget = 1000000000ull;

struct WaringInstance {
    const Field* F = nullptr;
    unsigned k = 2, s = 1, e = 0;
    Poly f;

    unsigned dim() const { return k * e + 1; }
    /// True outside 2 <= k < p, where the asymptotics are not known to hold.
    bool warning() const { return F->p() <= k || k % F->p() == 0; }
    void validate() const {
        if (k < 2 || s < 1) throw std::invalid_argument("need k >= 2 and s >= 1");
        if (f.field_ptr() && f.deg() > static_cast<int>(k * e)) throw std::invalid_argument("deg f exceeds ke");
    }
};

struct FermatInstance {
    const Field* F = nullptr;
    unsigned n = 2, d = 2, e = 0;

    void validate() const {
        if (d < 1) throw std::invalid_argument("degree must be positive");
        if (d % F->p() == 0) throw std::invalid_argument("degree must be prime to the characteristic");
    }
};

inline std::uint64_t checked_pow(std::uint64_t b, unsigned e, std::uint64_t budget, const std::string& what) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (r > budget / b) throw BudgetExceeded(what + " exceeds budget " + std::to_string(budget));
        r *= b;
    }
    return r;
}

/// k-th powers of all a with deg a <= e, as coefficient vectors of length ke+1.
inline std::vector<std::vector<Fq>> kth_powers(const Field& F, unsigned k, unsigned e) {
    std::uint64_t count = checked_pow(F.q(), e + 1, kDefaultOracleBudget, "section space");
    std::vector<std::vector<Fq>> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Poly a = Poly::from_index(F, i, e + 1);
        Poly ak = a.pow(k);
        std::vector<Fq> c(k * e + 1, Fq{0});
        for (std::size_t j = 0; j < ak.coeffs().size(); ++j) c[j] = ak.coeffs()[j];
        out.push_back(std::move(c));
    }
    return out;
}

/// Histogram of a -> a^k on H^0(O(ke)) = F_q^{ke+1}.
inline GroupFn power_histogram(const Field& F, unsigned k, unsigned e, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    GroupFn h = GroupFn::zeros(F, k * e + 1, Domain::Counts, memory_budget);
    for (const auto& c : kth_powers(F, k, e)) h.values[h.index(c)] += 1;
    return h;
}

/// Number of s-tuples with sum of k-th powers equal to each target, by full enumeration.
inline GroupFn count_bruteforce_all(const Field& F, unsigned k, unsigned s, unsigned e, std::uint64_t budget = kDefaultOracleBudget) {
    checked_pow(F.q(), s * (e + 1), budget, "brute-force enumeration");
    auto pw = kth_powers(F, k, e);
    GroupFn out = GroupFn::zeros(F, k * e + 1);
    const unsigned len = k * e + 1;
    std::vector<std::vector<Fq>> partial(s + 1, std::vector<Fq>(len, Fq{0}));
    auto rec = [&](auto&& self, unsigned depth) -> void {
        if (depth == s) {
            out.values[out.index(partial[s])] += 1;
            return;
        }
        for (const auto& c : pw) {
            for (unsigned j = 0; j < len; ++j) partial[depth + 1][j] = F.add(partial[depth][j], c[j]);
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
    return out;
}

/// Count for one target, by full enumeration.
inline u128 count_bruteforce(const WaringInstance& inst, std::uint64_t budget = kDefaultOracleBudget) {
    inst.validate();
    const Field& F = *inst.F;
    checked_pow(F.q(), inst.s * (inst.e + 1), budget, "brute-force enumeration");
    auto pw = kth_powers(F, inst.k, inst.e);
    const unsigned len = inst.dim();
    std::vector<Fq> target(len, Fq{0});
    for (unsigned j = 0; j < len; ++j) target[j] = inst.f.coeff(j);
    std::vector<std::vector<Fq>> partial(inst.s + 1, std::vector<Fq>(len, Fq{0}));
    u128 count = 0;
    auto rec = [&](auto&& self, unsigned depth) -> void {
        if (depth + 1 == inst.s) {
            // The last power is forced: count how many equal target - partial.
            std::vector<Fq> need(len);
            for (unsigned j = 0; j < len; ++j) need[j] = F.sub(target[j], partial[depth][j]);
            for (const auto& c : pw)
                if (c == need) ++count;
            return;
        }
        for (const auto& c : pw) {
            for (unsigned j = 0; j < len; ++j) partial[depth + 1][j] = F.add(partial[depth][j], c[j]);
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
    return count;
}

/// Every count N(f), deg f <= ke, via the transform pipeline.
inline GroupFn count_all(const Field& F, unsigned k, unsigned s, unsigned e, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    return convolve_power(power_histogram(F, k, e, memory_budget), s);
}

// ---------------------------------------------------------------- morphisms P^1 -> Fermat

/// Degree-e maps to sum x_i^d = 0, by enumerating tuples of sections.
inline u128 morphism_count_direct(const FermatInstance& inst, std::uint64_t budget = kDefaultOracleBudget) {
    inst.validate();
    const Field& F = *inst.F;
    const unsigned N = inst.n + 1, e = inst.e;
    std::uint64_t per = checked_pow(F.q(), e + 1, budget, "section space");
    checked_pow(F.q(), N * (e + 1), budget, "morphism enumeration");
    std::vector<Poly> sections, powers;
    for (std::uint64_t i = 0; i < per; ++i) {
        sections.push_back(Poly::from_index(F, i, e + 1));
        powers.push_back(sections.back().pow(inst.d));
    }
    std::vector<std::size_t> pick(N, 0);
    u128 total = 0;
    std::vector<Poly> sum_prefix(N + 1, Poly(F));
    auto rec = [&](auto&& self, unsigned depth) -> void {
        if (depth == N) {
            if (!sum_prefix[N].is_zero()) return;
            bool top = false;
            Poly g(F);
            for (unsigned i = 0; i < N; ++i) {
                const Poly& a = sections[pick[i]];
                if (a.coeff(e).v != 0) top = true;
                g = gcd(g, a);
            }
            if (!top || g.is_zero() || g.deg() != 0) return;
            ++total;
            return;
        }
        for (std::size_t i = 0; i < per; ++i) {
            pick[depth] = i;
            sum_prefix[depth + 1] = sum_prefix[depth] + powers[i];
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
    if (total % (F.q() - 1) != 0) throw ConsistencyFailure("morphism tuple count not divisible by q-1");
    return total / (F.q() - 1);
}

/// sum of mu(D) over squarefree finite D of each degree j <= e (coefficients of prod_v (1 - x^deg v)).
inline std::vector<Int> squarefree_moebius_sums(const Field& F, unsigned e) {
    std::vector<Int> c(e + 1, 0);
    c[0] = 1;
    if (e == 0) return c;
    for (const auto& v : places_up_to(F, static_cast<int>(e), false)) {
        auto dv = static_cast<unsigned>(v.degree);
        for (unsigned j = e + 1; j-- > dv;) c[j] -= c[j - dv];
    }
    return c;
}

struct MoebiusBreakdown {
    std::vector<Int> moebius_sums;        // by finite degree
    std::vector<u128> zero_counts;        // N_{e'}(0), e' = 0..e
    Int numerator;                        // before division by q-1
    u128 value = 0;
};

/// Degree-e maps to the Fermat hypersurface by Moebius inversion over divisors of P^1.
inline MoebiusBreakdown morphism_count_moebius_detail(const FermatInstance& inst, std::uint64_t memory_budget = kDefaultMemoryBudget) {
    inst.validate();
    const Field& F = *inst.F;
    const unsigned e = inst.e;
    MoebiusBreakdown out;
    out.moebius_sums = squarefree_moebius_sums(F, e);
    for (unsigned ep = 0; ep <= e; ++ep) {
        GroupFn N = count_all(F, inst.d, inst.n + 1, ep, memory_budget);
        out.zero_counts.push_back(N.values[0]);
    }
    Int acc = 0;
    for (unsigned j = 0; j <= e; ++j) {
        for (unsigned eps = 0; eps <= 1; ++eps) {
            if (j + eps > e) {
                // Sections of negative degree: only the zero tuple, bracket vanishes.
                continue;
            }
            Int bracket = from_u128(out.zero_counts[e - j - eps]) - 1;
            Int term = out.moebius_sums[j] * bracket;
            acc += eps ? -term : term;
        }
    }
    out.numerator = acc;
    if (acc < 0 || acc % (F.q() - 1) != 0) throw ConsistencyFailure("Moebius sum is not a nonnegative multiple of q-1");
    out.value = to_u128(acc / (F.q() - 1));
    return out;
}

inline u128 morphism_count_moebius(const FermatInstance& inst) { return morphism_count_moebius_detail(inst).value; }

/// #X(F_Q) for X: sum_{i=0}^n x_i^d = 0 in P^n.
inline Int fermat_point_count(unsigned n, unsigned d, const Field& FQ, std::uint64_t budget = kDefaultOracleBudget) {
    const std::uint64_t Q = FQ.q();
    checked_pow(Q, n + 1, budget, "projective point enumeration");
    std::vector<Fq> pw(Q);
    for (std::uint64_t x = 0; x < Q; ++x) pw[x] = FQ.pow(Fq{static_cast<std::uint32_t>(x)}, d);
    // Histogram of partial sums, one coordinate at a time.
    std::vector<Int> hist(Q, 0);
    hist[0] = 1;
    for (unsigned i = 0; i <= n; ++i) {
        std::vector<Int> next(Q, 0);
        for (std::uint64_t s = 0; s < Q; ++s) {
            if (hist[s] == 0) continue;
            for (std::uint64_t x = 0; x < Q; ++x) next[FQ.add(Fq{static_cast<std::uint32_t>(s)}, pw[x]).v] += hist[s];
        }
        hist.swap(next);
    }
    Int affine = hist[0] - 1;
    if (affine % (Q - 1) != 0) throw ConsistencyFailure("affine cone count not divisible by Q-1");
    return affine / (Q - 1);
}

}  // namespace wfl
