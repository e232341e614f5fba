#pragma once

// Brute-force references, written independently of the library routes they check.

#include <wfl/group_fourier.hpp>
#include <wfl/poly.hpp>

#include <vector>

namespace wfl::oracle {

// Direct s-fold convolution, O(N^2) per step.
inline GroupFn naive_power(const GroupFn& h, unsigned s) {
    const Field& F = *h.F;
    GroupFn cur = h;
    for (unsigned t = 1; t < s; ++t) {
        GroupFn next = GroupFn::zeros(F, h.n);
        for (std::size_t x = 0; x < h.size(); ++x) {
            if (!cur.values[x]) continue;
            auto cx = cur.coords(x);
            for (std::size_t y = 0; y < h.size(); ++y) {
                if (!h.values[y]) continue;
                auto cy = h.coords(y);
                std::vector<Fq> z(h.n);
                for (unsigned i = 0; i < h.n; ++i) z[i] = F.add(cx[i], cy[i]);
                next.values[next.index(z)] += cur.values[x] * h.values[y];
            }
        }
        cur = next;
    }
    return cur;
}

// #{(b_1..b_s) in (F_p[T]/(T^r))^s : sum b_i^k = f mod T^r} by listing tuples.
inline Int naive_local_count(unsigned p, unsigned s, unsigned k, int r, const std::vector<unsigned>& f) {
    const Field& F = Field::get(p);
    const Poly mod = Poly::monomial(F, static_cast<unsigned>(r), F.one());
    std::uint64_t per = 1;
    for (int i = 0; i < r; ++i) per *= p;
    std::vector<Poly> pw;
    for (std::uint64_t i = 0; i < per; ++i) pw.push_back(Poly::from_index(F, i, static_cast<unsigned>(r)).pow(k) % mod);
    std::uint64_t total = 1;
    for (unsigned i = 0; i < s; ++i) total *= per;
    Poly target = Poly::from_ints(F, f) % mod;
    Int n = 0;
    for (std::uint64_t t = 0; t < total; ++t) {
        Poly acc(F);
        std::uint64_t v = t;
        for (unsigned i = 0; i < s; ++i) {
            acc += pw[v % per];
            v /= per;
        }
        if (acc % mod == target) ++n;
    }
    return n;
}

}  // namespace wfl::oracle
