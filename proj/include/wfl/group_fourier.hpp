#pragma once

#include "cyclotomic.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "parallel.hpp"
#include "rational.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace wfl {

enum class Domain : std::uint32_t { Counts = 0, Residues = 1, Cyclotomic = 2 };

inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t(4) << 30;

/// Function on F_q^n. Index is the mixed-radix expansion of the coordinate
/// vector (coordinate 0 least significant), which is also the pure base-p
/// expansion over all f*n digits.
struct GroupFn {
    const Field* F = nullptr;
    unsigned n = 0;
    Domain domain = Domain::Counts;
    std::uint64_t modulus = 0;  // transform prime when domain == Residues
    std::vector<u128> values;

    static std::uint64_t size_for(const Field& F, unsigned n, std::uint64_t memory_budget = kDefaultMemoryBudget) {
        std::uint64_t N = 1;
        for (unsigned i = 0; i < n; ++i) {
            N *= F.q();
            if (N * 48 > memory_budget) throw BudgetExceeded("group of size q^" + std::to_string(n) + " exceeds the memory budget");
        }
        return N;
    }
    static GroupFn zeros(const Field& F, unsigned n, Domain d = Domain::Counts, std::uint64_t memory_budget = kDefaultMemoryBudget) {
        GroupFn g;
        g.F = &F;
        g.n = n;
        g.domain = d;
        g.values.assign(size_for(F, n, memory_budget), 0);
        return g;
    }

    std::size_t size() const { return values.size(); }
    std::vector<Fq> coords(std::uint64_t idx) const {
        std::vector<Fq> c(n);
        for (unsigned i = 0; i < n; ++i) {
            c[i] = Fq{static_cast<std::uint32_t>(idx % F->q())};
            idx /= F->q();
        }
        return c;
    }
    std::uint64_t index(const std::vector<Fq>& c) const {
        if (c.size() != n) throw std::invalid_argument("coordinate vector has wrong length");
        std::uint64_t idx = 0;
        for (std::size_t i = c.size(); i-- > 0;) idx = idx * F->q() + c[i].v;
        return idx;
    }
    u128 total() const {
        u128 s = 0;
        for (auto v : values) {
            if (s + v < s) throw std::overflow_error("total mass exceeds 128 bits");
            s += v;
        }
        return s;
    }
};

// ---------------------------------------------------------------- primes

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline bool miller_rabin(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t sp : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (n % sp == 0) return n == sp;
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

}  // namespace detail

/// Prime P = 1 mod p with a fixed element of exact order p.
struct TransformPrime {
    std::uint64_t P = 0;
    std::uint64_t omega = 0;
    unsigned p = 0;

    static TransformPrime make(std::uint64_t P, unsigned p) {
        if (!detail::miller_rabin(P)) throw std::invalid_argument("transform modulus is not prime");
        if ((P - 1) % p != 0) throw std::invalid_argument("transform prime has no element of order p");
        if (P >= (std::uint64_t(1) << 56)) throw std::invalid_argument("transform prime too large");
        for (std::uint64_t g = 2; g < P; ++g) {
            std::uint64_t w = detail::powmod(g, (P - 1) / p, P);
            if (w != 1) return TransformPrime{P, w, p};
        }
        throw std::logic_error("no element of order p");
    }
};

/// Smallest primes = 1 mod p above 2^50, skipping the first `skip`, until
/// their product exceeds `bound`.
inline std::vector<TransformPrime> select_primes(unsigned p, const Int& bound, unsigned skip = 0) {
    std::vector<TransformPrime> out;
    std::uint64_t start = (std::uint64_t(1) << 50) + 1;
    std::uint64_t cand = start + (p - (start - 1) % p) % p;  // smallest value > 2^50 that is 1 mod p
    if (cand % p != 1 % p) throw std::logic_error("prime search misaligned");
    Int prod = 1;
    unsigned skipped = 0;
    for (; prod <= bound; cand += p) {
        if (p == 2 && cand % 2 == 0) continue;
        if (!detail::miller_rabin(cand)) continue;
        if (skipped < skip) {
            ++skipped;
            continue;
        }
        out.push_back(TransformPrime::make(cand, p));
        prod *= cand;
        if (out.size() > 64) throw BudgetExceeded("CRT would need more than 64 transform primes");
    }
    return out;
}

// ---------------------------------------------------------------- transforms

enum class Direction { Forward, Inverse };

namespace detail {

// In-place length-p DFT along every base-p digit, pairing sum_a y_a x_a.
inline void digit_dft(std::vector<std::uint64_t>& a, unsigned p, unsigned axes, std::uint64_t P, std::uint64_t w) {
    std::vector<std::uint64_t> wp(p);
    wp[0] = 1;
    for (unsigned j = 1; j < p; ++j) wp[j] = mulmod(wp[j - 1], w, P);
    const std::size_t N = a.size();
    std::size_t stride = 1;
    for (unsigned ax = 0; ax < axes; ++ax) {
        const std::size_t lines = N / p;
        parallel_for(lines, [&, stride](std::size_t line) {
            std::size_t outer = line / stride, inner = line % stride;
            std::size_t base = outer * stride * p + inner;
            std::array<std::uint64_t, 64> in{};
            std::vector<std::uint64_t> big;
            std::uint64_t* buf = in.data();
            if (p > in.size()) {
                big.resize(p);
                buf = big.data();
            }
            for (unsigned x = 0; x < p; ++x) buf[x] = a[base + x * stride];
            for (unsigned b = 0; b < p; ++b) {
                u128 acc = 0;
                unsigned e = 0;
                for (unsigned x = 0; x < p; ++x) {
                    acc += static_cast<u128>(buf[x]) * wp[e];
                    e += b;
                    if (e >= p) e -= p;
                }
                a[base + b * stride] = static_cast<std::uint64_t>(acc % P);
            }
        });
        stride *= p;
    }
}

// Index map beta -> tau(beta), tau applying the trace dual on each coordinate.
inline std::vector<std::uint32_t> coordinate_map(const Field& F, bool inverse) {
    std::vector<std::uint32_t> per(F.q());
    for (std::uint32_t a = 0; a < F.q(); ++a) {
        if (inverse)
            per[F.trace_dual(Fq{a})] = a;
        else
            per[a] = F.trace_dual(Fq{a});
    }
    return per;
}

inline std::uint64_t map_index(std::uint64_t idx, const std::vector<std::uint32_t>& per, std::uint32_t q, unsigned n) {
    std::uint64_t out = 0, mul = 1;
    for (unsigned i = 0; i < n; ++i) {
        out += per[idx % q] * mul;
        idx /= q;
        mul *= q;
    }
    return out;
}

}  // namespace detail

/// Forward: F(beta) = sum_x fn(x) omega^{Tr(beta . x)}. Inverse uses omega^{-1}
/// and no normalization, so inverse(forward(fn)) = q^n fn.
inline GroupFn transform(const GroupFn& fn, const TransformPrime& prime, Direction dir) {
    const Field& F = *fn.F;
    if (prime.p != F.p()) throw std::invalid_argument("transform prime built for a different characteristic");
    std::vector<std::uint64_t> a(fn.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<std::uint64_t>(fn.values[i] % prime.P);
    const unsigned axes = F.f() * fn.n;
    const bool trivial_dual = F.f() == 1;
    GroupFn out = fn;
    out.domain = Domain::Residues;
    out.modulus = prime.P;
    if (dir == Direction::Forward) {
        detail::digit_dft(a, F.p(), axes, prime.P, prime.omega);
        if (trivial_dual) {
            for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a[i];
        } else {
            auto per = detail::coordinate_map(F, false);
            for (std::size_t b = 0; b < a.size(); ++b) out.values[b] = a[detail::map_index(b, per, F.q(), fn.n)];
        }
    } else {
        if (!trivial_dual) {
            auto per = detail::coordinate_map(F, false);
            std::vector<std::uint64_t> d(a.size());
            for (std::size_t b = 0; b < a.size(); ++b) d[detail::map_index(b, per, F.q(), fn.n)] = a[b];
            a.swap(d);
        }
        detail::digit_dft(a, F.p(), axes, prime.P, detail::powmod(prime.omega, F.p() - 1, prime.P));
        for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a[i];
    }
    return out;
}

/// Garner reconstruction of a value < 2^128 from residues; throws when the
/// residues are inconsistent with any such value.
class Crt {
public:
    explicit Crt(std::vector<TransformPrime> primes) : primes_(std::move(primes)) {
        const std::size_t k = primes_.size();
        inv_.assign(k, 0);
        prefix_.assign(k, 0);
        prefix_fits_.assign(k, false);
        u128 m = 1;
        bool fits = true;
        for (std::size_t i = 0; i < k; ++i) {
            prefix_[i] = m;
            prefix_fits_[i] = fits;
            std::uint64_t Pi = primes_[i].P;
            // prod_{j<i} P_j mod P_i
            std::uint64_t mm = 1;
            for (std::size_t j = 0; j < i; ++j) mm = detail::mulmod(mm, primes_[j].P % Pi, Pi);
            inv_[i] = detail::powmod(mm, Pi - 2, Pi);
            if (fits) {
                u128 next = m * Pi;
                if (next / Pi != m) fits = false;
                m = next;
            }
        }
    }
    u128 reconstruct(const std::vector<std::uint64_t>& r) const {
        u128 x = 0;
        for (std::size_t i = 0; i < primes_.size(); ++i) {
            std::uint64_t Pi = primes_[i].P;
            std::uint64_t xm = static_cast<std::uint64_t>(x % Pi);
            std::uint64_t diff = (r[i] + Pi - xm) % Pi;
            std::uint64_t c = detail::mulmod(diff, inv_[i], Pi);
            if (c == 0) continue;
            if (!prefix_fits_[i]) throw ConsistencyFailure("CRT value exceeds 128 bits (negative or overflowing count)");
            u128 add = prefix_[i] * c;
            if (add / c != prefix_[i] || x + add < x) throw ConsistencyFailure("CRT value exceeds 128 bits (negative or overflowing count)");
            x += add;
        }
        return x;
    }
    const std::vector<TransformPrime>& primes() const { return primes_; }

private:
    std::vector<TransformPrime> primes_;
    std::vector<std::uint64_t> inv_;
    std::vector<u128> prefix_;
    std::vector<bool> prefix_fits_;
};

/// Certified bound used for prime selection: (sum hist)^s * q^n * 4.
inline Int convolution_bound(const GroupFn& hist, unsigned s) {
    return ipow(from_u128(hist.total()), s) * ipow(Int(hist.F->q()), hist.n) * 4;
}

/// s-fold additive self-convolution of a count histogram, exact.
inline GroupFn convolve_power(const GroupFn& hist, unsigned s, std::vector<TransformPrime> primes = {}) {
    if (hist.domain != Domain::Counts) throw std::invalid_argument("convolve_power needs a count histogram");
    if (s == 0) throw std::invalid_argument("exponent must be positive");
    const Int total = from_u128(hist.total());
    const Int mass = ipow(total, s);
    if (msb_or_zero(mass) >= 127) throw BudgetExceeded("counts would exceed 128 bits: need " + std::to_string(msb_or_zero(mass) + 1) + " bits");
    if (s == 1) return hist;
    const Int bound = convolution_bound(hist, s);
    if (primes.empty()) primes = select_primes(hist.F->p(), bound);
    Int prod = 1;
    for (const auto& tp : primes) prod *= tp.P;
    if (prod <= bound)
        throw BudgetExceeded("CRT modulus has " + std::to_string(msb_or_zero(prod) + 1) + " bits; need more than " +
                             std::to_string(msb_or_zero(bound) + 1));

    const std::size_t N = hist.size();
    std::vector<std::vector<std::uint64_t>> res(primes.size());
    for (std::size_t k = 0; k < primes.size(); ++k) {
        const auto& tp = primes[k];
        GroupFn fwd = transform(hist, tp, Direction::Forward);
        for (auto& v : fwd.values) v = detail::powmod(static_cast<std::uint64_t>(v), s, tp.P);
        GroupFn back = transform(fwd, tp, Direction::Inverse);
        std::uint64_t ninv = detail::powmod(N % tp.P, tp.P - 2, tp.P);
        res[k].resize(N);
        for (std::size_t i = 0; i < N; ++i) res[k][i] = detail::mulmod(static_cast<std::uint64_t>(back.values[i]), ninv, tp.P);
    }
    Crt crt(primes);
    const u128 cap = to_u128(mass);
    GroupFn out = hist;
    std::vector<std::uint64_t> r(primes.size());
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t k = 0; k < primes.size(); ++k) r[k] = res[k][i];
        u128 v = crt.reconstruct(r);
        if (v > cap) throw ConsistencyFailure("convolution entry exceeds total mass: negative count after CRT");
        out.values[i] = v;
    }
    require(from_u128(out.total()) == mass, "convolution does not preserve total mass");
    return out;
}

// ---------------------------------------------------------------- exact character sums

/// sum_x hist(x) psi(<alpha, x>) for a single alpha, by direct summation.
inline Cyclotomic dual_value(const GroupFn& hist, const std::vector<Fq>& alpha) {
    const Field& F = *hist.F;
    if (alpha.size() != hist.n) throw std::invalid_argument("dual vector has wrong dimension");
    std::vector<Rational> bins(F.p(), Rational(0));
    std::vector<Int> ib(F.p(), 0);
    for (std::size_t idx = 0; idx < hist.size(); ++idx) {
        if (hist.values[idx] == 0) continue;
        std::uint64_t t = idx;
        Fq acc{0};
        for (unsigned i = 0; i < hist.n; ++i) {
            acc = F.add(acc, F.mul(alpha[i], Fq{static_cast<std::uint32_t>(t % F.q())}));
            t /= F.q();
        }
        ib[F.trace(acc)] += from_u128(hist.values[idx]);
    }
    for (unsigned j = 0; j < F.p(); ++j) bins[j] = Rational(ib[j]);
    return Cyclotomic::from_bins(F.p(), bins);
}

/// Table of Z[zeta_p] values, one length-p bin vector per group element.
/// Entry beta holds sum_j bins[j] zeta^j.
struct CycloTable {
    const Field* F = nullptr;
    unsigned n = 0;
    std::vector<std::int64_t> bins;  // size q^n * p

    std::size_t size() const { return bins.size() / F->p(); }
    Cyclotomic value(std::uint64_t idx) const {
        const unsigned p = F->p();
        std::vector<std::int64_t> b(bins.begin() + idx * p, bins.begin() + (idx + 1) * p);
        return Cyclotomic::from_int_bins(p, b);
    }
    /// Rational integer value of an entry known to lie in Z.
    Int integer_value(std::uint64_t idx) const {
        const unsigned p = F->p();
        const std::int64_t* b = &bins[idx * p];
        for (unsigned j = 2; j < p; ++j)
            if (b[j] != b[1]) throw ConsistencyFailure("table entry is not rational");
        return Int(b[0]) - Int(p > 1 ? b[1] : 0);
    }
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("cyclotomic table entry overflows 64 bits");
    return r;
}

// Per digit axis: out[b] = sum_x rot(in[x], sign * b * x).
inline void digit_table_dft(std::vector<std::int64_t>& t, unsigned p, unsigned axes, int sign) {
    const std::size_t N = t.size() / p;
    std::size_t stride = 1;
    std::vector<std::int64_t> buf(static_cast<std::size_t>(p) * p), out(static_cast<std::size_t>(p) * p);
    for (unsigned ax = 0; ax < axes; ++ax) {
        for (std::size_t line = 0; line < N / p; ++line) {
            std::size_t outer = line / stride, inner = line % stride;
            std::size_t base = outer * stride * p + inner;
            for (unsigned x = 0; x < p; ++x)
                for (unsigned j = 0; j < p; ++j) buf[x * p + j] = t[(base + x * stride) * p + j];
            std::fill(out.begin(), out.end(), 0);
            for (unsigned b = 0; b < p; ++b)
                for (unsigned x = 0; x < p; ++x) {
                    long long shift = (static_cast<long long>(sign) * b * x) % p;
                    if (shift < 0) shift += p;
                    for (unsigned j = 0; j < p; ++j) {
                        auto& dst = out[b * p + (j + static_cast<unsigned>(shift)) % p];
                        dst = checked_add(dst, buf[x * p + j]);
                    }
                }
            for (unsigned b = 0; b < p; ++b)
                for (unsigned j = 0; j < p; ++j) t[(base + b * stride) * p + j] = out[b * p + j];
        }
        stride *= p;
    }
}

}  // namespace detail

inline constexpr std::uint64_t kTableBudget = std::uint64_t(1) << 27;

/// All dual values at once: table[beta] = sum_x hist(x) zeta^{Tr(beta . x)}.
inline CycloTable dual_table(const GroupFn& hist) {
    const Field& F = *hist.F;
    const unsigned p = F.p();
    if (hist.size() * p > kTableBudget) throw BudgetExceeded("exact character table too large");
    CycloTable tab{hist.F, hist.n, std::vector<std::int64_t>(hist.size() * p, 0)};
    for (std::size_t i = 0; i < hist.size(); ++i) {
        if (hist.values[i] > static_cast<u128>(INT64_MAX)) throw std::overflow_error("histogram entry too large for table");
        tab.bins[i * p] = static_cast<std::int64_t>(hist.values[i]);
    }
    detail::digit_table_dft(tab.bins, p, F.f() * hist.n, +1);
    if (F.f() > 1) {
        auto per = detail::coordinate_map(F, false);
        std::vector<std::int64_t> permuted(tab.bins.size());
        for (std::size_t b = 0; b < hist.size(); ++b) {
            std::uint64_t src = detail::map_index(b, per, F.q(), hist.n);
            std::copy_n(&tab.bins[src * p], p, &permuted[b * p]);
        }
        tab.bins.swap(permuted);
    }
    return tab;
}

/// out[x] = sum_beta table[beta] zeta^{-Tr(beta . x)}, unnormalized.
inline CycloTable inverse_dual_table(CycloTable tab) {
    const Field& F = *tab.F;
    const unsigned p = F.p();
    if (F.f() > 1) {
        auto per = detail::coordinate_map(F, false);
        std::vector<std::int64_t> d(tab.bins.size());
        for (std::size_t b = 0; b < tab.size(); ++b) {
            std::uint64_t dst = detail::map_index(b, per, F.q(), tab.n);
            std::copy_n(&tab.bins[b * p], p, &d[dst * p]);
        }
        tab.bins.swap(d);
    }
    detail::digit_table_dft(tab.bins, p, F.f() * tab.n, -1);
    return tab;
}

// ---------------------------------------------------------------- binary dump

inline void write_groupfn(std::ostream& os, const GroupFn& g) {
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto put64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    os.write("WFLG", 4);
    put32(g.F->p());
    put32(g.F->f());
    put32(g.n);
    put32(static_cast<std::uint32_t>(g.domain));
    put64(g.modulus);
    put64(g.values.size());
    for (auto v : g.values) {
        if (v > UINT64_MAX) throw std::overflow_error("value does not fit the 64-bit dump format");
        put64(static_cast<std::uint64_t>(v));
    }
}

inline GroupFn read_groupfn(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "WFLG", 4) != 0) throw std::runtime_error("not a group function dump");
    auto get = [&](int bytes) {
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            int c = is.get();
            if (c == EOF) throw std::runtime_error("truncated group function dump");
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
        }
        return v;
    };
    auto p = static_cast<std::uint32_t>(get(4)), f = static_cast<std::uint32_t>(get(4)), n = static_cast<std::uint32_t>(get(4));
    auto dom = static_cast<Domain>(get(4));
    std::uint64_t mod = get(8), count = get(8);
    GroupFn g = GroupFn::zeros(Field::get(p, f), n, dom);
    if (count != g.size()) throw std::runtime_error("dump size does not match header");
    g.modulus = mod;
    for (auto& v : g.values) v = get(8);
    return g;
}

}  // namespace wfl
