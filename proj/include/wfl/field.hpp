#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wfl {

/// Element of a finite field, stored as the mixed-radix index of its
/// coordinate vector in the polynomial basis (coordinate 0 least significant).
struct Fq {
    std::uint32_t v = 0;
    constexpr auto operator<=>(const Fq&) const = default;
};

struct FieldSpec {
    std::uint32_t p = 2;
    std::uint32_t f = 1;
    std::vector<std::uint32_t> modulus;  // monic, lowest degree first, length f + 1
    std::uint32_t q = 2;
};

inline constexpr std::uint32_t kMaxFieldSize = 1u << 16;

namespace detail {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Dense polynomials over Z/p used only while building field tables.
using PPoly = std::vector<std::uint32_t>;

inline void ptrim(PPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline PPoly pmulmod(const PPoly& a, const PPoly& b, const PPoly& m, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint64_t> r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + std::uint64_t(a[i]) * b[j]) % p;
    PPoly out(r.begin(), r.end());
    std::size_t dm = m.size() - 1;
    for (std::size_t i = out.size(); i-- > dm;) {
        std::uint32_t c = out[i];
        if (!c) continue;
        for (std::size_t j = 0; j <= dm; ++j)
            out[i - dm + j] = static_cast<std::uint32_t>((out[i - dm + j] + std::uint64_t(p - c) * m[j]) % p);
    }
    out.resize(std::min(out.size(), dm));
    ptrim(out);
    return out;
}

inline PPoly pmod(PPoly a, const PPoly& m, std::uint32_t p) {
    ptrim(a);
    std::size_t dm = m.size() - 1;
    std::uint64_t inv_lead = 1;
    {
        std::uint64_t b = m.back(), e = p - 2;
        while (e) {
            if (e & 1) inv_lead = inv_lead * b % p;
            b = b * b % p;
            e >>= 1;
        }
    }
    while (a.size() > dm) {
        std::uint64_t c = a.back() * inv_lead % p;
        std::size_t shift = a.size() - 1 - dm;
        for (std::size_t j = 0; j <= dm; ++j)
            a[shift + j] = static_cast<std::uint32_t>((a[shift + j] + (p - c) * m[j]) % p);
        ptrim(a);
    }
    return a;
}

inline PPoly pgcd(PPoly a, PPoly b, std::uint32_t p) {
    ptrim(a);
    ptrim(b);
    while (!b.empty()) {
        PPoly r = pmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline PPoly ppow_x(std::uint64_t e, const PPoly& m, std::uint32_t p) {
    PPoly result{1}, base{0, 1};
    base = pmod(base, m, p);
    while (e) {
        if (e & 1) result = pmulmod(result, base, m, p);
        base = pmulmod(base, base, m, p);
        e >>= 1;
    }
    return result;
}

// Rabin's test for a monic polynomial of degree f over Z/p.
inline bool irreducible_mod_p(const PPoly& m, std::uint32_t p) {
    std::size_t f = m.size() - 1;
    if (f == 1) return true;
    auto x_pow_pk = [&](std::size_t k) {
        PPoly r{0, 1};
        for (std::size_t i = 0; i < k; ++i) {
            // r <- r^p mod m
            PPoly acc{1}, b = r;
            std::uint64_t e = p;
            while (e) {
                if (e & 1) acc = pmulmod(acc, b, m, p);
                b = pmulmod(b, b, m, p);
                e >>= 1;
            }
            r = acc;
        }
        return r;
    };
    PPoly full = x_pow_pk(f);
    PPoly xm{0, 1};
    if (pmod(full, m, p) != pmod(xm, m, p)) return false;
    for (std::size_t r = 2; r <= f; ++r) {
        if (f % r != 0 || !is_prime(r)) continue;
        PPoly t = x_pow_pk(f / r);
        t.resize(std::max<std::size_t>(t.size(), 2), 0);
        t[1] = (t[1] + p - 1) % p;
        ptrim(t);
        PPoly g = pgcd(m, t, p);
        if (g.size() != 1) return false;
    }
    return true;
}

}  // namespace detail

/// Lexicographically least monic irreducible of degree f over Z/p,
/// comparing coefficient vectors from the constant term upward.
inline std::vector<std::uint32_t> least_irreducible(std::uint32_t p, std::uint32_t f) {
    if (f == 1) return {0, 1};
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < f; ++i) total *= p;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        // idx enumerates (c_0, ..., c_{f-1}) with c_0 most significant.
        detail::PPoly m(f + 1, 0);
        std::uint64_t t = idx;
        for (std::uint32_t i = f; i-- > 0;) {
            m[i] = static_cast<std::uint32_t>(t % p);
            t /= p;
        }
        m[f] = 1;
        if (m[0] == 0) continue;
        if (detail::irreducible_mod_p(m, p)) return m;
    }
    throw std::logic_error("no irreducible polynomial found");
}

/// Finite field F_q, q = p^f. Instances are interned per (p, f) and never
/// destroyed, so plain pointers and references to them stay valid.
class Field {
public:
    static const Field& get(std::uint32_t p, std::uint32_t f = 1) {
        static std::mutex mu;
        static std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<Field>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(p, f);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
        auto field = std::unique_ptr<Field>(new Field(p, f));
        auto& ref = *field;
        cache.emplace(key, std::move(field));
        return ref;
    }

    static const Field& get(const FieldSpec& spec) {
        const Field& F = get(spec.p, spec.f);
        if (spec.f > 1 && !spec.modulus.empty() && spec.modulus != F.spec_.modulus)
            throw std::invalid_argument("only the least irreducible modulus is supported");
        return F;
    }

    /// Field of size q; q must be a prime power.
    static const Field& of_size(std::uint32_t q) {
        for (std::uint32_t p = 2; p <= q; ++p) {
            if (!detail::is_prime(p) || q % p) continue;
            std::uint32_t f = 0, t = q;
            while (t % p == 0) {
                t /= p;
                ++f;
            }
            if (t != 1) break;
            return get(p, f);
        }
        throw std::invalid_argument("field size must be a prime power");
    }

    std::uint32_t p() const { return spec_.p; }
    std::uint32_t f() const { return spec_.f; }
    std::uint32_t q() const { return spec_.q; }
    const FieldSpec& spec() const { return spec_; }

    Fq zero() const { return Fq{0}; }
    Fq one() const { return Fq{1}; }
    Fq from_int(long long c) const {
        long long r = c % static_cast<long long>(spec_.p);
        if (r < 0) r += spec_.p;
        return Fq{static_cast<std::uint32_t>(r)};
    }
    Fq element(std::uint32_t index) const { return Fq{index}; }

    std::vector<std::uint32_t> digits(Fq a) const {
        std::vector<std::uint32_t> d(spec_.f);
        for (std::uint32_t i = 0; i < spec_.f; ++i) {
            d[i] = a.v % spec_.p;
            a.v /= spec_.p;
        }
        return d;
    }
    Fq from_digits(const std::vector<std::uint32_t>& d) const {
        std::uint32_t v = 0;
        for (std::size_t i = d.size(); i-- > 0;) v = v * spec_.p + d[i] % spec_.p;
        return Fq{v};
    }

    Fq add(Fq a, Fq b) const {
        if (spec_.f == 1) {
            std::uint32_t s = a.v + b.v;
            return Fq{s >= spec_.p ? s - spec_.p : s};
        }
        if (!add_table_.empty()) return Fq{add_table_[std::size_t(a.v) * spec_.q + b.v]};
        std::uint32_t r = 0, mul = 1;
        for (std::uint32_t i = 0; i < spec_.f; ++i) {
            std::uint32_t s = a.v % spec_.p + b.v % spec_.p;
            if (s >= spec_.p) s -= spec_.p;
            r += s * mul;
            mul *= spec_.p;
            a.v /= spec_.p;
            b.v /= spec_.p;
        }
        return Fq{r};
    }
    Fq neg(Fq a) const { return Fq{neg_[a.v]}; }
    Fq sub(Fq a, Fq b) const { return add(a, neg(b)); }
    Fq mul(Fq a, Fq b) const {
        if (spec_.f == 1) return Fq{static_cast<std::uint32_t>(std::uint64_t(a.v) * b.v % spec_.p)};
        if (a.v == 0 || b.v == 0) return Fq{0};
        return Fq{exp_[log_[a.v] + log_[b.v]]};
    }
    Fq inv(Fq a) const {
        if (a.v == 0) throw std::domain_error("inverse of zero");
        if (spec_.f == 1) return Fq{inv_prime_[a.v]};
        return Fq{exp_[(spec_.q - 1 - log_[a.v]) % (spec_.q - 1)]};
    }
    Fq div(Fq a, Fq b) const { return mul(a, inv(b)); }
    Fq pow(Fq a, std::uint64_t e) const {
        Fq r = one();
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    /// Absolute trace to F_p, returned as an integer in [0, p).
    std::uint32_t trace(Fq a) const { return trace_[a.v]; }

    /// A fixed generator of the multiplicative group.
    Fq generator() const { return Fq{generator_}; }

    /// Index of the dual element under the digit pairing that realizes
    /// x -> Tr(a x): Tr(a x) = sum_j beta_j(a) * digit_j(x) mod p.
    std::uint32_t trace_dual(Fq a) const { return trace_dual_[a.v]; }

private:
    Field(std::uint32_t p, std::uint32_t f) {
        if (!detail::is_prime(p)) throw std::invalid_argument("characteristic must be prime");
        if (f < 1) throw std::invalid_argument("extension degree must be positive");
        std::uint64_t q = 1;
        for (std::uint32_t i = 0; i < f; ++i) {
            q *= p;
            if (q > kMaxFieldSize) throw std::length_error("field size exceeds 2^16");
        }
        spec_.p = p;
        spec_.f = f;
        spec_.q = static_cast<std::uint32_t>(q);
        spec_.modulus = least_irreducible(p, f);
        build();
    }

    void build() {
        const std::uint32_t p = spec_.p, q = spec_.q, f = spec_.f;
        neg_.resize(q);
        for (std::uint32_t a = 0; a < q; ++a) {
            auto d = digits(Fq{a});
            for (auto& x : d) x = (p - x) % p;
            neg_[a] = from_digits(d).v;
        }
        if (f == 1) {
            inv_prime_.assign(p, 0);
            for (std::uint32_t a = 1; a < p; ++a)
                for (std::uint32_t b = 1; b < p; ++b)
                    if (std::uint64_t(a) * b % p == 1) {
                        inv_prime_[a] = b;
                        break;
                    }
        } else if (q <= 1024) {
            add_table_.resize(std::size_t(q) * q);
            for (std::uint32_t a = 0; a < q; ++a)
                for (std::uint32_t b = 0; b < q; ++b) {
                    std::uint32_t r = 0, mul = 1, x = a, y = b;
                    for (std::uint32_t i = 0; i < f; ++i) {
                        r += ((x % p + y % p) % p) * mul;
                        mul *= p;
                        x /= p;
                        y /= p;
                    }
                    add_table_[std::size_t(a) * q + b] = static_cast<std::uint16_t>(r);
                }
        }
        // Multiplicative structure: search a generator in index order.
        auto to_poly = [&](std::uint32_t a) {
            detail::PPoly d = digits(Fq{a});
            detail::ptrim(d);
            return d;
        };
        auto to_index = [&](const detail::PPoly& d) {
            std::vector<std::uint32_t> dd(f, 0);
            for (std::size_t i = 0; i < d.size(); ++i) dd[i] = d[i];
            return from_digits(dd).v;
        };
        std::vector<std::uint32_t> powers;
        for (std::uint32_t g = 1; g < q; ++g) {
            powers.assign(1, 1);
            detail::PPoly cur{1}, gp = to_poly(g);
            bool ok = true;
            for (std::uint32_t i = 1; i < q - 1; ++i) {
                cur = f == 1 ? detail::PPoly{static_cast<std::uint32_t>(std::uint64_t(cur[0]) * g % p)}
                             : detail::pmulmod(cur, gp, spec_.modulus, p);
                std::uint32_t idx = to_index(cur);
                if (idx == 1) {
                    ok = false;
                    break;
                }
                powers.push_back(idx);
            }
            if (ok) {
                generator_ = g;
                break;
            }
        }
        if (q == 2) generator_ = 1;
        exp_.assign(2 * (q - 1) + 1, 0);
        log_.assign(q, 0);
        for (std::uint32_t i = 0; i + 1 < q; ++i) {
            exp_[i] = powers[i];
            exp_[i + q - 1] = powers[i];
            log_[powers[i]] = i;
        }
        // Trace: sum of Frobenius conjugates, lands in the prime field.
        trace_.assign(q, 0);
        for (std::uint32_t a = 0; a < q; ++a) {
            Fq x{a}, acc{0};
            for (std::uint32_t i = 0; i < f; ++i) {
                acc = add(acc, x);
                x = pow(x, p);
            }
            if (acc.v >= p) throw std::logic_error("trace left the prime field");
            trace_[a] = acc.v;
        }
        // beta(a)_j = Tr(a t^j) where t^j is the j-th basis element.
        trace_dual_.assign(q, 0);
        std::vector<Fq> basis(f);
        for (std::uint32_t j = 0; j < f; ++j) {
            std::uint32_t v = 1;
            for (std::uint32_t i = 0; i < j; ++i) v *= p;
            basis[j] = Fq{v};
        }
        for (std::uint32_t a = 0; a < q; ++a) {
            std::vector<std::uint32_t> beta(f);
            for (std::uint32_t j = 0; j < f; ++j) beta[j] = trace(mul(Fq{a}, basis[j]));
            trace_dual_[a] = from_digits(beta).v;
        }
    }

    FieldSpec spec_;
    std::vector<std::uint32_t> neg_, inv_prime_, exp_, log_, trace_, trace_dual_;
    std::vector<std::uint16_t> add_table_;
    std::uint32_t generator_ = 1;
};

/// Embedding F_q -> F_{q^m}, realized inside the interned field of degree f*m.
struct Extension {
    const Field* base = nullptr;
    const Field* big = nullptr;
    unsigned degree = 1;
    std::vector<Fq> embedding;  // indexed by base element

    Fq operator()(Fq x) const { return embedding[x.v]; }
};

inline Extension extend_field(const Field& F, unsigned m) {
    if (m < 1) throw std::invalid_argument("extension degree must be positive");
    std::uint64_t big_q = 1;
    for (unsigned i = 0; i < m; ++i) {
        big_q *= F.q();
        if (big_q > kMaxFieldSize) throw std::length_error("extension exceeds the field size budget");
    }
    Extension ext;
    ext.base = &F;
    ext.degree = m;
    ext.big = &Field::get(F.p(), F.f() * m);
    const Field& B = *ext.big;
    // Image of the base generator t: the least root of the base modulus in B.
    Fq theta{0};
    if (F.f() == 1) {
        theta = B.one();
    } else {
        const auto& mod = F.spec().modulus;
        bool found = false;
        for (std::uint32_t c = 0; c < B.q() && !found; ++c) {
            Fq acc{0}, xp = B.one();
            for (auto coef : mod) {
                acc = B.add(acc, B.mul(B.from_int(coef), xp));
                xp = B.mul(xp, Fq{c});
            }
            if (acc.v == 0) {
                theta = Fq{c};
                found = true;
            }
        }
        if (!found) throw std::logic_error("base modulus has no root in the extension");
    }
    ext.embedding.resize(F.q());
    for (std::uint32_t a = 0; a < F.q(); ++a) {
        if (F.f() == 1) {
            ext.embedding[a] = B.from_int(a);
            continue;
        }
        auto d = F.digits(Fq{a});
        Fq acc{0}, tp = B.one();
        for (auto c : d) {
            acc = B.add(acc, B.mul(B.from_int(c), tp));
            tp = B.mul(tp, theta);
        }
        ext.embedding[a] = acc;
    }
    return ext;
}

inline void to_json(nlohmann::json& j, const FieldSpec& s) {
    j = nlohmann::json{{"p", s.p}, {"f", s.f}, {"modulus", s.f == 1 ? std::vector<std::uint32_t>{} : s.modulus}};
}

inline void from_json(const nlohmann::json& j, FieldSpec& s) {
    s.p = j.at("p").get<std::uint32_t>();
    s.f = j.value("f", 1u);
    s.modulus = j.value("modulus", std::vector<std::uint32_t>{});
    s.q = 1;
    for (std::uint32_t i = 0; i < s.f; ++i) s.q *= s.p;
}

}  // namespace wfl
