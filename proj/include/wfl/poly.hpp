#pragma once

#include "field.hpp"

#include <climits>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace wfl {

/// Polynomial over F_q, coefficients lowest degree first, no trailing zeros.
class Poly {
public:
    static constexpr int kNegInfDegree = INT_MIN;

    Poly() = default;
    explicit Poly(const Field& F) : F_(&F) {}
    Poly(const Field& F, std::vector<Fq> coeffs) : F_(&F), c_(std::move(coeffs)) { trim(); }

    static Poly constant(const Field& F, Fq c) { return Poly(F, {c}); }
    static Poly monomial(const Field& F, unsigned deg, Fq c) {
        std::vector<Fq> v(deg + 1, Fq{0});
        v[deg] = c;
        return Poly(F, std::move(v));
    }
    static Poly x(const Field& F) { return monomial(F, 1, F.one()); }
    static Poly from_ints(const Field& F, const std::vector<std::uint32_t>& idx) {
        std::vector<Fq> v;
        v.reserve(idx.size());
        for (auto i : idx) {
            if (i >= F.q()) throw std::invalid_argument("coefficient index out of range");
            v.push_back(Fq{i});
        }
        return Poly(F, std::move(v));
    }
    /// Mixed-radix index: coefficient 0 is the least significant digit base q.
    static Poly from_index(const Field& F, std::uint64_t idx, unsigned len) {
        std::vector<Fq> v(len);
        for (unsigned i = 0; i < len; ++i) {
            v[i] = Fq{static_cast<std::uint32_t>(idx % F.q())};
            idx /= F.q();
        }
        return Poly(F, std::move(v));
    }
    std::uint64_t to_index(unsigned len) const {
        if (c_.size() > len) throw std::length_error("polynomial longer than index length");
        std::uint64_t idx = 0;
        for (std::size_t i = c_.size(); i-- > 0;) idx = idx * field().q() + c_[i].v;
        return idx;
    }

    const Field& field() const {
        if (!F_) throw std::logic_error("polynomial without field");
        return *F_;
    }
    const Field* field_ptr() const { return F_; }
    const std::vector<Fq>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int deg() const { return c_.empty() ? kNegInfDegree : static_cast<int>(c_.size()) - 1; }
    Fq coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Fq{0}; }
    Fq lead() const { return c_.empty() ? Fq{0} : c_.back(); }
    std::vector<std::uint32_t> to_ints() const {
        std::vector<std::uint32_t> v;
        for (auto x : c_) v.push_back(x.v);
        return v;
    }

    Poly operator+(const Poly& o) const {
        const Field& F = common(o);
        std::vector<Fq> r(std::max(c_.size(), o.c_.size()), Fq{0});
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.add(coeff(i), o.coeff(i));
        return Poly(F, std::move(r));
    }
    Poly operator-() const {
        std::vector<Fq> r(c_);
        for (auto& x : r) x = field().neg(x);
        return Poly(field(), std::move(r));
    }
    Poly operator-(const Poly& o) const { return *this + (-o); }
    Poly operator*(const Poly& o) const {
        const Field& F = common(o);
        if (is_zero() || o.is_zero()) return Poly(F);
        std::vector<Fq> r(c_.size() + o.c_.size() - 1, Fq{0});
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].v == 0) continue;
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(c_[i], o.c_[j]));
        }
        return Poly(F, std::move(r));
    }
    Poly scaled(Fq s) const {
        std::vector<Fq> r(c_);
        for (auto& x : r) x = field().mul(x, s);
        return Poly(field(), std::move(r));
    }
    Poly shifted(unsigned n) const {
        if (is_zero()) return *this;
        std::vector<Fq> r(n, Fq{0});
        r.insert(r.end(), c_.begin(), c_.end());
        return Poly(field(), std::move(r));
    }
    /// Coefficients of degree < n.
    Poly truncated(unsigned n) const {
        std::vector<Fq> r(c_.begin(), c_.begin() + std::min<std::size_t>(n, c_.size()));
        return Poly(field(), std::move(r));
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    std::pair<Poly, Poly> divmod(const Poly& d) const {
        const Field& F = common(d);
        if (d.is_zero()) throw std::domain_error("polynomial division by zero");
        if (deg() < d.deg()) return {Poly(F), *this};
        std::vector<Fq> r(c_), qv(c_.size() - d.c_.size() + 1, Fq{0});
        Fq inv_lead = F.inv(d.lead());
        std::size_t dd = d.c_.size() - 1;
        for (std::size_t i = r.size(); i-- > dd;) {
            if (r[i].v == 0) continue;
            Fq c = F.mul(r[i], inv_lead);
            qv[i - dd] = c;
            for (std::size_t j = 0; j <= dd; ++j) r[i - dd + j] = F.sub(r[i - dd + j], F.mul(c, d.c_[j]));
        }
        r.resize(dd);
        return {Poly(F, std::move(qv)), Poly(F, std::move(r))};
    }
    Poly operator/(const Poly& d) const { return divmod(d).first; }
    Poly operator%(const Poly& d) const { return divmod(d).second; }

    Poly monic() const {
        if (is_zero()) return *this;
        return scaled(field().inv(lead()));
    }
    Poly derivative() const {
        if (c_.size() <= 1) return Poly(field());
        std::vector<Fq> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = field().mul(field().from_int(static_cast<long long>(i)), c_[i]);
        return Poly(field(), std::move(r));
    }
    Fq eval(Fq x) const {
        Fq acc{0};
        for (std::size_t i = c_.size(); i-- > 0;) acc = field().add(field().mul(acc, x), c_[i]);
        return acc;
    }
    Poly powmod(std::uint64_t e, const Poly& m) const {
        Poly r = constant(field(), field().one()) % m, b = *this % m;
        while (e) {
            if (e & 1) r = (r * b) % m;
            b = (b * b) % m;
            e >>= 1;
        }
        return r;
    }
    Poly pow(unsigned e) const {
        Poly r = constant(field(), field().one()), b = *this;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    bool operator==(const Poly& o) const { return c_ == o.c_; }
    /// Order by degree, then coefficients from the constant term upward.
    bool operator<(const Poly& o) const {
        if (deg() != o.deg()) return deg() < o.deg();
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i].v != o.c_[i].v) return c_[i].v < o.c_[i].v;
        return false;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().v == 0) c_.pop_back();
    }
    const Field& common(const Poly& o) const {
        const Field* F = F_ ? F_ : o.F_;
        if (!F || (F_ && o.F_ && F_ != o.F_)) throw std::logic_error("polynomials over different fields");
        return *F;
    }

    const Field* F_ = nullptr;
    std::vector<Fq> c_;
};

inline Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// Extended gcd: returns (g, s, t) with s a + t b = g monic.
inline std::tuple<Poly, Poly, Poly> xgcd(const Poly& a, const Poly& b) {
    const Field& F = a.field_ptr() ? a.field() : b.field();
    Poly r0 = a, r1 = b, s0 = Poly::constant(F, F.one()), s1(F), t0(F), t1 = Poly::constant(F, F.one());
    while (!r1.is_zero()) {
        auto [qt, r] = r0.divmod(r1);
        r0 = std::exchange(r1, r);
        s0 = std::exchange(s1, s0 - qt * s1);
        t0 = std::exchange(t1, t0 - qt * t1);
    }
    if (r0.is_zero()) return {r0, s0, t0};
    Fq il = F.inv(r0.lead());
    return {r0.scaled(il), s0.scaled(il), t0.scaled(il)};
}

/// Inverse of a modulo m; throws if not coprime.
inline Poly inverse_mod(const Poly& a, const Poly& m) {
    auto [g, s, t] = xgcd(a % m, m);
    (void)t;
    if (g.deg() != 0) throw std::domain_error("polynomial not invertible modulo m");
    return s % m;
}

/// Rabin irreducibility test over F_q.
inline bool is_irreducible(const Poly& f) {
    int n = f.deg();
    if (n <= 0) return false;
    if (n == 1) return true;
    const Field& F = f.field();
    Poly m = f.monic();
    Poly X = Poly::x(F);
    auto frob = [&](unsigned times) {
        Poly r = X;
        for (unsigned i = 0; i < times; ++i) r = r.powmod(F.q(), m);
        return r;
    };
    if (frob(static_cast<unsigned>(n)) != X % m) return false;
    for (int r = 2; r <= n; ++r) {
        if (n % r || !detail::is_prime(static_cast<std::uint64_t>(r))) continue;
        Poly t = frob(static_cast<unsigned>(n / r)) - X;
        if (gcd(m, t).deg() != 0) return false;
    }
    return true;
}

inline nlohmann::json poly_to_json(const Poly& p) { return p.to_ints(); }

inline Poly poly_from_json(const Field& F, const nlohmann::json& j) {
    return Poly::from_ints(F, j.get<std::vector<std::uint32_t>>());
}

}  // namespace wfl
