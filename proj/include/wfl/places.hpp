#pragma once

#include "cyclotomic.hpp"
#include "poly.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfl {

/// psi(x) = zeta_p^{Tr(x)}.
inline Cyclotomic char_psi(const Field& F, Fq x) { return Cyclotomic::root(F.p(), F.trace(x)); }

/// Closed point of P^1: a monic irreducible in T, or infinity (uniformizer u = 1/T).
struct Place {
    enum class Kind { Finite, Infinity };
    Kind kind = Kind::Finite;
    Poly pi;  // monic irreducible in T, or u itself for infinity
    int degree = 1;

    static Place finite(Poly p) {
        if (!is_irreducible(p) || p.lead() != p.field().one()) throw std::invalid_argument("place must be monic irreducible");
        Place v;
        v.degree = p.deg();
        v.pi = std::move(p);
        return v;
    }
    static Place infinity(const Field& F) {
        Place v;
        v.kind = Kind::Infinity;
        v.pi = Poly::x(F);
        v.degree = 1;
        return v;
    }
    bool is_infinity() const { return kind == Kind::Infinity; }
    const Field& field() const { return pi.field(); }

    bool operator==(const Place& o) const { return kind == o.kind && pi == o.pi; }
    /// Finite places by (degree, coefficients); infinity last.
    bool operator<(const Place& o) const {
        if (kind != o.kind) return kind == Kind::Finite;
        return pi < o.pi;
    }
    std::string to_string() const {
        if (is_infinity()) return "inf";
        std::string s = "[";
        for (std::size_t i = 0; i < pi.coeffs().size(); ++i) s += (i ? "," : "") + std::to_string(pi.coeffs()[i].v);
        return s + "]";
    }
};

inline constexpr std::size_t kDefaultPlaceCap = 1u << 20;

/// Monic irreducibles of exact degree d, in (degree, lex) order.
inline std::vector<Place> places_of_degree(const Field& F, int d, std::size_t cap = kDefaultPlaceCap) {
    std::vector<Place> out;
    std::uint64_t count = 1;
    for (int i = 0; i < d; ++i) {
        count *= F.q();
        if (count > (std::uint64_t(1) << 40)) throw std::length_error("place enumeration too large");
    }
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        Poly low = Poly::from_index(F, idx, static_cast<unsigned>(d));
        Poly p = low + Poly::monomial(F, static_cast<unsigned>(d), F.one());
        if (!is_irreducible(p)) continue;
        Place v;
        v.degree = d;
        v.pi = std::move(p);
        out.push_back(std::move(v));
        if (out.size() > cap) throw std::length_error("place list exceeds cap");
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Place> places_up_to(const Field& F, int D, bool include_infinity, std::size_t cap = kDefaultPlaceCap) {
    if (D < 1) throw std::invalid_argument("degree bound must be at least 1");
    std::vector<Place> out;
    for (int d = 1; d <= D; ++d) {
        auto part = places_of_degree(F, d, cap);
        out.insert(out.end(), part.begin(), part.end());
        if (out.size() > cap) throw std::length_error("place list exceeds cap");
    }
    if (include_infinity) out.push_back(Place::infinity(F));
    return out;
}

/// O_v / pi^m. Elements are residues of degree < m * deg(v), in T (finite) or u (infinity).
/// Coordinates use the digit basis T^j pi^i, flattened as i * deg(v) + j.
class LocalRing {
public:
    LocalRing(Place v, int m) : v_(std::move(v)), m_(m) {
        if (m < 0) throw std::invalid_argument("negative multiplicity");
        pim_ = v_.pi.pow(static_cast<unsigned>(m));
    }
    const Place& place() const { return v_; }
    const Field& field() const { return v_.field(); }
    int m() const { return m_; }
    int dv() const { return v_.degree; }
    int dim() const { return m_ * v_.degree; }
    const Poly& modulus() const { return pim_; }

    Poly reduce(const Poly& x) const {
        if (m_ == 0) return Poly(field());
        return x % pim_;
    }
    Poly mul(const Poly& a, const Poly& b) const { return reduce(a * b); }

    std::vector<Fq> digits(const Poly& x) const {
        std::vector<Fq> out(static_cast<std::size_t>(dim()), Fq{0});
        Poly r = reduce(x);
        for (int i = 0; i < m_; ++i) {
            auto [qt, rem] = r.divmod(v_.pi);
            for (int j = 0; j < dv(); ++j) out[static_cast<std::size_t>(i * dv() + j)] = rem.coeff(static_cast<std::size_t>(j));
            r = std::move(qt);
        }
        return out;
    }
    Poly from_digits(const std::vector<Fq>& d) const {
        Poly acc(field()), pip = Poly::constant(field(), field().one());
        for (int i = 0; i < m_; ++i) {
            std::vector<Fq> blk(d.begin() + i * dv(), d.begin() + (i + 1) * dv());
            acc += Poly(field(), std::move(blk)) * pip;
            pip *= v_.pi;
        }
        return acc;
    }
    /// Image of the basis monomial T^j pi^i.
    Poly basis(int idx) const {
        int i = idx / dv(), j = idx % dv();
        return Poly::monomial(field(), static_cast<unsigned>(j), field().one()) * v_.pi.pow(static_cast<unsigned>(i));
    }

    /// Restriction of a section of O(D) (a polynomial in T of degree <= D).
    /// At infinity this is u^D f(1/u) mod u^m.
    Poly restrict_section(const Poly& f, int D) const {
        if (!v_.is_infinity()) return reduce(f);
        std::vector<Fq> c(static_cast<std::size_t>(std::max(m_, 0)), Fq{0});
        for (int j = 0; j < m_ && j <= D; ++j) c[static_cast<std::size_t>(j)] = f.coeff(static_cast<std::size_t>(D - j));
        return Poly(field(), std::move(c));
    }

    /// Number of elements, as q^{m deg v}.
    std::uint64_t size() const {
        std::uint64_t s = 1;
        for (int i = 0; i < dim(); ++i) s *= field().q();
        return s;
    }
    Poly element(std::uint64_t idx) const { return Poly::from_index(field(), idx, static_cast<unsigned>(dim())); }

private:
    Place v_;
    int m_;
    Poly pim_;
};

}  // namespace wfl
