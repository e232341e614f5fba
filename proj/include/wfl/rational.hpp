#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace wfl {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using u128 = unsigned __int128;
using i128 = __int128;

inline Rational make_rational(const Int& num, const Int& den = 1) { return Rational(num, den); }

inline Int ipow(const Int& base, unsigned exp) {
    Int r = 1, b = base;
    while (exp) {
        if (exp & 1u) r *= b;
        b *= b;
        exp >>= 1u;
    }
    return r;
}

// Integer power with a possibly negative exponent.
inline Rational rpow(const Rational& base, long exp) {
    if (exp < 0) return Rational(1) / rpow(base, -exp);
    // Powers of coprime parts stay coprime, so only one normalization happens.
    auto e = static_cast<unsigned>(exp);
    return Rational(ipow(numerator(base), e), ipow(denominator(base), e));
}

inline Int ceil_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (q * b != a && ((a > 0) == (b > 0))) ++q;
    return q;
}

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (q * b != a && ((a > 0) != (b > 0))) --q;
    return q;
}

inline Int floor(const Rational& r) {
    return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline Int ceil(const Rational& r) {
    return ceil_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) {
    auto num = boost::multiprecision::numerator(r);
    auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(Int(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        Int den = ipow(10, static_cast<unsigned>(s.size() - dot - 1));
        return Rational(Int(digits), den);
    }
    return Rational(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

inline unsigned msb_or_zero(const Int& x) { return x == 0 ? 0 : static_cast<unsigned>(boost::multiprecision::msb(x)); }

inline u128 to_u128(const Int& x) {
    if (x < 0 || msb_or_zero(x) >= 128) throw std::overflow_error("value does not fit in 128 bits");
    u128 r = 0;
    Int t = x;
    for (int shift = 0; shift < 128 && t != 0; shift += 32) {
        r |= static_cast<u128>(static_cast<std::uint32_t>(t & 0xffffffffu)) << shift;
        t >>= 32;
    }
    return r;
}

inline Int from_u128(u128 v) {
    Int r = static_cast<std::uint64_t>(v >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(v);
    return r;
}

inline std::string to_string(u128 v) { return from_u128(v).str(); }

/// Closed rational interval; an absent upper end means +infinity.
struct Interval {
    Rational lo;
    std::optional<Rational> hi;

    bool bounded() const { return hi.has_value(); }
    bool contains(const Rational& x) const { return lo <= x && (!hi || x <= *hi); }
    std::optional<Rational> width() const {
        if (!hi) return std::nullopt;
        return *hi - lo;
    }
    Interval scaled(const Rational& c) const {
        Interval r{lo * c, std::nullopt};
        if (hi) r.hi = *hi * c;
        return r;
    }
};

}  // namespace wfl
