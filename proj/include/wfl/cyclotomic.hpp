#pragma once

#include "rational.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfl {

/// Exact element of Q(zeta_p) in the basis zeta^0, ..., zeta^{p-2}.
/// Character sums normalized by powers of q live here, so coordinates are rational.
class Cyclotomic {
public:
    Cyclotomic() = default;
    explicit Cyclotomic(unsigned p) : p_(p), c_(p - 1, Rational(0)) {
        if (p < 2) throw std::invalid_argument("cyclotomic order must be prime");
    }
    static Cyclotomic integer(unsigned p, const Rational& v) {
        Cyclotomic z(p);
        z.c_[0] = v;
        return z;
    }
    /// zeta^j for any integer j.
    static Cyclotomic root(unsigned p, long long j) {
        std::vector<Rational> full(p, Rational(0));
        long long r = j % static_cast<long long>(p);
        if (r < 0) r += p;
        full[static_cast<std::size_t>(r)] = 1;
        return from_full(p, full);
    }
    /// sum_j bins[j] zeta^j over a length-p vector of weights.
    static Cyclotomic from_bins(unsigned p, const std::vector<Rational>& bins) {
        if (bins.size() != p) throw std::invalid_argument("bin count must equal p");
        return from_full(p, bins);
    }
    template <class IntT>
    static Cyclotomic from_int_bins(unsigned p, const std::vector<IntT>& bins) {
        std::vector<Rational> r;
        r.reserve(bins.size());
        for (const auto& b : bins) r.emplace_back(Int(b));
        return from_bins(p, r);
    }

    unsigned p() const { return p_; }
    const std::vector<Rational>& coords() const { return c_; }

    Cyclotomic operator+(const Cyclotomic& o) const {
        check(o);
        Cyclotomic r(*this);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
        return r;
    }
    Cyclotomic operator-(const Cyclotomic& o) const {
        check(o);
        Cyclotomic r(*this);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
        return r;
    }
    Cyclotomic operator-() const {
        Cyclotomic r(*this);
        for (auto& x : r.c_) x = -x;
        return r;
    }
    Cyclotomic operator*(const Cyclotomic& o) const {
        check(o);
        std::vector<Rational> full(p_, Rational(0));
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            for (std::size_t j = 0; j < o.c_.size(); ++j) {
                if (o.c_[j] == 0) continue;
                full[(i + j) % p_] += c_[i] * o.c_[j];
            }
        }
        return from_full(p_, full);
    }
    Cyclotomic operator*(const Rational& s) const {
        Cyclotomic r(*this);
        for (auto& x : r.c_) x *= s;
        return r;
    }
    Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }
    Cyclotomic& operator-=(const Cyclotomic& o) { return *this = *this - o; }
    Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }

    Cyclotomic pow(unsigned e) const {
        Cyclotomic r = integer(p_, 1), b = *this;
        while (e) {
            if (e & 1u) r *= b;
            b *= b;
            e >>= 1u;
        }
        return r;
    }
    /// Complex conjugation zeta -> zeta^{-1}.
    Cyclotomic conj() const {
        std::vector<Rational> full(p_, Rational(0));
        for (std::size_t j = 0; j < c_.size(); ++j) full[(p_ - j) % p_] += c_[j];
        return from_full(p_, full);
    }
    /// Multiply by zeta^j.
    Cyclotomic rotated(long long j) const { return *this * root(p_, j); }

    bool is_zero() const {
        for (const auto& x : c_)
            if (x != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }
    Rational rational_value() const {
        if (!is_rational()) throw std::domain_error("cyclotomic value is not rational");
        return c_.empty() ? Rational(0) : c_[0];
    }
    /// Squared absolute value, exact (it is a totally real element; we return its rational part if rational).
    Cyclotomic norm_sq() const { return *this * conj(); }

    std::complex<double> to_complex() const {
        std::complex<double> acc{0, 0};
        for (std::size_t j = 0; j < c_.size(); ++j) {
            double a = 2 * std::numbers::pi * static_cast<double>(j) / p_;
            acc += to_double(c_[j]) * std::complex<double>(std::cos(a), std::sin(a));
        }
        return acc;
    }
    double abs() const { return std::abs(to_complex()); }

    bool operator==(const Cyclotomic& o) const { return p_ == o.p_ && c_ == o.c_; }

    std::string to_string() const {
        std::string s;
        for (std::size_t j = 0; j < c_.size(); ++j) {
            if (c_[j] == 0) continue;
            if (!s.empty()) s += " + ";
            s += "(" + wfl::to_string(c_[j]) + ")";
            if (j) s += "*z^" + std::to_string(j);
        }
        return s.empty() ? "0" : s;
    }

private:
    static Cyclotomic from_full(unsigned p, const std::vector<Rational>& full) {
        Cyclotomic z(p);
        for (unsigned j = 0; j + 1 < p; ++j) z.c_[j] = full[j] - full[p - 1];
        return z;
    }
    void check(const Cyclotomic& o) const {
        if (p_ != o.p_) throw std::logic_error("cyclotomic values of different order");
    }

    unsigned p_ = 2;
    std::vector<Rational> c_{Rational(0)};
};

}  // namespace wfl
