#pragma once

#include "arcs.hpp"
#include "counting.hpp"
#include "errors.hpp"
#include "group_fourier.hpp"
#include "places.hpp"
#include "rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wfl {

struct LocalDensity {
    enum class Method { Recursion, Enumeration };
    Rational value;
    std::optional<int> stabilized_at;  // empty when no certificate was obtained
    Method method = Method::Recursion;
    std::optional<int> valuation;      // empty for f = 0
    bool flagged = false;
};

/// Q = q^{deg v}.
inline Int residue_size(const Place& v) { return ipow(Int(v.field().q()), static_cast<unsigned>(v.degree)); }

/// N_1^*(c) = #{b in (O/pi)^s, b != 0 : sum b_i^k = c}, indexed by the coefficient index of c.
struct ResidueTable {
    Place v;
    unsigned k = 2, s = 1;
    std::vector<Int> nstar;
    bool constant_on_units = false;

    const Int& at(const Poly& c) const { return nstar[c.to_index(static_cast<unsigned>(v.degree))]; }
    const Int& at_zero() const { return nstar[0]; }
};

inline ResidueTable residue_table(const Place& v, unsigned k, unsigned s) {
    LocalRing R(v, 1);
    GroupFn h = GroupFn::zeros(R.field(), static_cast<unsigned>(v.degree));
    for (std::uint64_t i = 0; i < R.size(); ++i) h.values[R.reduce(R.element(i).pow(k)).to_index(static_cast<unsigned>(v.degree))] += 1;
    GroupFn N = convolve_power(h, s);
    ResidueTable t{v, k, s, {}, true};
    t.nstar.reserve(N.size());
    for (std::size_t i = 0; i < N.size(); ++i) t.nstar.push_back(from_u128(N.values[i]) - (i == 0 ? 1 : 0));
    for (std::size_t i = 2; i < t.nstar.size(); ++i)
        if (t.nstar[i] != t.nstar[1]) t.constant_on_units = false;
    return t;
}

/// pi-adic valuation and unit part of a nonzero polynomial.
inline std::pair<int, Poly> split_valuation(const Poly& f, const Poly& pi) {
    int w = 0;
    Poly h = f;
    for (;;) {
        auto [qt, r] = h.divmod(pi);
        if (!r.is_zero()) return {w, h};
        h = std::move(qt);
        ++w;
    }
}

/// Density from the descent recursion
///   g(f) = N_1^*(f mod pi) / Q^{s-1} + [pi^k | f] Q^{k-s} g(f / pi^k),
/// with f written in the local variable (T, or u at infinity).
inline LocalDensity density_recursion(const ResidueTable& tab, const Poly& f) {
    const Place& v = tab.v;
    const Int Q = residue_size(v);
    const unsigned k = tab.k, s = tab.s;
    if (k % v.field().p() == 0) throw std::invalid_argument("recursion needs p not dividing k");
    const Rational base = Rational(1) / rpow(Rational(Q), static_cast<long>(s) - 1);
    const Rational step = rpow(Rational(Q), static_cast<long>(k) - static_cast<long>(s));
    LocalDensity out;
    out.method = LocalDensity::Method::Recursion;
    if (f.is_zero()) {
        if (s <= k) throw std::domain_error("density of 0 diverges unless s > k");
        out.value = Rational(tab.at_zero()) * base / (1 - step);
        out.stabilized_at = std::nullopt;
        return out;
    }
    auto [w, h] = split_valuation(f, v.pi);
    out.valuation = w;
    Rational acc = 0, scale = 1;
    Poly unit_residue = h % v.pi;
    for (int j = 0; static_cast<int>(k) * j <= w; ++j) {
        const Int& n = (static_cast<int>(k) * j < w) ? tab.at_zero() : tab.at(unit_residue);
        acc += scale * Rational(n) * base;
        scale *= step;
    }
    out.value = acc;
    out.stabilized_at = w + 1;
    return out;
}

/// u^{ke} f(1/u) as a polynomial in u.
inline Poly infinity_local_poly(const Poly& f, unsigned ke) {
    const Field& F = f.field();
    std::vector<Fq> c(ke + 1, Fq{0});
    for (unsigned j = 0; j <= ke; ++j) c[j] = f.coeff(ke - j);
    return Poly(F, std::move(c));
}

/// Conditions under which every local density is known to be positive.
inline bool positivity_hypotheses(const Field& F, unsigned k, unsigned s) {
    return k >= 2 && k % F.p() != 0 && s > k + 1 && s >= 5 && Int(F.q()) > ipow(Int(k - 1), 4);
}

inline LocalDensity ell_v(const Poly& f, const Place& v, unsigned s, unsigned k) { return density_recursion(residue_table(v, k, s), f); }

inline LocalDensity ell_infty(const Poly& f, unsigned e, unsigned k, unsigned s) {
    return density_recursion(residue_table(Place::infinity(f.field()), k, s), infinity_local_poly(f, k * e));
}

/// Counts of sum b_i^k over (O/pi^r)^s, indexed by residue coefficients.
inline GroupFn local_count_table(const Place& v, unsigned s, unsigned k, int r, std::uint64_t group_budget = 1u << 24) {
    LocalRing R(v, r);
    if (R.size() > group_budget) throw BudgetExceeded("local enumeration group too large at r = " + std::to_string(r));
    const auto dim = static_cast<unsigned>(R.dim());
    GroupFn h = GroupFn::zeros(R.field(), dim);
    for (std::uint64_t i = 0; i < R.size(); ++i) h.values[R.reduce(R.element(i).pow(k)).to_index(dim)] += 1;
    return convolve_power(h, s);
}

/// N_r(f).
inline Int local_count(const Poly& f, const Place& v, unsigned s, unsigned k, int r, std::uint64_t group_budget = 1u << 24) {
    LocalRing R(v, r);
    return from_u128(local_count_table(v, s, k, r, group_budget).values[R.reduce(f).to_index(static_cast<unsigned>(R.dim()))]);
}

/// Enumeration route: N_r / Q^{r(s-1)} until k consecutive values agree past the valuation.
inline LocalDensity density_enumeration(const Poly& f, const Place& v, unsigned s, unsigned k, int r_cap, std::uint64_t group_budget = 1u << 24) {
    const Int Q = residue_size(v);
    LocalDensity out;
    out.method = LocalDensity::Method::Enumeration;
    int w = r_cap + 1;
    if (!f.is_zero()) {
        w = split_valuation(f, v.pi).first;
        out.valuation = w;
    }
    std::vector<Rational> vals;
    for (int r = 1; r <= r_cap; ++r) {
        if (LocalRing(v, r).size() > group_budget) break;
        vals.push_back(Rational(local_count(f, v, s, k, r, group_budget)) / rpow(Rational(Q), static_cast<long>(r) * (static_cast<long>(s) - 1)));
        const int n = static_cast<int>(vals.size());
        const int start = n - static_cast<int>(k) + 1;
        if (start < 1 || start < w + 1) continue;
        bool same = true;
        for (int i = start; i < n; ++i) same &= vals[static_cast<std::size_t>(i - 1)] == vals.back();
        if (same) {
            out.value = vals.back();
            out.stabilized_at = start;
            return out;
        }
    }
    out.flagged = true;
    out.value = vals.empty() ? Rational(0) : vals.back();
    return out;
}

/// sum_{m <= r} sum_{nondegenerate ell on O/pi^m} S_m(ell)^s psi(-ell(f)); equals N_r(f) / Q^{r(s-1)}.
inline Cyclotomic truncated_local_series(const Poly& f, const Place& v, unsigned s, unsigned k, int r, std::uint64_t budget = 2000000) {
    const Field& F = v.field();
    Cyclotomic acc = Cyclotomic::integer(F.p(), 1);
    for (int m = 1; m <= r; ++m) {
        LocalRing R(v, m);
        if (R.size() > budget) throw BudgetExceeded("too many local functionals");
        auto fd = R.digits(R.reduce(f));
        const auto M = static_cast<std::size_t>(R.dim());
        for (std::uint64_t idx = 0; idx < R.size(); ++idx) {
            std::vector<Fq> ell(M);
            std::uint64_t t = idx;
            for (auto& x : ell) {
                x = Fq{static_cast<std::uint32_t>(t % F.q())};
                t /= F.q();
            }
            RestrictedForm rf{DivisorP1{{{v, m}}}, {ell}};
            if (!rf.is_nondegenerate()) continue;
            Cyclotomic term = SZ_local(v, m, ell, k).pow(s);
            acc += term.rotated(-static_cast<long long>(F.trace(apply_local(F, ell, fd))));
        }
    }
    return acc;
}

// ---------------------------------------------------------------- singular series

struct SingularSeries {
    int D = 0;
    Rational partial;           // ell_infty times finite places of degree <= D
    Interval tail;              // bounds on (full product) / partial
    Interval value;             // partial * tail
    bool hypotheses_ok = true;  // s >= 5, s > k + 1, p does not divide k
    LocalDensity at_infinity;
    std::vector<std::pair<Place, LocalDensity>> places;  // only places where f is not a unit, plus one representative per degree
    std::map<int, Rational> generic_factor;              // degree -> density at a place where f is a unit (when constant on units)
};

/// Rational r with r >= sqrt(n).
inline Rational sqrt_upper(const Int& n) {
    Int scaled = n << 128;
    Int r = boost::multiprecision::sqrt(scaled);
    if (r * r < scaled) r += 1;
    return Rational(r, Int(1) << 64);
}

/// Upper bound for sum over finite places of degree > D of |ell_v - 1|, valid for every f.
/// Per place of degree d (Q = q^d): |ell_v - 1| <= [(k-1)^s Q^{1-s/2} + Q^{k-s}/(1-1/Q)] / (1 - Q^{k-s}),
/// and there are at most q^d / d such places.
inline std::optional<Rational> tail_sum_bound(unsigned q, unsigned k, unsigned s, int D) {
    if (s < 5 || s <= k + 1) return std::nullopt;
    const Rational qr(q);
    const long d1 = D + 1;
    // x = q^{2 - s/2}, rounded up when s is odd.
    Rational x;
    if (s % 2 == 0)
        x = rpow(qr, 2 - static_cast<long>(s) / 2);
    else
        x = rpow(qr, (3 - static_cast<long>(s)) / 2) * sqrt_upper(Int(q));
    if (x >= 1) return std::nullopt;
    const Rational y = rpow(qr, static_cast<long>(k) + 1 - static_cast<long>(s));
    const Rational c_geo = Rational(1) / (1 - rpow(qr, (static_cast<long>(k) - static_cast<long>(s)) * d1));
    const Rational c_unit = Rational(1) / (1 - rpow(qr, -d1));
    Rational xp = 1, yp = 1;
    for (long i = 0; i < d1; ++i) {
        xp *= x;
        yp *= y;
    }
    Rational first = Rational(ipow(Int(k - 1), s)) * xp / (1 - x);
    Rational second = yp * c_unit / (1 - y);
    return c_geo * (first + second) / Rational(d1);
}

inline Interval tail_interval(const std::optional<Rational>& T) {
    if (!T || *T >= 1) return Interval{0, std::nullopt};
    Rational lo = 1 - *T;
    if (lo < 0) lo = 0;
    return Interval{lo, Rational(1) / (1 - *T)};
}

/// Product of local densities over infinity and finite places of degree <= D, with a tail interval.
inline SingularSeries singular_series(const Poly& f, unsigned e, unsigned k, unsigned s, int D) {
    const Field& F = f.field();
    SingularSeries out;
    out.D = D;
    out.hypotheses_ok = s >= 5 && s > k + 1 && k % F.p() != 0;
    out.at_infinity = ell_infty(f, e, k, s);
    Rational prod = out.at_infinity.value;
    for (int d = 1; d <= D; ++d) {
        auto pl = places_of_degree(F, d);
        if (pl.empty()) continue;
        ResidueTable rep = residue_table(pl.front(), k, s);
        long generic = 0;
        for (const auto& v : pl) {
            const bool unit = !f.is_zero() && !(f % v.pi).is_zero();
            if (rep.constant_on_units && unit) {
                ++generic;
                continue;
            }
            ResidueTable tab = rep.constant_on_units ? ResidueTable{v, k, s, rep.nstar, true} : residue_table(v, k, s);
            auto ld = density_recursion(tab, f);
            prod *= ld.value;
            out.places.emplace_back(v, ld);
        }
        if (generic) {
            out.generic_factor[d] = density_recursion(rep, Poly::constant(F, F.one())).value;
            prod *= rpow(out.generic_factor[d], generic);
        }
    }
    out.partial = prod;
    out.tail = out.hypotheses_ok ? tail_interval(tail_sum_bound(F.q(), k, s, D)) : Interval{0, std::nullopt};
    out.value = out.tail.scaled(prod);
    return out;
}

/// q^{e(s-k)+s-1} times the singular series interval.
inline Interval main_term_waring(const WaringInstance& inst, int D) {
    auto ss = singular_series(inst.f, inst.e, inst.k, inst.s, D);
    const long ex = static_cast<long>(inst.e) * (static_cast<long>(inst.s) - static_cast<long>(inst.k)) + static_cast<long>(inst.s) - 1;
    return ss.value.scaled(rpow(Rational(inst.F->q()), ex));
}

// ---------------------------------------------------------------- Manin main term

struct ManinMainTerm {
    Rational leading;           // q^{e(n+1-d)+n} / (q-1)
    Rational partial;           // product over places of degree <= D, including infinity
    Interval tail;
    Interval value;
    bool convergent = true;
    std::map<int, Int> point_counts;  // degree -> #X(F_{q^d})
};

/// Local factor (1 - Q^{-1}) #X(F_Q) / Q^{n-1}.
inline Rational manin_local_factor(unsigned n, const Int& Q, const Int& points) {
    return (1 - Rational(1, Q)) * Rational(points) / rpow(Rational(Q), static_cast<long>(n) - 1);
}

/// Weil bound for the diagonal hypersurface: |local factor - 1| <= Q^{-n} + b Q^{-(n-1)/2}.
inline Int diagonal_betti_bound(unsigned n, unsigned d) {
    Int dm1 = d - 1;
    Int b = ipow(dm1, n + 1) + ((n + 1) % 2 == 0 ? dm1 : -dm1);
    return b / d;
}

inline ManinMainTerm main_term_manin(const FermatInstance& inst, int D) {
    inst.validate();
    const Field& F = *inst.F;
    const unsigned n = inst.n, d = inst.d, q = F.q();
    if (n + 1 <= d) throw std::domain_error("main term needs n + 1 > d");
    ManinMainTerm out;
    out.leading = rpow(Rational(q), static_cast<long>(inst.e) * (static_cast<long>(n) + 1 - static_cast<long>(d)) + static_cast<long>(n)) / Rational(q - 1);
    Rational prod = 1;
    for (int deg = 1; deg <= D; ++deg) {
        Int Q = ipow(Int(q), static_cast<unsigned>(deg));
        const Field& FQ = Field::of_size(static_cast<std::uint32_t>(Q));
        Int pts = fermat_point_count(n, d, FQ);
        out.point_counts[deg] = pts;
        Rational lf = manin_local_factor(n, Q, pts);
        std::size_t count = places_of_degree(F, deg).size() + (deg == 1 ? 1 : 0);
        prod *= rpow(lf, static_cast<long>(count));
    }
    out.partial = prod;
    // Tail over degrees > D: sum (q^m/m)(q^{-mn} + b q^{-m(n-1)/2}).
    const Int b = diagonal_betti_bound(n, d);
    const long d1 = D + 1;
    Rational T = 0;
    {
        // first part: x1 = q^{1-n}
        Rational x1 = rpow(Rational(q), 1 - static_cast<long>(n));
        Rational t1 = rpow(x1, d1) / (1 - x1) / Rational(d1);
        T += t1;
        if (b != 0) {
            // x2 = q^{1-(n-1)/2}, rounded up when n is even
            Rational x2;
            if ((n - 1) % 2 == 0)
                x2 = rpow(Rational(q), 1 - static_cast<long>(n - 1) / 2);
            else
                x2 = rpow(Rational(q), 1 - static_cast<long>(n) / 2) * sqrt_upper(Int(q));
            if (x2 >= 1) {
                out.convergent = false;
            } else {
                T += Rational(b) * rpow(x2, d1) / (1 - x2) / Rational(d1);
            }
        }
    }
    out.tail = out.convergent ? tail_interval(T) : Interval{0, std::nullopt};
    out.value = out.tail.scaled(out.leading * prod);
    return out;
}

}  // namespace wfl

namespace wfl {

// ---------------------------------------------------------------- convergence study

struct ConvergenceRow {
    unsigned e = 0;
    int D = 0;
    double r = 0;     // max_f |N(f) / MT(f) - 1| using the truncated product
    double r_lo = 0;  // smallest value consistent with the tail interval
    double r_hi = 0;  // largest value consistent with the tail interval
    Interval tail;
    double tail_width = 0;  // hi / lo - 1
    std::size_t patterns = 0;
    std::uint64_t worst_index = 0;
};

namespace detail {

/// Adds delta to key[idx(pi^j h)] for every h of degree <= len - 1 - deg(pi^j).
inline void mark_multiples(const Field& F, const Poly& g, unsigned len, std::vector<std::uint64_t>& key, std::uint64_t delta) {
    const int dg = g.deg();
    if (dg < 0 || static_cast<unsigned>(dg) >= len) return;
    const unsigned hlen = len - static_cast<unsigned>(dg);
    const std::uint32_t q = F.q();
    std::vector<std::uint64_t> pw(len, 1);
    for (unsigned i = 1; i < len; ++i) pw[i] = pw[i - 1] * q;
    // Current coefficients of g * h, updated digit by digit like an odometer.
    std::vector<Fq> cur(len, Fq{0});
    std::vector<std::uint32_t> h(hlen, 0);
    auto idx_of = [&] {
        std::uint64_t x = 0;
        for (unsigned i = 0; i < len; ++i) x += cur[i].v * pw[i];
        return x;
    };
    for (;;) {
        key[idx_of()] += delta;
        unsigned pos = 0;
        for (; pos < hlen; ++pos) {
            // h_pos -> h_pos + 1: add T^pos g; wrapping to 0 after q steps is automatic.
            for (int t = 0; t <= dg; ++t) cur[pos + static_cast<unsigned>(t)] = F.add(cur[pos + static_cast<unsigned>(t)], g.coeff(static_cast<std::size_t>(t)));
            if (++h[pos] < q) break;
            h[pos] = 0;
        }
        if (pos == hlen) return;
    }
}

}  // namespace detail

/// Waring main terms for every f of degree <= ke at once. When N_1^* is constant on units,
/// ell_v(f) depends only on the valuation, so each f is summarized by how many places of each
/// degree divide it to each exact power.
class BatchMainTerms {
public:
    BatchMainTerms(const Field& F, unsigned k, unsigned s, unsigned e, int D)
        : F_(&F), k_(k), s_(s), e_(e), D_(D), ke_(k * e), places_(static_cast<std::size_t>(D) + 1), unit_(places_.size()), zero_(places_.size()),
          by_val_(places_.size()) {
        for (int d = 1; d <= D; ++d) {
            places_[d] = places_of_degree(F, d);
            if (places_[d].empty()) continue;
            ResidueTable tab = residue_table(places_[d].front(), k, s);
            if (!tab.constant_on_units) throw std::domain_error("batch main terms need densities constant on units");
            const Poly& pi = places_[d].front().pi;
            for (unsigned w = 0; w * static_cast<unsigned>(d) <= ke_; ++w) by_val_[d].push_back(density_recursion(tab, pi.pow(w)).value);
            unit_[d] = by_val_[d][0];
            zero_[d] = density_recursion(tab, Poly(F)).value;
        }
        ResidueTable inf_tab = residue_table(Place::infinity(F), k, s);
        if (!inf_tab.constant_on_units) throw std::domain_error("batch main terms need densities constant on units");
        for (unsigned w = 0; w <= ke_; ++w) inf_by_val_.push_back(density_recursion(inf_tab, Poly::x(F).pow(w)).value);
        inf_zero_ = density_recursion(inf_tab, Poly(F)).value;

        // Mixed-radix key: one digit per (d, w) counting places of degree d with valuation exactly w.
        std::uint64_t weight = 1;
        for (int d = 1; d <= D; ++d)
            for (unsigned w = 1; w * static_cast<unsigned>(d) <= ke_; ++w) {
                radix_.push_back({d, w, weight});
                const std::uint64_t base = ke_ / (static_cast<unsigned>(d) * w) + 1;
                if (weight > std::numeric_limits<std::uint64_t>::max() / base) throw BudgetExceeded("valuation pattern key overflow");
                weight *= base;
            }
        std::uint64_t n = 1;
        for (unsigned i = 0; i <= ke_; ++i) n *= F.q();
        key_.assign(n, 0);
        std::size_t r = 0;
        for (int d = 1; d <= D; ++d) {
            const std::size_t first = r;
            for (const auto& v : places_[d]) {
                Poly g = v.pi;
                std::uint64_t prev = 0;
                r = first;
                for (unsigned w = 1; w * static_cast<unsigned>(d) <= ke_; ++w, g *= v.pi, ++r) {
                    detail::mark_multiples(F, g, ke_ + 1, key_, radix_[r].weight - prev);
                    prev = radix_[r].weight;
                }
            }
        }

        lead_ = rpow(Rational(F.q()), static_cast<long>(e) * (static_cast<long>(s) - static_cast<long>(k)) + static_cast<long>(s) - 1);
        base_ = lead_;
        for (int d = 1; d <= D; ++d)
            if (!places_[d].empty()) base_ *= rpow(unit_[d], static_cast<long>(places_[d].size()));
        base_d_ = to_double(base_);
    }

    std::uint64_t size() const { return key_.size(); }
    const Rational& leading() const { return lead_; }
    Interval tail() const { return tail_interval(tail_sum_bound(F_->q(), k_, s_, D_)); }

    /// lead * ell_infty(f) * prod_{deg v <= D} ell_v(f), exactly.
    Rational exact(std::uint64_t idx) const {
        if (idx == 0) {
            Rational z = lead_ * inf_zero_;
            for (int d = 1; d <= D_; ++d)
                if (!places_[d].empty()) z *= rpow(zero_[d], static_cast<long>(places_[d].size()));
            return z;
        }
        return base_ * correction_exact(key_[idx]) * inf_by_val_[ke_ - degree_of(idx)];
    }

    /// Same value in double precision; corrections are cached per valuation pattern.
    double approx(std::uint64_t idx) {
        if (idx == 0) {
            if (!zero_d_) zero_d_ = to_double(exact(0));
            return *zero_d_;
        }
        auto it = cache_.find(key_[idx]);
        if (it == cache_.end()) it = cache_.emplace(key_[idx], to_double(correction_exact(key_[idx]))).first;
        return base_d_ * it->second * to_double(inf_by_val_[ke_ - degree_of(idx)]);
    }
    std::size_t patterns_seen() const { return cache_.size(); }

private:
    struct Digit {
        int d;
        unsigned w;
        std::uint64_t weight;
    };

    unsigned degree_of(std::uint64_t idx) const {
        unsigned deg = 0;
        while (idx >= F_->q()) {
            idx /= F_->q();
            ++deg;
        }
        return deg;
    }
    Rational correction_exact(std::uint64_t kv) const {
        Rational c = 1;
        for (auto it = radix_.rbegin(); it != radix_.rend(); ++it) {
            const std::uint64_t cnt = kv / it->weight;
            kv %= it->weight;
            if (cnt) c *= rpow(by_val_[it->d][it->w] / unit_[it->d], static_cast<long>(cnt));
        }
        return c;
    }

    const Field* F_;
    unsigned k_, s_, e_;
    int D_;
    unsigned ke_;
    std::vector<std::vector<Place>> places_;
    std::vector<Rational> unit_, zero_;
    std::vector<std::vector<Rational>> by_val_;
    std::vector<Rational> inf_by_val_;
    Rational inf_zero_;
    std::vector<Digit> radix_;
    std::vector<std::uint64_t> key_;
    Rational lead_, base_;
    double base_d_ = 0;
    std::optional<double> zero_d_;
    std::map<std::uint64_t, double> cache_;
};

/// max_f |N(f)/MT(f) - 1| over all f of degree <= ke, with N from count_all.
inline ConvergenceRow convergence_row(const Field& F, unsigned k, unsigned s, unsigned e, int D) {
    GroupFn counts = count_all(F, k, s, e);
    BatchMainTerms mt(F, k, s, e, D);
    ConvergenceRow row;
    row.e = e;
    row.D = D;
    row.tail = mt.tail();
    if (!row.tail.bounded()) throw std::domain_error("tail bound unavailable for these parameters");
    const double t_lo = to_double(row.tail.lo), t_hi = to_double(*row.tail.hi);
    row.tail_width = to_double(*row.tail.hi / row.tail.lo) - 1;
    for (std::uint64_t idx = 0; idx < counts.size(); ++idx) {
        const double m = mt.approx(idx);
        const double n = to_double(Rational(from_u128(counts.values[idx])));
        const double ratio = n / m, a = n / (m * t_hi), b = n / (m * t_lo);
        const double dev = std::abs(ratio - 1);
        if (dev > row.r) {
            row.r = dev;
            row.worst_index = idx;
        }
        row.r_hi = std::max({row.r_hi, std::abs(a - 1), std::abs(b - 1)});
        row.r_lo = std::max(row.r_lo, (a <= 1 && 1 <= b) ? 0.0 : std::min(std::abs(a - 1), std::abs(b - 1)));
    }
    row.patterns = mt.patterns_seen();
    return row;
}

}  // namespace wfl
