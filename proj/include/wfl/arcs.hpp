#pragma once

#include "counting.hpp"
#include "cyclotomic.hpp"
#include "errors.hpp"
#include "group_fourier.hpp"
#include "linalg.hpp"
#include "places.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wfl {

/// alpha in H^0(O(D))^dual: alpha(f) = sum_i coords[i] f_i, D = coords.size() - 1.
struct LinearForm {
    const Field* F = nullptr;
    std::vector<Fq> coords;

    int D() const { return static_cast<int>(coords.size()) - 1; }
    bool is_zero() const {
        return std::all_of(coords.begin(), coords.end(), [](Fq x) { return x.v == 0; });
    }
    Fq operator()(const Poly& f) const {
        Fq acc{0};
        for (std::size_t i = 0; i < coords.size(); ++i) acc = F->add(acc, F->mul(coords[i], f.coeff(i)));
        return acc;
    }
    static LinearForm from_index(const Field& F, std::uint64_t idx, int D) {
        LinearForm a{&F, std::vector<Fq>(static_cast<std::size_t>(D + 1))};
        for (auto& c : a.coords) {
            c = Fq{static_cast<std::uint32_t>(idx % F.q())};
            idx /= F.q();
        }
        return a;
    }
    std::uint64_t index() const {
        std::uint64_t idx = 0;
        for (std::size_t i = coords.size(); i-- > 0;) idx = idx * F->q() + coords[i].v;
        return idx;
    }
};

/// Effective divisor on P^1.
struct DivisorP1 {
    std::vector<std::pair<Place, int>> parts;  // sorted by place, positive multiplicities

    int degree() const {
        int d = 0;
        for (const auto& [v, m] : parts) d += m * v.degree;
        return d;
    }
    int mult_infinity() const {
        for (const auto& [v, m] : parts)
            if (v.is_infinity()) return m;
        return 0;
    }
    int mult(const Place& w) const {
        for (const auto& [v, m] : parts)
            if (v == w) return m;
        return 0;
    }
    /// Monic polynomial of the finite part.
    Poly finite_part(const Field& F) const {
        Poly g = Poly::constant(F, F.one());
        for (const auto& [v, m] : parts)
            if (!v.is_infinity()) g *= v.pi.pow(static_cast<unsigned>(m));
        return g;
    }
    int finite_degree() const { return degree() - mult_infinity(); }
    DivisorP1 plus(const Place& v, int m) const {
        DivisorP1 r = *this;
        bool found = false;
        for (auto& [w, mm] : r.parts)
            if (w == v) {
                mm += m;
                found = true;
            }
        if (!found) r.parts.emplace_back(v, m);
        r.normalize();
        return r;
    }
    void normalize() {
        parts.erase(std::remove_if(parts.begin(), parts.end(), [](const auto& pm) { return pm.second <= 0; }), parts.end());
        std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    std::string to_string() const {
        if (parts.empty()) return "0";
        std::string s;
        for (const auto& [v, m] : parts) s += (s.empty() ? "" : "+") + std::to_string(m) + "*" + v.to_string();
        return s;
    }
    bool operator==(const DivisorP1& o) const { return parts == o.parts; }
    /// Degree first, then the serialized form.
    bool operator<(const DivisorP1& o) const {
        if (degree() != o.degree()) return degree() < o.degree();
        return parts_less(o);
    }

private:
    bool parts_less(const DivisorP1& o) const {
        for (std::size_t i = 0; i < std::min(parts.size(), o.parts.size()); ++i) {
            if (!(parts[i].first == o.parts[i].first)) return parts[i].first < o.parts[i].first;
            if (parts[i].second != o.parts[i].second) return parts[i].second < o.parts[i].second;
        }
        return parts.size() < o.parts.size();
    }
};

/// All effective divisors of exact degree m, sorted.
inline std::vector<DivisorP1> divisors_of_degree(const Field& F, int m) {
    std::vector<DivisorP1> out;
    if (m == 0) return {DivisorP1{}};
    auto places = places_up_to(F, m, true);
    DivisorP1 cur;
    auto rec = [&](auto&& self, std::size_t i, int rem) -> void {
        if (rem == 0) {
            DivisorP1 d = cur;
            d.normalize();
            out.push_back(std::move(d));
            return;
        }
        if (i == places.size()) return;
        const Place& v = places[i];
        for (int mult = 0; mult * v.degree <= rem; ++mult) {
            if (mult) cur.parts.emplace_back(v, mult);
            self(self, i + 1, rem - mult * v.degree);
            if (mult) cur.parts.pop_back();
        }
    };
    rec(rec, 0, m);
    std::sort(out.begin(), out.end());
    return out;
}

/// alpha vanishes on the sections of O(D) that vanish on Z, i.e. on g T^j for j <= D - deg Z.
inline bool factors_through(const LinearForm& alpha, const DivisorP1& Z) {
    const Field& F = *alpha.F;
    const int D = alpha.D();
    const int top = D - Z.degree();
    if (top < 0) return true;
    Poly g = Z.finite_part(F);
    const auto& gc = g.coeffs();
    for (int j = 0; j <= top; ++j) {
        Fq acc{0};
        for (std::size_t i = 0; i < gc.size(); ++i) acc = F.add(acc, F.mul(alpha.coords[static_cast<std::size_t>(j) + i], gc[i]));
        if (acc.v) return false;
    }
    return true;
}

struct MinDegree {
    int degree = 0;
    std::vector<DivisorP1> minimal;
};

/// deg alpha and every divisor of that degree through which alpha factors.
inline MinDegree min_degree(const LinearForm& alpha) {
    const Field& F = *alpha.F;
    const int D = alpha.D();
    for (int m = 0; m <= D + 1; ++m) {
        MinDegree r{m, {}};
        for (auto& Z : divisors_of_degree(F, m))
            if (factors_through(alpha, Z)) r.minimal.push_back(std::move(Z));
        if (!r.minimal.empty()) {
            require(2 * m <= D + 2, "linear form needs a divisor of degree above D/2 + 1");
            return r;
        }
    }
    throw ConsistencyFailure("no divisor of degree <= D + 1 found");
}

// ---------------------------------------------------------------- restricted forms

/// Per-place linear functionals on O_v / pi^m in the digit basis T^j pi^i.
struct RestrictedForm {
    DivisorP1 Z;
    std::vector<std::vector<Fq>> local;  // aligned with Z.parts

    /// Local top digit block (i = m - 1) is nonzero at every place.
    bool is_nondegenerate() const {
        for (std::size_t t = 0; t < Z.parts.size(); ++t) {
            const auto& [v, m] = Z.parts[t];
            bool nz = false;
            for (int j = 0; j < v.degree; ++j) nz |= local[t][static_cast<std::size_t>((m - 1) * v.degree + j)].v != 0;
            if (!nz) return false;
        }
        return true;
    }
    std::vector<LocalRing> rings() const {
        std::vector<LocalRing> r;
        for (const auto& [v, m] : Z.parts) r.emplace_back(v, m);
        return r;
    }
    /// Restriction to a single component.
    RestrictedForm component(std::size_t t) const { return RestrictedForm{DivisorP1{{Z.parts[t]}}, {local[t]}}; }
};

inline Fq apply_local(const Field& F, const std::vector<Fq>& ell, const std::vector<Fq>& digits) {
    Fq acc{0};
    for (std::size_t i = 0; i < ell.size(); ++i) acc = F.add(acc, F.mul(ell[i], digits[i]));
    return acc;
}

/// Local functionals representing alpha on Z, or nullopt if alpha does not factor through Z.
inline std::optional<RestrictedForm> restrict_form(const LinearForm& alpha, const DivisorP1& Z) {
    const Field& F = *alpha.F;
    const int D = alpha.D();
    RestrictedForm out{Z, {}};
    auto rings = out.rings();
    std::size_t cols = 0;
    for (const auto& R : rings) cols += static_cast<std::size_t>(R.dim());
    Matrix A(F, static_cast<std::size_t>(D + 1), cols);
    for (int i = 0; i <= D; ++i) {
        Poly Ti = Poly::monomial(F, static_cast<unsigned>(i), F.one());
        std::size_t off = 0;
        for (const auto& R : rings) {
            auto d = R.digits(R.restrict_section(Ti, D));
            for (std::size_t j = 0; j < d.size(); ++j) A.at(static_cast<std::size_t>(i), off + j) = d[j];
            off += d.size();
        }
    }
    auto y = solve(A, alpha.coords);
    if (!y) return std::nullopt;
    std::size_t off = 0;
    for (const auto& R : rings) {
        out.local.emplace_back(y->begin() + static_cast<long>(off), y->begin() + static_cast<long>(off + static_cast<std::size_t>(R.dim())));
        off += static_cast<std::size_t>(R.dim());
    }
    return out;
}

/// Number of nondegenerate functionals on O_Z.
inline Int nondegenerate_count(const DivisorP1& Z, const Field& F) {
    Int n = 1;
    for (const auto& [v, m] : Z.parts) {
        Int Q = ipow(Int(F.q()), static_cast<unsigned>(v.degree));
        n *= ipow(Q, static_cast<unsigned>(m)) - ipow(Q, static_cast<unsigned>(m - 1));
    }
    return n;
}

// ---------------------------------------------------------------- character sums

/// S_1(alpha) = sum_{deg a <= e} psi(alpha(a^k)) by direct summation.
inline Cyclotomic S1_direct(const LinearForm& alpha, unsigned k, unsigned e, std::uint64_t budget = 50000000) {
    const Field& F = *alpha.F;
    if (alpha.D() != static_cast<int>(k * e)) throw std::invalid_argument("linear form has the wrong dimension");
    std::uint64_t count = checked_pow(F.q(), e + 1, budget, "direct S1 summation");
    std::vector<Int> bins(F.p(), 0);
    for (std::uint64_t i = 0; i < count; ++i) bins[F.trace(alpha(Poly::from_index(F, i, e + 1).pow(k)))] += 1;
    return Cyclotomic::from_int_bins(F.p(), bins);
}

/// All S_1 values at once, indexed by LinearForm::index().
inline CycloTable S1_table(const Field& F, unsigned k, unsigned e) { return dual_table(power_histogram(F, k, e)); }

/// S_Z by enumerating O_Z as a product of local rings.
inline Cyclotomic SZ_direct(const RestrictedForm& vbar, const Field& F, unsigned k, std::uint64_t budget = 20000000) {
    auto rings = vbar.rings();
    Int size = 1;
    for (const auto& R : rings) size *= R.size();
    if (size > budget) throw BudgetExceeded("direct S_Z enumeration too large");
    // Per component: histogram of traces of ell(a^k), then convolve over components.
    std::vector<Int> acc(F.p(), 0);
    acc[0] = 1;
    for (std::size_t t = 0; t < rings.size(); ++t) {
        const auto& R = rings[t];
        std::vector<Int> h(F.p(), 0);
        for (std::uint64_t i = 0; i < R.size(); ++i) {
            Poly a = R.element(i);
            Poly ak = R.reduce(a.pow(k));
            h[F.trace(apply_local(F, vbar.local[t], R.digits(ak)))] += 1;
        }
        std::vector<Int> next(F.p(), 0);
        for (unsigned x = 0; x < F.p(); ++x)
            for (unsigned y = 0; y < F.p(); ++y) next[(x + y) % F.p()] += acc[x] * h[y];
        acc.swap(next);
    }
    return Cyclotomic::from_int_bins(F.p(), acc) * Rational(1, size);
}

/// S_Z through the CRT bijection H^0(O(deg Z - 1)) -> O_Z: a single global enumeration.
inline Cyclotomic SZ_global(const RestrictedForm& vbar, const Field& F, unsigned k, std::uint64_t budget = 20000000) {
    auto rings = vbar.rings();
    const int dz = vbar.Z.degree();
    std::uint64_t count = checked_pow(F.q(), static_cast<unsigned>(dz), budget, "global S_Z enumeration");
    std::vector<Int> bins(F.p(), 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        Poly a = Poly::from_index(F, i, static_cast<unsigned>(dz));
        Fq val{0};
        for (std::size_t t = 0; t < rings.size(); ++t) {
            const auto& R = rings[t];
            Poly loc = R.restrict_section(a, dz - 1);
            val = F.add(val, apply_local(F, vbar.local[t], R.digits(R.reduce(loc.pow(k)))));
        }
        bins[F.trace(val)] += 1;
    }
    return Cyclotomic::from_int_bins(F.p(), bins) * Rational(1, Int(count));
}

/// S_{m[v]} by the descent recursion; ell must be nondegenerate and p must not divide k.
inline Cyclotomic SZ_local(const Place& v, int m, const std::vector<Fq>& ell, unsigned k) {
    const Field& F = v.field();
    if (k % F.p() == 0) throw std::invalid_argument("recursion needs p not dividing k");
    const Rational Qinv(1, ipow(Int(F.q()), static_cast<unsigned>(v.degree)));
    if (m == 0) return Cyclotomic::integer(F.p(), 1);
    {
        RestrictedForm chk{DivisorP1{{{v, m}}}, {ell}};
        if (!chk.is_nondegenerate()) throw std::invalid_argument("degenerate local functional");
    }
    if (m == 1) {
        LocalRing R(v, 1);
        std::vector<Int> bins(F.p(), 0);
        for (std::uint64_t i = 0; i < R.size(); ++i) {
            Poly a = R.element(i);
            bins[F.trace(apply_local(F, ell, R.digits(R.reduce(a.pow(k)))))] += 1;
        }
        return Cyclotomic::from_int_bins(F.p(), bins) * Qinv;
    }
    if (m <= static_cast<int>(k)) return Cyclotomic::integer(F.p(), Qinv);
    // ell'(y) = ell(pi^k y) on O / pi^{m-k}: shift digit blocks by k.
    const int dv = v.degree;
    std::vector<Fq> shifted(ell.begin() + static_cast<long>(k) * dv, ell.end());
    return SZ_local(v, m - static_cast<int>(k), shifted, k) * Qinv;
}

/// Product of local recursions over the primary decomposition.
inline Cyclotomic SZ(const RestrictedForm& vbar, const Field& F, unsigned k) {
    if (!vbar.is_nondegenerate()) throw std::invalid_argument("restricted form is degenerate");
    Cyclotomic r = Cyclotomic::integer(F.p(), 1);
    for (std::size_t t = 0; t < vbar.Z.parts.size(); ++t) {
        const auto& [v, m] = vbar.Z.parts[t];
        r *= SZ_local(v, m, vbar.local[t], k);
    }
    return r;
}

// ---------------------------------------------------------------- residue representative

/// Local section r_v with ell(x) = coeff_{M-1}(x r mod pi^m), M = m deg v, i.e. the
/// residue of x r dT / pi^m (du / u^m at infinity).
struct ResidueForm {
    DivisorP1 Z;
    std::vector<Poly> local;

    bool invertible() const {
        for (std::size_t t = 0; t < Z.parts.size(); ++t)
            if ((local[t] % Z.parts[t].first.pi).is_zero()) return false;
        return true;
    }
};

inline Fq residue_pairing(const Poly& x, const Poly& r, const Poly& pim) {
    Poly w = (x * r) % pim;
    return w.coeff(static_cast<std::size_t>(pim.deg() - 1));
}

inline ResidueForm tilde_alpha(const RestrictedForm& vbar) {
    ResidueForm out{vbar.Z, {}};
    auto rings = vbar.rings();
    for (std::size_t t = 0; t < rings.size(); ++t) {
        const auto& R = rings[t];
        const Field& F = R.field();
        const auto M = static_cast<std::size_t>(R.dim());
        // Column c: pairing of basis element b_i with T^c.
        Matrix A(F, M, M);
        for (std::size_t i = 0; i < M; ++i) {
            Poly bi = R.basis(static_cast<int>(i));
            for (std::size_t c = 0; c < M; ++c)
                A.at(i, c) = residue_pairing(bi, Poly::monomial(F, static_cast<unsigned>(c), F.one()), R.modulus());
        }
        auto sol = solve(A, vbar.local[t]);
        require(sol.has_value(), "residue pairing is not perfect");
        Poly r(F, *sol);
        for (std::size_t i = 0; i < M; ++i)
            require(residue_pairing(R.basis(static_cast<int>(i)), r, R.modulus()) == vbar.local[t][i], "residue representative does not reproduce the functional");
        out.local.push_back(std::move(r));
    }
    return out;
}

/// Right-hand side of the circle identity for every target f:
/// q^{-(ke+1)} sum_alpha S_1(alpha)^s psi(-alpha(f)), exact.
inline std::vector<Rational> circle_counts(const Field& F, unsigned k, unsigned s, unsigned e) {
    CycloTable tab = S1_table(F, k, e);
    const unsigned p = F.p();
    std::vector<std::int64_t> acc(p), cur(p), next(p);
    for (std::size_t a = 0; a < tab.size(); ++a) {
        std::copy_n(&tab.bins[a * p], p, cur.begin());
        std::fill(acc.begin(), acc.end(), 0);
        acc[0] = 1;
        for (unsigned t = 0; t < s; ++t) {
            std::fill(next.begin(), next.end(), 0);
            for (unsigned i = 0; i < p; ++i)
                for (unsigned j = 0; j < p; ++j) {
                    std::int64_t prod;
                    if (__builtin_mul_overflow(acc[i], cur[j], &prod)) throw std::overflow_error("S1 power overflows 64 bits");
                    next[(i + j) % p] = detail::checked_add(next[(i + j) % p], prod);
                }
            acc.swap(next);
        }
        std::copy(acc.begin(), acc.end(), &tab.bins[a * p]);
    }
    CycloTable back = inverse_dual_table(std::move(tab));
    std::vector<Rational> out(back.size());
    const Int scale = ipow(Int(F.q()), k * e + 1);
    for (std::size_t f = 0; f < back.size(); ++f) out[f] = Rational(back.integer_value(f), scale);
    return out;
}

// ---------------------------------------------------------------- arc statistics

struct ArcSplit {
    std::uint64_t total = 0, major = 0, minor = 0;
    std::map<int, std::uint64_t> by_degree;
    Int divisor_tally;           // sum over deg Z <= e + 1 of nondegenerate functionals
    std::uint64_t pair_tally = 0;  // (alpha, Z) pairs found by enumeration
    bool tallies_agree = false;
    bool major_matches_tally = false;
    bool uniqueness_expected = false;  // 2(e+1) <= ke+1
    // k = 2 decomposition: divisors W of degree e+1 containing infinity.
    bool quadratic_checked = false;
    bool quadratic_all_factor = false;
    std::uint64_t quadratic_min_count = 0, quadratic_max_count = 0;
    std::vector<int> alpha_degree;  // by alpha index
};

/// Classify every alpha on H^0(O(ke)) and cross-check with the divisor side.
inline ArcSplit arc_split(const Field& F, unsigned k, unsigned e, std::uint64_t budget = 2000000) {
    const int D = static_cast<int>(k * e);
    ArcSplit out;
    out.total = checked_pow(F.q(), static_cast<unsigned>(D + 1), budget, "linear form enumeration");
    const int major_cut = static_cast<int>(e) + 1;
    std::vector<DivisorP1> small;
    for (int m = 0; m <= major_cut; ++m)
        for (auto& Z : divisors_of_degree(F, m)) small.push_back(std::move(Z));
    for (const auto& Z : small) out.divisor_tally += nondegenerate_count(Z, F);

    std::vector<DivisorP1> quad;
    if (k == 2) {
        for (auto& W : divisors_of_degree(F, major_cut))
            if (W.mult_infinity() > 0) quad.push_back(std::move(W));
        out.quadratic_checked = true;
        out.quadratic_all_factor = true;
        out.quadratic_min_count = UINT64_MAX;
    }

    out.alpha_degree.resize(out.total);
    for (std::uint64_t idx = 0; idx < out.total; ++idx) {
        LinearForm a = LinearForm::from_index(F, idx, D);
        auto md = min_degree(a);
        out.alpha_degree[idx] = md.degree;
        out.by_degree[md.degree]++;
        (md.degree <= major_cut ? out.major : out.minor)++;
        for (const auto& Z : small) {
            if (!factors_through(a, Z)) continue;
            bool nondeg = true;
            for (const auto& [v, m] : Z.parts)
                if (factors_through(a, Z.plus(v, -1))) nondeg = false;
            if (nondeg) out.pair_tally++;
        }
        if (k == 2) {
            std::uint64_t c = 0;
            for (const auto& W : quad)
                if (factors_through(a, W)) ++c;
            if (c == 0) out.quadratic_all_factor = false;
            out.quadratic_min_count = std::min(out.quadratic_min_count, c);
            out.quadratic_max_count = std::max(out.quadratic_max_count, c);
        }
    }
    out.tallies_agree = Int(out.pair_tally) == out.divisor_tally;
    out.uniqueness_expected = 2 * (e + 1) <= k * e + 1;
    out.major_matches_tally = Int(out.major) == out.divisor_tally;
    if (out.uniqueness_expected) require(out.major_matches_tally, "major arc count differs from divisor tally");
    require(out.tallies_agree, "nondegenerate pair enumeration differs from the closed-form tally");
    return out;
}

}  // namespace wfl
