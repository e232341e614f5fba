#pragma once

#include "field.hpp"
#include "parallel.hpp"
#include "rational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wfl {

// ---------------------------------------------------------------------------
// The lattice polygon and gamma

struct LatticePoint {
    long i = 0, j = 0;
    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// Upward-closed hull of {(i, j) : p | (k-1)i - j, gcd(i, j, p) = 1}. Only the
/// lowest point of each column matters, so `generators` holds those inside the
/// box i <= box. The boundary is the vertical ray above the first vertex, the
/// convex chain through `vertices`, then the horizontal ray from the last one.
struct LatticePolygon {
    unsigned k = 0, p = 0;
    std::vector<LatticePoint> generators;
    std::vector<LatticePoint> vertices;
    long box = 0;
    bool certified = false;

    /// Whether (x, y) lies in the polygon.
    bool contains(const Rational& x, const Rational& y) const {
        if (vertices.empty()) return false;
        if (x < vertices.front().i || y < vertices.back().j) return false;
        for (std::size_t t = 0; t + 1 < vertices.size(); ++t) {
            const auto& a = vertices[t];
            const auto& b = vertices[t + 1];
            if (x > b.i) continue;
            // On or above the segment a-b.
            return (y - a.j) * (b.i - a.i) >= (x - a.i) * (b.j - a.j);
        }
        return true;
    }
    bool contains(long x, long y) const { return contains(Rational(x), Rational(y)); }
};

namespace detail {

inline long cross(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
    return (a.i - o.i) * (b.j - o.j) - (a.j - o.j) * (b.i - o.i);
}

inline std::vector<LatticePoint> column_minima(unsigned k, unsigned p, long box) {
    std::vector<LatticePoint> pts;
    for (long i = 1; i <= box; ++i)
        if (i % p != 0) pts.push_back({i, static_cast<long>((static_cast<std::uint64_t>(k - 1) * static_cast<std::uint64_t>(i)) % p)});
    return pts;
}

// Lower hull by monotone chain, cut where it stops descending.
inline std::vector<LatticePoint> descending_chain(const std::vector<LatticePoint>& pts) {
    std::vector<LatticePoint> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), pt) <= 0) hull.pop_back();
        hull.push_back(pt);
    }
    std::size_t end = 1;
    while (end < hull.size() && hull[end].j < hull[end - 1].j) ++end;
    hull.resize(end);
    return hull;
}

}  // namespace detail

inline LatticePolygon lattice_polygon(unsigned k, unsigned p) {
    if (k < 2 || !detail::is_prime(p)) throw std::invalid_argument("lattice_polygon: need k >= 2 and p prime");
    if ((k - 1) % p == 0) throw std::invalid_argument("lattice_polygon: p divides k - 1");
    LatticePolygon poly{k, p, {}, {}, 2L * p * (k + 2), false};
    for (;;) {
        auto b1 = detail::descending_chain(detail::column_minima(k, p, poly.box));
        auto b2 = detail::descending_chain(detail::column_minima(k, p, 2 * poly.box));
        auto b4 = detail::descending_chain(detail::column_minima(k, p, 4 * poly.box));
        if (b1 == b2 && b2 == b4) {
            poly.vertices = std::move(b1);
            poly.generators = detail::column_minima(k, p, poly.box);
            poly.certified = true;
            return poly;
        }
        poly.box *= 2;
    }
}

struct GammaReport {
    Rational gamma;
    /// Where the ray through (2, k-2) enters the polygon; empty for k = 2.
    std::optional<std::pair<Rational, Rational>> entry;
    LatticePolygon polygon;
};

/// Largest gamma with (1, (k-2)/2) in gamma times the polygon.
inline GammaReport gamma(unsigned k, unsigned p) {
    GammaReport r{Rational(0), std::nullopt, lattice_polygon(k, p)};
    if (k == 2) return r;
    const auto& v = r.polygon.vertices;
    const long dy = static_cast<long>(k) - 2;
    // Each boundary piece is a half-plane a x + b y >= c with a, b >= 0; the ray
    // t (2, k-2) satisfies it once t >= c / (2a + (k-2) b).
    auto need = [&](long a, long b, long c) { return Rational(c, 2 * a + dy * b); };
    Rational t = std::max(need(1, 0, v.front().i), need(0, 1, v.back().j));
    for (std::size_t s = 0; s + 1 < v.size(); ++s) {
        long a = v[s].j - v[s + 1].j, b = v[s + 1].i - v[s].i;
        t = std::max(t, need(a, b, a * v[s].i + b * v[s].j));
    }
    r.entry = std::make_pair(2 * t, dy * t);
    r.gamma = 1 / (2 * t);
    return r;
}

inline Rational gamma_lower_bound(unsigned k) { return Rational(k - 2, 2 * k - 2); }
inline Rational gamma_upper_bound(unsigned k, unsigned p) { return gamma_lower_bound(k) * (1 + Rational(k, p)); }

// ---------------------------------------------------------------------------
// Certified logarithms

/// Rational bounds lo <= x <= hi.
struct Enclosure {
    Rational lo, hi;
    Rational width() const { return hi - lo; }
};

namespace detail {

inline constexpr unsigned kLogBits = 112;

// 2 atanh(num/den) for 0 <= num/den <= 1/3, each term floored at 2^-kLogBits.
inline Enclosure two_atanh(const Int& num, const Int& den) {
    const Int scale = Int(1) << kLogBits;
    Int pn = num, pd = den, acc = 0;
    const Int n2 = num * num, d2 = den * den;
    long terms = 0;
    for (long j = 1;; j += 2) {
        if (pn == 0) break;
        acc += pn * scale / (pd * j);
        ++terms;
        pn *= n2;
        pd *= d2;
        // The remaining terms sum to at most z^j / (j (1 - z^2)) <= 9 z^j / (8 j).
        if (pn * scale * 9 < pd * 8 * (j + 2)) break;
    }
    Rational lo(acc, scale);
    // Floor loses under one unit per term; the tail is under one unit too.
    Rational hi(acc + terms + 1, scale);
    return {2 * lo, 2 * hi};
}

}  // namespace detail

/// ln x for an integer x >= 1.
inline Enclosure log_enclosure(const Int& x) {
    if (x < 1) throw std::invalid_argument("log_enclosure: x must be positive");
    if (x == 1) return {Rational(0), Rational(0)};
    const auto ln2 = detail::two_atanh(1, 3);
    const unsigned m = msb_or_zero(x);
    const Int pow2 = Int(1) << m;
    const auto rest = detail::two_atanh(x - pow2, x + pow2);
    return {m * ln2.lo + rest.lo, m * ln2.hi + rest.hi};
}

/// ln(k+1) / ln q.
inline Enclosure log_ratio(unsigned k, const Int& q) {
    if (q < 2) throw std::invalid_argument("log_ratio: q must be at least 2");
    auto a = log_enclosure(Int(k) + 1), b = log_enclosure(q);
    return {a.lo / b.hi, a.hi / b.lo};
}

// ---------------------------------------------------------------------------
// Thresholds on q, s and theta

struct ThresholdReport {
    unsigned k = 0, p = 0;
    Int q;
    std::optional<long> s;
    Rational gamma;
    Enclosure log_ratio;
    Rational q_min;
    bool q_ok = false;
    /// The two lower bounds on s at the upper end of the log ratio; empty when
    /// the denominator is not positive, so no s qualifies.
    std::optional<Rational> s_bound_gamma, s_bound_k;
    std::optional<Rational> s_min;
    std::optional<long> s_min_integer;
    std::optional<Rational> theta_strict, theta_weak;
    /// min of the two theta bounds when both are positive.
    std::optional<Rational> theta_max;
    std::optional<Rational> delta_max;
    bool feasible = false;
    bool conditions_hold = false;
    bool consistent = true;
};

inline ThresholdReport thresholds(unsigned k, unsigned p, const Int& q, std::optional<long> s = std::nullopt) {
    if (k < 2 || !detail::is_prime(p) || k % p == 0) throw std::invalid_argument("thresholds: need k >= 2, p prime, p not dividing k");
    ThresholdReport r;
    r.k = k;
    r.p = p;
    r.q = q;
    r.s = s;
    r.gamma = gamma(k, p).gamma;
    r.log_ratio = log_ratio(k, q);
    r.q_min = Rational(ipow(Int(k) + 1, 2 * (k - 1)));
    r.q_ok = q > r.q_min;
    // Both s bounds increase with the log ratio, so the upper end is conservative.
    const Rational& L = r.log_ratio.hi;
    const Rational den_gamma = 1 - r.gamma - 2 * L, den_k = 1 - 2 * Rational(k - 1) * L;
    if (den_gamma > 0) r.s_bound_gamma = 2 * (k - r.gamma - 2 * L) / den_gamma;
    if (den_k > 0) r.s_bound_k = Rational(2 * k) / den_k;
    if (r.s_bound_gamma && r.s_bound_k) {
        r.s_min = std::max(*r.s_bound_gamma, *r.s_bound_k);
        r.s_min_integer = static_cast<long>(floor(*r.s_min)) + 1;
    }
    if (!s) return r;
    const Rational sv(*s);
    // theta bounds decrease in the log ratio (for s >= 2 in the second one).
    const Rational& L2 = *s >= 2 ? r.log_ratio.hi : r.log_ratio.lo;
    r.theta_strict = (sv / 2 - k) / (k - 1) - sv * L;
    r.theta_weak = sv - k - (sv - 2) * ((1 + r.gamma) / 2 + L2) - 1;
    r.delta_max = (sv / 2 - k) / (k - 1);
    r.feasible = *r.theta_strict > 0 && *r.theta_weak > 0;
    if (r.feasible) r.theta_max = std::min(*r.theta_strict, *r.theta_weak);
    r.conditions_hold = r.q_ok && r.s_min && sv > *r.s_min;
    r.consistent = r.feasible == r.conditions_hold;
    return r;
}

// ---------------------------------------------------------------------------
// Dimension bound for a general hypersurface

/// dim Mor' for a degree triple; empty when there are no such maps.
using MorDim = std::function<std::optional<long>(long, long, long)>;

inline MorDim expected_mor_dim(long n, long g) {
    return [n, g](long i1, long i2, long i3) -> std::optional<long> { return (n + 1) * i1 + (n + 1) * i2 - (n - 1) * i3 - 2 * n * (g - 1); };
}

struct GeneralDimBound {
    Rational value;
    /// Best value of dim Mor' + 2 + j1 + j2 over the grid, with its j.
    std::optional<long> mor_branch;
    std::array<long, 3> argmax{0, 0, 0};
    long vanishing_branch = 0;  // every c_i = 0
    Rational graph_low_branch;  // image in the graph, smallest j1
    long graph_high_branch = 0;  // image in the graph, j1 = e
    std::uint64_t grid_points = 0;
    bool hypotheses_ok = false;
    std::string warning;
};

/// j3 is not bounded below by the constraints; the grid stops at j3_floor
/// (default -m, i.e. at most 2m points over the exceptional divisor).
inline GeneralDimBound general_dim_bound_rhs(long n, long d, long e, long m, long g, const MorDim& mor_dim = {}, std::optional<long> j3_floor = std::nullopt) {
    GeneralDimBound r;
    const MorDim dim = mor_dim ? mor_dim : expected_mor_dim(n, g);
    std::vector<std::string> why;
    if (n + 1 < 2 * d) why.push_back("n + 1 < 2d");
    if (d <= 2) why.push_back("d <= 2");
    else {
        Rational e_min = std::max(Rational(4 * g) - Rational(4 * (d - 1), d - 2) + Rational(2 * d, d - 2),
                                  n + 1 - 2 * d > 0 ? Rational(2 * ((n + 3) * d - 4), (n + 1 - 2 * d) * (d - 2)) : Rational(std::numeric_limits<long>::max()));
        if (!(Rational(e) > e_min)) why.push_back("e below the degree bound");
    }
    if (2 * m > d * e + 2) why.push_back("m > de/2 + 1");
    r.hypotheses_ok = why.empty();
    for (const auto& w : why) r.warning += (r.warning.empty() ? "" : "; ") + w;

    const long cm = static_cast<long>(ceil(Rational(m, d - 1)));
    r.vanishing_branch = m + cm + (n + 1) * (e + 1 - g - cm);
    const Rational x = Rational(d * e - m - 2 * g + 2, d - 1);
    r.graph_low_branch = m + x + (n + 1) * (e + 1 - g - x);
    r.graph_high_branch = 2 * g - 1 + 2 * m;

    const long lo3 = j3_floor.value_or(-m);
    for (long j1 = 0; j1 <= e; ++j1)
        for (long j2 = 0; j2 <= m + 2 * g - 2 - e; ++j2)
            for (long j3 = lo3; j3 <= std::min({m, j2, (d - 1) * j1}); ++j3) {
                ++r.grid_points;
                auto dm = dim(e - j1, m + 2 * g - 2 - e - j2, m - j3);
                if (!dm) continue;
                long v = *dm + 2 + j1 + j2;
                if (!r.mor_branch || v > *r.mor_branch) {
                    r.mor_branch = v;
                    r.argmax = {j1, j2, j3};
                }
            }
    r.value = std::max({Rational(r.vanishing_branch), r.graph_low_branch, Rational(r.graph_high_branch)});
    if (r.mor_branch) r.value = std::max(r.value, Rational(*r.mor_branch));
    return r;
}

// ---------------------------------------------------------------------------
// The inequality system for the general hypersurface case

struct AppendixOptions {
    long e_min = 1;
    long e_max = 300;
    /// Largest e in the (e, m, j) grid used to re-derive the three case bounds.
    long grid_e_max = 10;
    /// Witness triples (i1, i2, i3) range over [0, witness_max]^3.
    long witness_max = 20;
    /// Allowance subtracted from each derived constant.
    Rational slack = 0;
};

struct AppendixReport {
    long n = 0, d = 0, g = 0;
    Rational delta;
    bool above_threshold = false;  // n > 5d - 5 + (d - 1) delta
    long e_min = 0, e_max = 0;
    /// Per inequality, the least e0 with the inequality holding for every m at
    /// every e in [e0, e_max]; empty if it fails at e_max.
    std::array<std::optional<long>, 3> e0_each;
    std::optional<long> e0;
    std::array<std::uint64_t, 3> failures{0, 0, 0};
    std::array<bool, 3> fails_at_e_max{false, false, false};

    std::uint64_t grid_points = 0;
    bool side_conditions_ok = true;
    /// Constants left over once each case bound is subtracted.
    std::array<Rational, 3> case_constants;
    /// min over the grid of (needed - case bound - constant); >= -slack passes.
    std::array<Rational, 3> min_margin;
    bool reductions_ok = false;

    std::array<std::uint64_t, 3> witnesses{0, 0, 0};
    std::array<std::uint64_t, 3> witness_failures{0, 0, 0};
    std::array<std::uint64_t, 3> witness_not_tight{0, 0, 0};
    std::optional<std::array<long, 3>> first_bad_witness;

    bool any_fails_at_e_max() const { return fails_at_e_max[0] || fails_at_e_max[1] || fails_at_e_max[2]; }
    bool witnesses_ok() const {
        for (int c = 0; c < 3; ++c)
            if (witness_failures[c] || witness_not_tight[c] || !witnesses[c]) return false;
        return true;
    }
    /// Above the threshold everything must hold from e0 on; at or below it some
    /// inequality must fail at e_max.
    bool passed() const {
        bool core = reductions_ok && side_conditions_ok && witnesses_ok();
        return above_threshold ? core && e0.has_value() : any_fails_at_e_max();
    }
};

namespace detail {

inline long to_long(const Int& v) {
    if (v > std::numeric_limits<long>::max() / 1024 || v < std::numeric_limits<long>::min() / 1024) throw std::invalid_argument("appendix_verify: delta too large");
    return v.convert_to<long>();
}

// The three target inequalities at (e, m), delta = a / b with b > 0.
inline std::array<bool, 3> target_inequalities(long n, long d, long g, long a, long b, long e, long m) {
    using W = i128;
    const W base = W(n + 1) * (e + 1 - g);
    const long cm = m >= 0 ? (m + d - 2) / (d - 1) : -((-m) / (d - 1));
    const W first_l = W(b) * (m + cm + W(n + 1) * (e + 1 - g - cm));
    const W first_r = W(b) * (base - 4 * W(m)) - W(e) * a;
    const W x = W(d) * e - m - 2 * g + 2;
    const W second_l = W(b) * (W(d - 1) * m + x + W(n + 1) * (W(d - 1) * (e + 1 - g) - x));
    const W second_r = W(b) * (d - 1) * (base - 4 * W(m)) - W(d - 1) * e * a;
    const W third_l = W(b) * (2 * g - 1 + 2 * m);
    const W third_r = W(b) * (base - 2 * W(m)) - W(e) * a;
    return {first_l < first_r, second_l < second_r, third_l < third_r};
}

}  // namespace detail

inline AppendixReport appendix_verify(long n, long d, long g, const Rational& delta, const AppendixOptions& opt = {}) {
    if (d < 3 || g < 0 || n < 1 || delta < 0 || opt.e_min < 0 || opt.e_max < opt.e_min) throw std::invalid_argument("appendix_verify: need d >= 3, g >= 0, delta >= 0");
    AppendixReport r;
    r.n = n;
    r.d = d;
    r.g = g;
    r.delta = delta;
    r.e_min = opt.e_min;
    r.e_max = opt.e_max;
    r.above_threshold = Rational(n) > 5 * d - 5 + (d - 1) * delta;
    const long a = detail::to_long(numerator(delta)), b = detail::to_long(denominator(delta));

    // Target inequalities, every integer m in (e + 1 - 2g, de/2 + 1].
    const std::size_t ne = static_cast<std::size_t>(opt.e_max - opt.e_min + 1);
    std::vector<std::array<std::uint64_t, 3>> fails(ne, {0, 0, 0});
    parallel_for(ne, [&](std::size_t t) {
        const long e = opt.e_min + static_cast<long>(t);
        for (long m = e + 2 - 2 * g; 2 * m <= d * e + 2; ++m) {
            auto ok = detail::target_inequalities(n, d, g, a, b, e, m);
            for (int c = 0; c < 3; ++c) fails[t][c] += !ok[c];
        }
    }, 1);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t t = 0; t < ne; ++t) r.failures[c] += fails[t][c];
        r.fails_at_e_max[c] = fails[ne - 1][c] > 0;
        if (r.fails_at_e_max[c]) continue;
        long e0 = opt.e_min;
        for (std::size_t t = 0; t < ne; ++t)
            if (fails[t][c]) e0 = opt.e_min + static_cast<long>(t) + 1;
        r.e0_each[c] = e0;
    }
    if (r.e0_each[0] && r.e0_each[1] && r.e0_each[2]) r.e0 = std::max({*r.e0_each[0], *r.e0_each[1], *r.e0_each[2]});

    // Case reductions. Everything is scaled by S = 2b(d-2) to stay integral.
    using W = i128;
    const W S = W(2) * b * (d - 2);
    const W A_S = 2 * (W(2) * (n + 1) * b - 2 * W(a) - W(4 * d + 2) * b);  // A * S
    const W c1 = W(n + 1) * (1 - g) - 2 * g;
    const W c_S[3] = {c1 * S, (c1 - 5) * S, A_S * (1 - 2 * g) + (W(n + 1) * (1 - g) - 6) * S};
    const Rational A = Rational(2 * (n + 1) - 4 * d - 2, d - 2) - 2 * delta / (d - 2);
    r.case_constants = {Rational(static_cast<long>(c1)), Rational(static_cast<long>(c1 - 5)), A * (1 - 2 * g) + (n + 1) * (1 - g) - 6};

    const std::size_t ng = static_cast<std::size_t>(opt.grid_e_max + 1);
    struct Partial {
        std::uint64_t points = 0;
        bool side_ok = true;
        std::array<std::optional<W>, 3> margin;
    };
    std::vector<Partial> parts(ng);
    parallel_for(ng, [&](std::size_t t) {
        const long e = static_cast<long>(t);
        auto& out = parts[t];
        for (long m = e + 2 - 2 * g; 2 * m <= d * e + 2; ++m)
            for (long j1 = 0; j1 <= e; ++j1)
                for (long j2 = 0; j2 <= m + 2 * g - 2 - e; ++j2)
                    for (long j3 = -m; j3 <= std::min({m, j2, (d - 1) * j1}); ++j3) {
                        ++out.points;
                        const long i1 = e - j1, i2 = m + 2 * g - 2 - e - j2, i3 = m - j3;
                        if (i1 < 0 || i2 < 0 || i3 < 0 || i1 + i2 > i3 + 2 * g - 2 || d * (i2 + 1 - 2 * g) > (d - 2) * (i3 - 1)) out.side_ok = false;
                        const W need = S * (W(n + 1) * (e + 1 - g) - 4 * m - 2 - j1 - j2) - W(e) * a * 2 * (d - 2);
                        const W bound[3] = {
                            S * (W(n + 2) * i1 + i2 - 5 * W(i3)) - W(a) * 2 * (d - 2) * i1,
                            S * (W(n + 2) * i1 + i2) - W(b) * (d - 2) * 5 * d * i1 - W(a) * 2 * (d - 2) * i1,
                            S * i1 + A_S * i2,
                        };
                        for (int c = 0; c < 3; ++c) {
                            W mg = need - bound[c] - c_S[c];
                            if (!out.margin[c] || mg < *out.margin[c]) out.margin[c] = mg;
                        }
                    }
    }, 1);
    r.reductions_ok = true;
    for (int c = 0; c < 3; ++c) {
        std::optional<W> best;
        for (const auto& pt : parts)
            if (pt.margin[c] && (!best || *pt.margin[c] < *best)) best = pt.margin[c];
        r.min_margin[c] = best ? Rational(Int(static_cast<long long>(*best)), Int(static_cast<long long>(S))) : Rational(0);
        if (r.min_margin[c] < -opt.slack) r.reductions_ok = false;
    }
    for (const auto& pt : parts) {
        r.grid_points += pt.points;
        r.side_conditions_ok = r.side_conditions_ok && pt.side_ok;
    }

    // Sharpness witnesses.
    const Rational half_d(d, 2);
    auto needed = [&](const Rational& e, const Rational& m, const Rational& j1, const Rational& j2) { return (n + 1) * (e + 1 - g) - 4 * m - 2 - j1 - j2 - e * delta; };
    const Rational case_coef[3] = {n + 2 - delta, n + 2 - 5 * half_d - delta, A};
    for (long i1 = 0; i1 <= opt.witness_max; ++i1)
        for (long i2 = 0; i2 <= opt.witness_max; ++i2)
            for (long i3 = 0; i3 <= opt.witness_max; ++i3) {
                if (i1 + i2 > i3 + 2 * g - 2 || d * (i2 + 1 - 2 * g) > (d - 2) * (i3 - 1)) continue;
                const Rational I1(i1), I2(i2), I3(i3);
                for (int c = 0; c < 3; ++c) {
                    Rational e, m, j1, j2, j3, bound;
                    bool strict_j3 = false;
                    if (c == 0) {
                        if (!(I3 <= half_d * I1 + 1)) continue;
                        e = I1, m = I3, j1 = 0, j2 = I3 + 2 * g - 2 - I1 - I2, j3 = 0;
                        bound = case_coef[0] * I1 + I2 - 5 * I3;
                    } else if (c == 1) {
                        if (!(I3 > half_d * I1 + 1 && Rational(d - 2, 2) * I1 + 2 * g - 1 >= I2)) continue;
                        e = I1, m = half_d * I1 + 1, j1 = 0, j2 = Rational(d - 2, 2) * I1 + 2 * g - 1 - I2, j3 = m - I3;
                        bound = case_coef[1] * I1 + I2;
                        strict_j3 = true;
                    } else {
                        if (!(Rational(d - 2, 2) * I1 + 2 * g - 1 < I2)) continue;
                        e = Rational(2, d - 2) * (I2 + 1 - 2 * g), m = half_d * e + 1, j1 = e - I1, j2 = 0, j3 = m - I3;
                        bound = I1 + case_coef[2] * I2;
                    }
                    ++r.witnesses[c];
                    bool ok = j1 >= 0 && j2 >= 0 && j3 <= j2 && j3 <= (d - 1) * j1 && m <= half_d * e + 1;
                    ok = ok && e - j1 == I1 && m + 2 * g - 2 - e - j2 == I2 && m - j3 == I3;
                    if (strict_j3) ok = ok && j3 < 0;
                    if (!ok) {
                        ++r.witness_failures[c];
                        if (!r.first_bad_witness) r.first_bad_witness = std::array<long, 3>{i1, i2, i3};
                    }
                    if (needed(e, m, j1, j2) - bound != r.case_constants[c]) ++r.witness_not_tight[c];
                }
            }
    return r;
}

}  // namespace wfl
