// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <wfl/checks.hpp>
#include <wfl/counting.hpp>
#include <wfl/densities.hpp>
#include <wfl/polygon.hpp>
#include <wfl/singular_locus.hpp>

#include "oracles.hpp"

#include <sys/resource.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace wfl;

namespace {

// Pinned tolerances and limits.
constexpr double kCircleSeconds = 60;
constexpr double kPolygonSeconds = 5;
constexpr double kConvergenceSeconds = 600;
constexpr double kConvergenceRssKb = 4.0 * 1024 * 1024;
constexpr double kTailWidth = 1e-4;
constexpr double kCountAllSeconds = 30;
constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
    bool ok = true;
    std::ostringstream note;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) note << "first failure: " << what << "; ";
        ok = ok && cond;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

long peak_rss_kb() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return ru.ru_maxrss;
}

LinearForm random_form(const Field& F, int D, std::mt19937_64& rng) {
    LinearForm a{&F, std::vector<Fq>(static_cast<std::size_t>(D + 1))};
    for (auto& c : a.coords) c = Fq{static_cast<std::uint32_t>(rng() % F.q())};
    return a;
}

GroupFn random_fn(const Field& F, unsigned n, std::mt19937_64& rng, unsigned maxv) {
    GroupFn g = GroupFn::zeros(F, n);
    for (auto& v : g.values) v = rng() % (maxv + 1);
    return g;
}

void check_circle_identity(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t values = 0;
    for (auto [q, k, s, e] : std::vector<std::array<unsigned, 4>>{{3, 2, 2, 1}, {3, 2, 3, 1}, {5, 2, 2, 1}, {5, 3, 2, 1}}) {
        auto chk = circle_verify(Field::get(q), k, s, e);
        values += chk.values;
        v.expect(chk.passed(), "(q,k,s,e)=(" + std::to_string(q) + "," + std::to_string(k) + "," + std::to_string(s) + "," + std::to_string(e) + ")");
    }
    const double t = seconds_since(t0);
    v.expect(t < kCircleSeconds, "runtime");
    v.note << values << " values of f exact, " << t << " s";
}

void check_local_sum_table(Verdict& v) {
    std::mt19937_64 rng(kSeed);
    std::uint64_t forms = 0, direct = 0;
    double worst = 0;
    for (unsigned q : {5u, 7u})
        for (unsigned k : {2u, 3u}) {
            const Field& F = Field::get(q);
            if (k % F.p() == 0) continue;
            auto t = local_sum_table(F, k, 2, rng);
            forms += t.forms;
            direct += t.direct_checked;
            worst = std::max(worst, t.worst_bound_ratio);
            v.expect(t.passed(), "q=" + std::to_string(q) + " k=" + std::to_string(k) + " " + t.first_failure);
        }
    v.note << forms << " forms, " << direct << " against direct summation, worst |S|/bound " << worst;
}

void check_multiplicativity(Verdict& v) {
    std::mt19937_64 rng(kSeed);
    auto m = multiplicativity_check(Field::get(5), 2, 200, 4, rng);
    v.expect(m.passed(), m.first_failure);
    v.note << m.trials << " splittings, " << m.failures << " failures";
}

void check_major_arcs(Verdict& v) {
    auto m = major_arc_check(Field::get(3), 2, 2);
    v.expect(m.passed(), "alpha " + std::to_string(m.first_failure.value_or(0)));
    v.note << m.alphas << " alphas, " << m.pairs << " (alpha, Z) pairs";
}

void check_katz(Verdict& v) {
    std::uint64_t checked = 0, unstable = 0;
    double ratio = 0;
    for (auto [q, k, e] : std::vector<std::array<unsigned, 3>>{{3, 2, 1}, {3, 2, 2}, {5, 3, 1}}) {
        auto rep = katz_bound_check(Field::get(q), e, k, 3);
        checked += rep.checked;
        unstable += rep.unstable;
        ratio = std::max(ratio, rep.max_ratio);
        v.expect(rep.violations == 0, "(q,k,e)=(" + std::to_string(q) + "," + std::to_string(k) + "," + std::to_string(e) + ")");
    }
    v.note << checked << " alphas checked, " << unstable << " unstable (reported only), max |S|/bound " << ratio;
}

void check_exists_c(Verdict& v) {
    std::mt19937_64 rng(kSeed);
    const Field& F = Field::get(3);
    const unsigned k = 2;
    std::uint64_t comparisons = 0;
    for (unsigned e = 1; e <= 2; ++e)
        for (int t = 0; t < 20; ++t) {
            auto alpha = random_form(F, static_cast<int>(k * e), rng);
            for (const auto& Z : min_degree(alpha).minimal)
                for (unsigned m = 1; m <= 2; ++m) {
                    auto rep = compare_exists_c(alpha, Z, e, k, m);
                    ++comparisons;
                    v.expect(rep.all_agree(), "alpha " + std::to_string(alpha.index()) + " m=" + std::to_string(m));
                    v.expect(rep.in_sing == sing_points(alpha, e, k, m), "count alpha " + std::to_string(alpha.index()));
                }
        }
    v.note << comparisons << " pointwise comparisons over F_3 and F_9";
}

void check_polygon(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    int instances = 0;
    for (unsigned p : {3u, 5u, 7u, 11u, 13u}) {
        auto g = gamma(2, p);
        ++instances;
        v.expect(g.gamma == 0 && g.polygon.certified, "k=2 p=" + std::to_string(p));
    }
    v.expect(gamma(3, 5).gamma == Rational(2, 5), "gamma(3,5) = 2/5");
    for (unsigned k = 3; k <= 7; ++k)
        for (unsigned p = k + 1; p <= 31; ++p) {
            if (!detail::is_prime(p)) continue;
            auto g = gamma(k, p);
            ++instances;
            v.expect(g.polygon.certified, "certificate k=" + std::to_string(k) + " p=" + std::to_string(p));
            v.expect(gamma_lower_bound(k) <= g.gamma && g.gamma <= gamma_upper_bound(k, p), "bounds k=" + std::to_string(k) + " p=" + std::to_string(p));
        }
    const double t = seconds_since(t0);
    v.expect(t < kPolygonSeconds, "runtime");
    v.note << instances << " polygons certified, gamma(3,5) = " << to_string(gamma(3, 5).gamma) << ", " << t << " s";
}

void check_densities(Verdict& v) {
    std::mt19937_64 rng(kSeed);
    const Field& F = Field::get(5);
    const unsigned k = 2;
    int compared = 0, identities = 0, positive = 0;
    for (unsigned s : {2u, 5u})
        for (int dv : {1, 2}) {
            auto pl = places_of_degree(F, dv);
            const Place& pv = pl[rng() % pl.size()];
            for (int w = 0; w <= 2; ++w) {
                Poly unit = Poly::from_index(F, 1 + rng() % 4, 1) + pv.pi * Poly::from_index(F, rng() % 5, 1);
                Poly f = unit * pv.pi.pow(static_cast<unsigned>(w));
                const std::string tag = "s=" + std::to_string(s) + " deg v=" + std::to_string(dv) + " w=" + std::to_string(w);
                auto rec = ell_v(f, pv, s, k);
                auto en = density_enumeration(f, pv, s, k, 6, 1u << 20);
                ++compared;
                v.expect(!en.flagged && rec.value == en.value, "recursion vs enumeration " + tag);
                if (positivity_hypotheses(F, k, s)) {
                    ++positive;
                    v.expect(rec.value > 0, "positivity " + tag);
                }
                for (int r = 1; r <= 3; ++r) {
                    if (LocalRing(pv, r).size() > 20000) continue;
                    auto lhs = truncated_local_series(f, pv, s, k, r);
                    Rational rhs = Rational(local_count(f, pv, s, k, r)) / rpow(Rational(residue_size(pv)), r * static_cast<long>(s - 1));
                    ++identities;
                    v.expect(lhs.is_rational() && lhs.rational_value() == rhs, "truncated identity " + tag + " r=" + std::to_string(r));
                }
            }
        }
    // Local counts themselves against tuple listing at T = 0.
    const Place origin = Place::finite(Poly(F, {Fq{0}, F.one()}));
    for (const auto& f : std::vector<std::vector<unsigned>>{{1}, {0, 1}, {0, 0, 2}, {3, 1}})
        for (int r = 1; r <= 3; ++r) v.expect(local_count(Poly::from_ints(F, f), origin, 2, k, r) == oracle::naive_local_count(5, 2, k, r, f), "listing r=" + std::to_string(r));
    v.note << compared << " densities, " << identities << " truncated identities, " << positive << " positivity checks";
}

void check_manin(Verdict& v) {
    int identities = 0;
    for (auto [n, d, q] : std::vector<std::array<unsigned, 3>>{{2, 2, 3}, {3, 2, 3}, {3, 3, 5}})
        for (int dv : {1, 2}) {
            const Field& F = Field::get(q);
            Place pv = places_of_degree(F, dv).front();
            Int Q = residue_size(pv);
            Rational lhs = (1 - rpow(Rational(Q), -static_cast<long>(n + 1 - d))) * ell_v(Poly(F), pv, n + 1, d).value;
            Int pts = fermat_point_count(n, d, Field::of_size(static_cast<std::uint32_t>(Q)));
            ++identities;
            v.expect(lhs == manin_local_factor(n, Q, pts), "(n,d,q,deg v)=(" + std::to_string(n) + "," + std::to_string(d) + "," + std::to_string(q) + "," + std::to_string(dv) + ")");
        }
    const Field& F3 = Field::get(3);
    std::string counts;
    for (unsigned e : {0u, 1u}) {
        FermatInstance inst{&F3, 2, 2, e};
        const u128 moe = morphism_count_moebius(inst), direct = morphism_count_direct(inst);
        v.expect(moe == direct, "Moebius vs direct e=" + std::to_string(e));
        counts += (counts.empty() ? "" : ", ") + std::string("e=") + std::to_string(e) + ": " + to_string(direct);
    }
    v.note << identities << " local identities; morphism counts " << counts;
}

void check_convergence(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    const Field& F = Field::get(5);
    std::vector<double> r;
    for (unsigned e = 1; e <= 4; ++e) {
        auto row = convergence_row(F, 2, 6, e, 6);
        r.push_back(row.r);
        v.expect(row.r_lo <= row.r && row.r <= row.r_hi, "interval e=" + std::to_string(e));
        v.expect(row.tail_width < kTailWidth, "tail width e=" + std::to_string(e));
    }
    v.expect(r.back() < r.front(), "r(4) < r(1)");
    const double t = seconds_since(t0);
    v.expect(t < kConvergenceSeconds, "runtime");
    v.expect(peak_rss_kb() < kConvergenceRssKb, "peak memory");
    v.note << "r(1..4) =";
    for (double x : r) v.note << " " << x;
    v.note << ", " << t << " s, peak " << peak_rss_kb() / 1024 << " MB";
}

void check_appendix(Verdict& v) {
    const Rational delta(1, 10);
    std::string e0s;
    for (unsigned d : {3u, 4u, 5u})
        for (unsigned g : {0u, 1u}) {
            const auto n = static_cast<unsigned>(ceil(Rational(5 * d - 5) + Rational(d - 1) * delta)) + 1;
            auto above = appendix_verify(n, d, g, delta, {});
            const std::string tag = "(n,d,g)=(" + std::to_string(n) + "," + std::to_string(d) + "," + std::to_string(g) + ")";
            v.expect(above.above_threshold && above.passed(), tag);
            e0s += (e0s.empty() ? "" : " ") + tag + ":" + (above.e0 ? std::to_string(*above.e0) : "-");
            auto below = appendix_verify(5 * d - 6, d, g, delta, {});
            v.expect(!below.above_threshold && below.any_fails_at_e_max(), "n=5d-6 d=" + std::to_string(d) + " g=" + std::to_string(g));
        }
    v.note << "e0 " << e0s;
}

void check_performance(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    auto N = count_all(Field::get(5), 2, 6, 4);
    const double t = seconds_since(t0);
    Int total = 0;
    for (auto x : N.values) total += from_u128(x);
    v.expect(N.size() == 1953125, "group size");
    v.expect(total == ipow(Int(5), 6 * 5), "total mass");
    v.expect(t < kCountAllSeconds, "runtime");
    std::mt19937_64 rng(kSeed);
    const Field& F = Field::get(3);
    int oracle_runs = 0;
    for (unsigned n = 1; n <= 3; ++n)
        for (unsigned s = 1; s <= 3; ++s) {
            GroupFn h = random_fn(F, n, rng, 6);
            ++oracle_runs;
            v.expect(convolve_power(h, s).values == oracle::naive_power(h, s).values, "convolve_power n=" + std::to_string(n) + " s=" + std::to_string(s));
        }
    v.note << "count_all over 5^9 points in " << t << " s; " << oracle_runs << " cubic-oracle comparisons";
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria = {
        {"circle identity", check_circle_identity},
        {"local sum table", check_local_sum_table},
        {"multiplicativity", check_multiplicativity},
        {"major-arc evaluation", check_major_arcs},
        {"Katz bound", check_katz},
        {"singular-locus equivalence", check_exists_c},
        {"polygon and gamma", check_polygon},
        {"local densities", check_densities},
        {"Manin local identity", check_manin},
        {"empirical convergence", check_convergence},
        {"inequality verifier", check_appendix},
        {"performance gate", check_performance},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.ok = false;
            v.note << "exception: " << e.what();
        }
        failures += !v.ok;
        std::printf("%s %2zu %s: %s\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, v.note.str().c_str());
        std::fflush(stdout);
    }
    return failures;
}
