#include <wfl/cyclotomic.hpp>
#include <wfl/field.hpp>
#include <wfl/linalg.hpp>
#include <wfl/places.hpp>
#include <wfl/poly.hpp>

#include <gtest/gtest.h>

#include <complex>
#include <numbers>
#include <random>

using namespace wfl;

namespace {

// Independent F_9 = F_3[t]/(t^2+1) arithmetic on (a, b) = a + b t.
struct F9 {
    int a, b;
};
F9 f9_mul(F9 x, F9 y) { return {((x.a * y.a - x.b * y.b) % 3 + 3) % 3, (x.a * y.b + x.b * y.a) % 3}; }
F9 f9_pow(F9 x, int e) {
    F9 r{1, 0};
    while (e--) r = f9_mul(r, x);
    return r;
}

long necklace(long q, int n) {
    // (1/n) sum_{d|n} mu(d) q^{n/d}
    auto mu = [](int d) {
        int r = 1;
        for (int p = 2; p * p <= d; ++p)
            if (d % p == 0) {
                d /= p;
                if (d % p == 0) return 0;
                r = -r;
            }
        return d > 1 ? -r : r;
    };
    long s = 0;
    for (int d = 1; d <= n; ++d)
        if (n % d == 0) {
            long pw = 1;
            for (int i = 0; i < n / d; ++i) pw *= q;
            s += mu(d) * pw;
        }
    return s / n;
}

}  // namespace

TEST(Field, ModulusIsLeastIrreducible) {
    EXPECT_EQ(Field::get(3, 2).spec().modulus, (std::vector<std::uint32_t>{1, 0, 1}));
    EXPECT_EQ(Field::get(2, 2).spec().modulus, (std::vector<std::uint32_t>{1, 1, 1}));
    EXPECT_EQ(Field::get(2, 3).spec().modulus, (std::vector<std::uint32_t>{1, 0, 1, 1}));
}

TEST(Field, AxiomsExhaustive) {
    for (auto [p, f] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {7, 1}, {2, 2}, {2, 3}, {3, 2}, {5, 2}, {3, 3}, {7, 2}}) {
        const Field& F = Field::get(p, f);
        const std::uint32_t q = F.q();
        for (std::uint32_t x = 0; x < q; ++x) {
            Fq a{x};
            EXPECT_EQ(F.add(a, F.neg(a)).v, 0u);
            if (x) {
                EXPECT_EQ(F.mul(a, F.inv(a)).v, 1u);
            }
            for (std::uint32_t y = 0; y < q; ++y) {
                Fq b{y};
                EXPECT_EQ(F.add(a, b), F.add(b, a));
                EXPECT_EQ(F.mul(a, b), F.mul(b, a));
                for (std::uint32_t z = 0; z < q; z += (q > 25 ? 3 : 1)) {
                    Fq c{z};
                    ASSERT_EQ(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)));
                    ASSERT_EQ(F.add(F.add(a, b), c), F.add(a, F.add(b, c)));
                    ASSERT_EQ(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)));
                }
            }
        }
    }
}

TEST(Field, F9AgreesWithIndependentArithmetic) {
    const Field& F = Field::get(3, 2);
    for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) {
            F9 x{a % 3, a / 3}, y{b % 3, b / 3};
            F9 z = f9_mul(x, y);
            EXPECT_EQ(F.mul(Fq{std::uint32_t(a)}, Fq{std::uint32_t(b)}).v, std::uint32_t(z.a + 3 * z.b));
        }
}

TEST(Character, Basics) {
    for (auto [p, f] : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {2, 3}, {3, 2}, {5, 2}}) {
        const Field& F = Field::get(p, f);
        EXPECT_EQ(char_psi(F, F.zero()), Cyclotomic::integer(F.p(), 1));
        Cyclotomic sum(F.p());
        for (std::uint32_t x = 0; x < F.q(); ++x) sum += char_psi(F, Fq{x});
        EXPECT_TRUE(sum.is_zero());
        for (std::uint32_t x = 0; x < F.q(); ++x)
            for (std::uint32_t y = 0; y < F.q(); ++y)
                ASSERT_EQ(char_psi(F, F.add(Fq{x}, Fq{y})), char_psi(F, Fq{x}) * char_psi(F, Fq{y}));
    }
}

TEST(Character, TraceOfF9GeneratorByFrobeniusSum) {
    const Field& F = Field::get(3, 2);
    int checked = 0;
    for (int a = 1; a < 9; ++a) {
        F9 x{a % 3, a / 3};
        bool gen = true;
        for (int e = 1; e < 8; ++e) {
            F9 y = f9_pow(x, e);
            if (y.a == 1 && y.b == 0) gen = false;
        }
        if (!gen) continue;
        F9 xp = f9_pow(x, 3);
        int tr_a = (x.a + xp.a) % 3, tr_b = (x.b + xp.b) % 3;
        ASSERT_EQ(tr_b, 0);
        if (tr_a != 2) continue;
        EXPECT_EQ(char_psi(F, Fq{std::uint32_t(a)}), Cyclotomic::root(3, 2));
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(Character, OrthogonalityForEveryNonzeroFunctional) {
    for (auto [p, f] : std::vector<std::pair<int, int>>{{3, 2}, {2, 3}, {5, 2}}) {
        const Field& F = Field::get(p, f);
        std::uint32_t nfun = F.q();  // functionals as digit vectors
        for (std::uint32_t lam = 1; lam < nfun; ++lam) {
            auto c = F.digits(Fq{lam});
            std::vector<Rational> bins(F.p(), Rational(0));
            for (std::uint32_t x = 0; x < F.q(); ++x) {
                auto d = F.digits(Fq{x});
                std::uint32_t v = 0;
                for (std::uint32_t i = 0; i < F.f(); ++i) v = (v + c[i] * d[i]) % F.p();
                bins[v] += 1;
            }
            EXPECT_TRUE(Cyclotomic::from_bins(F.p(), bins).is_zero());
        }
    }
}

TEST(Cyclotomic, ComplexEmbeddingMatchesDirectSum) {
    std::mt19937_64 rng(7);
    for (unsigned p : {2u, 3u, 5u, 7u}) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Rational> bins(p);
            std::complex<double> direct{0, 0};
            for (unsigned j = 0; j < p; ++j) {
                int w = static_cast<int>(rng() % 21) - 10;
                bins[j] = w;
                double ang = 2 * std::numbers::pi * j / p;
                direct += double(w) * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            auto z = Cyclotomic::from_bins(p, bins);
            EXPECT_LE(std::abs(z.to_complex() - direct), 1e-9 * std::max(1.0, std::abs(direct)));
            auto w = z * z.conj();
            EXPECT_NEAR(w.to_complex().real(), std::norm(direct), 1e-9 * std::max(1.0, std::norm(direct)));
            EXPECT_NEAR(w.to_complex().imag(), 0, 1e-9);
            EXPECT_EQ(z.conj().conj(), z);
        }
    }
}

TEST(Poly, DivisionIdentityRandom) {
    std::mt19937_64 rng(11);
    for (auto [p, f] : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {2, 3}, {3, 2}}) {
        const Field& F = Field::get(p, f);
        for (int t = 0; t < 200; ++t) {
            auto rnd = [&](int len) {
                std::vector<Fq> c(len);
                for (auto& x : c) x = Fq{static_cast<std::uint32_t>(rng() % F.q())};
                return Poly(F, c);
            };
            Poly a = rnd(1 + int(rng() % 9)), b = rnd(1 + int(rng() % 5));
            if (b.is_zero()) continue;
            auto [qt, r] = a.divmod(b);
            EXPECT_EQ(qt * b + r, a);
            EXPECT_LT(r.deg(), b.deg());
            if (!a.is_zero()) {
                EXPECT_EQ((a * b).deg(), a.deg() + b.deg());
            }
        }
    }
}

TEST(Poly, ZeroDegreeIsBelowEveryInteger) {
    const Field& F = Field::get(3);
    EXPECT_LT(Poly(F).deg(), -1000000);
    EXPECT_TRUE(Poly(F) < Poly::constant(F, F.one()));
}

TEST(Places, SmallFields) {
    auto p2 = places_up_to(Field::get(2), 1, true);
    ASSERT_EQ(p2.size(), 3u);
    EXPECT_EQ(p2[0].pi.to_ints(), (std::vector<std::uint32_t>{0, 1}));
    EXPECT_EQ(p2[1].pi.to_ints(), (std::vector<std::uint32_t>{1, 1}));
    EXPECT_TRUE(p2[2].is_infinity());

    auto p3 = places_up_to(Field::get(3), 2, false);
    int d1 = 0, d2 = 0;
    for (const auto& v : p3) (v.degree == 1 ? d1 : d2)++;
    EXPECT_EQ(d1, 3);
    EXPECT_EQ(d2, 3);
    // Trial division oracle for the degree-2 ones.
    const Field& F3 = Field::get(3);
    for (const auto& v : p3)
        if (v.degree == 2)
            for (std::uint32_t r = 0; r < 3; ++r) {
                EXPECT_NE(v.pi.eval(Fq{r}).v, 0u);
            }

    auto p5 = places_up_to(Field::get(5), 3, false);
    std::vector<long> counts(4, 0);
    for (const auto& v : p5) counts[static_cast<std::size_t>(v.degree)]++;
    for (int d = 1; d <= 3; ++d) EXPECT_EQ(counts[static_cast<std::size_t>(d)], necklace(5, d));
    EXPECT_EQ(counts[1], 5);
    EXPECT_EQ(counts[2], 10);
    EXPECT_EQ(counts[3], 40);
    for (std::size_t i = 1; i < p5.size(); ++i) EXPECT_TRUE(p5[i - 1] < p5[i]);
    (void)F3;
}

TEST(Places, NecklaceCountsOverExtensionField) {
    auto pl = places_up_to(Field::get(2, 2), 3, false);
    std::vector<long> counts(4, 0);
    for (const auto& v : pl) counts[static_cast<std::size_t>(v.degree)]++;
    for (int d = 1; d <= 3; ++d) EXPECT_EQ(counts[static_cast<std::size_t>(d)], necklace(4, d));
}

TEST(Places, CapIsEnforced) { EXPECT_THROW(places_up_to(Field::get(5), 4, false, 50), std::length_error); }

TEST(Extension, IdentityAndHomomorphism) {
    const Field& F3 = Field::get(3);
    auto id = extend_field(F3, 1);
    for (std::uint32_t x = 0; x < 3; ++x) EXPECT_EQ(id(Fq{x}).v, x);

    for (auto [p, f, m] : std::vector<std::tuple<int, int, int>>{{3, 1, 2}, {2, 2, 2}, {3, 2, 2}, {2, 1, 3}, {5, 1, 2}}) {
        const Field& F = Field::get(p, f);
        auto ext = extend_field(F, m);
        const Field& B = *ext.big;
        for (std::uint32_t x = 0; x < F.q(); ++x) {
            EXPECT_EQ(B.pow(ext(Fq{x}), F.q()), ext(Fq{x}));
            for (std::uint32_t y = 0; y < F.q(); ++y) {
                EXPECT_EQ(ext(F.add(Fq{x}, Fq{y})), B.add(ext(Fq{x}), ext(Fq{y})));
                EXPECT_EQ(ext(F.mul(Fq{x}, Fq{y})), B.mul(ext(Fq{x}), ext(Fq{y})));
            }
        }
    }
}

TEST(Extension, F9GeneratorOrder) {
    auto ext = extend_field(Field::get(3), 2);
    const Field& B = *ext.big;
    Fq g = B.generator();
    int order = 1;
    for (Fq x = g; x != B.one(); x = B.mul(x, g)) ++order;
    EXPECT_EQ(order, 8);
}

TEST(Extension, BudgetExceeded) { EXPECT_THROW(extend_field(Field::get(5), 7), std::length_error); }

TEST(Linalg, SolveAndNullspace) {
    const Field& F = Field::get(5);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        Matrix M(F, 3, 5);
        for (auto& x : M.a) x = Fq{static_cast<std::uint32_t>(rng() % 5)};
        for (const auto& v : nullspace(M)) {
            for (std::size_t i = 0; i < 3; ++i) {
                Fq acc{0};
                for (std::size_t j = 0; j < 5; ++j) acc = F.add(acc, F.mul(M.at(i, j), v[j]));
                EXPECT_EQ(acc.v, 0u);
            }
        }
        EXPECT_EQ(nullspace(M).size() + rank(M), 5u);
        std::vector<Fq> x0(5);
        for (auto& x : x0) x = Fq{static_cast<std::uint32_t>(rng() % 5)};
        std::vector<Fq> b(3, Fq{0});
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 5; ++j) b[i] = F.add(b[i], F.mul(M.at(i, j), x0[j]));
        auto sol = solve(M, b);
        ASSERT_TRUE(sol);
    }
}

TEST(LocalRing, DigitsRoundTrip) {
    const Field& F = Field::get(3);
    auto v = places_of_degree(F, 2)[0];
    LocalRing R(v, 3);
    for (std::uint64_t i = 0; i < R.size(); i += 7) {
        Poly x = R.element(i);
        EXPECT_EQ(R.from_digits(R.digits(x)), x);
    }
    LocalRing Rinf(Place::infinity(F), 2);
    Poly f = Poly::from_ints(F, {1, 2, 0, 1});
    EXPECT_EQ(Rinf.restrict_section(f, 3).to_ints(), (std::vector<std::uint32_t>{1}));
    EXPECT_EQ(Rinf.restrict_section(f, 4).to_ints(), (std::vector<std::uint32_t>{0, 1}));
}
