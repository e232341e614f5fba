#include <wfl/counting.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace wfl;

namespace {

// Independent count for q = 3, k = 2, s = 3, e = 1: (c0 + c1 T)^2 = c0^2 + 2 c0 c1 T + c1^2 T^2.
long count_q3_squares_linear(int f0, int f1, int f2) {
    long n = 0;
    for (int t = 0; t < 729; ++t) {
        int v = t, s0 = 0, s1 = 0, s2 = 0;
        for (int i = 0; i < 3; ++i) {
            int c0 = v % 3, c1 = (v / 3) % 3;
            v /= 9;
            s0 += c0 * c0;
            s1 += 2 * c0 * c1;
            s2 += c1 * c1;
        }
        if (s0 % 3 == f0 && s1 % 3 == f1 && s2 % 3 == f2) ++n;
    }
    return n;
}

// Projective points of sum x_i^d = 0 over a prime field by listing normalized representatives.
long projective_count_prime(unsigned n, unsigned d, unsigned p) {
    long count = 0;
    std::vector<unsigned> x(n + 1, 0);
    std::uint64_t total = 1;
    for (unsigned i = 0; i <= n; ++i) total *= p;
    for (std::uint64_t t = 1; t < total; ++t) {
        std::uint64_t v = t;
        for (unsigned i = 0; i <= n; ++i) {
            x[i] = static_cast<unsigned>(v % p);
            v /= p;
        }
        unsigned lead = 0;
        for (unsigned i = n + 1; i-- > 0;)
            if (x[i]) {
                lead = x[i];
                break;
            }
        if (lead != 1) continue;
        std::uint64_t s = 0;
        for (unsigned i = 0; i <= n; ++i) {
            std::uint64_t pw = 1;
            for (unsigned j = 0; j < d; ++j) pw = pw * x[i] % p;
            s += pw;
        }
        if (s % p == 0) ++count;
    }
    return count;
}

}  // namespace

TEST(CountBruteforce, SmallValues) {
    const Field& F = Field::get(3);
    EXPECT_EQ(count_bruteforce({&F, 2, 1, 0, Poly(F)}), 1u);
    EXPECT_EQ(count_bruteforce({&F, 2, 2, 0, Poly::constant(F, Fq{2})}), 4u);
    Poly T2 = Poly::monomial(F, 2, F.one());
    long oracle = count_q3_squares_linear(0, 0, 1);
    EXPECT_EQ(count_bruteforce({&F, 2, 3, 1, T2}), static_cast<u128>(oracle));
    EXPECT_EQ(oracle, 6);
}

TEST(CountBruteforce, BudgetRefused) {
    const Field& F = Field::get(5);
    EXPECT_THROW(count_bruteforce({&F, 2, 10, 3, Poly(F)}), BudgetExceeded);
}

TEST(CountAll, MatchesBruteForceTables) {
    for (auto [q, k, s, e] : std::vector<std::tuple<unsigned, unsigned, unsigned, unsigned>>{{3, 2, 2, 0}, {3, 2, 3, 1}, {5, 2, 2, 1}, {5, 3, 2, 1}, {4, 3, 2, 1}}) {
        const Field& F = Field::of_size(q);
        auto fast = count_all(F, k, s, e);
        auto slow = count_bruteforce_all(F, k, s, e);
        EXPECT_EQ(fast.values, slow.values) << q << k << s << e;
        u128 mass = 1;
        for (unsigned i = 0; i < s * (e + 1); ++i) mass *= q;
        EXPECT_EQ(fast.total(), mass);
    }
    const Field& F3 = Field::get(3);
    auto t = count_all(F3, 2, 2, 0);
    for (unsigned f = 0; f < 3; ++f) {
        long direct = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if ((a * a + b * b) % 3 == static_cast<int>(f)) ++direct;
        EXPECT_EQ(t.values[f], static_cast<u128>(direct));
    }
}

TEST(CountAll, SpotCheckAgainstBruteForce) {
    const Field& F = Field::get(5);
    auto all = count_all(F, 3, 4, 1);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 10; ++i) {
        std::uint64_t idx = rng() % all.size();
        Poly f = Poly::from_index(F, idx, 4);
        EXPECT_EQ(all.values[idx], count_bruteforce({&F, 3, 4, 1, f}));
    }
}

TEST(CountAll, ScalingInvariance) {
    const Field& F = Field::get(5);
    const unsigned k = 3;
    auto all = count_all(F, k, 3, 1);
    for (std::uint32_t c = 1; c < 5; ++c) {
        Fq ck = F.pow(Fq{c}, k);
        for (std::size_t i = 0; i < all.size(); ++i) {
            auto co = all.coords(i);
            for (auto& x : co) x = F.mul(x, ck);
            ASSERT_EQ(all.values[i], all.values[all.index(co)]);
        }
    }
}

TEST(Moebius, ClassicalSquarefreeSums) {
    for (unsigned q : {2u, 3u, 4u, 5u}) {
        auto c = squarefree_moebius_sums(Field::of_size(q), 4);
        EXPECT_EQ(c[0], 1);
        EXPECT_EQ(c[1], -Int(q));
        for (unsigned j = 2; j <= 4; ++j) EXPECT_EQ(c[j], 0);
    }
}

TEST(Fermat, PointCounts) {
    EXPECT_EQ(fermat_point_count(2, 2, Field::get(3)), 4);
    EXPECT_EQ(fermat_point_count(1, 1, Field::get(3)), 1);
    EXPECT_EQ(fermat_point_count(3, 2, Field::get(3)), 16);
    for (auto [n, d, p] : std::vector<std::tuple<unsigned, unsigned, unsigned>>{{2, 2, 3}, {3, 2, 3}, {3, 3, 5}, {2, 3, 7}, {1, 2, 3}})
        EXPECT_EQ(fermat_point_count(n, d, Field::get(p)), projective_count_prime(n, d, p));
}

TEST(Morphisms, ConstantMapsAndCrossCheck) {
    const Field& F = Field::get(3);
    EXPECT_EQ(morphism_count_direct({&F, 2, 2, 0}), 4u);
    EXPECT_EQ(morphism_count_moebius({&F, 2, 2, 0}), 4u);
    EXPECT_EQ(morphism_count_direct({&F, 1, 2, 0}), 0u);
    EXPECT_EQ(morphism_count_moebius({&F, 1, 2, 0}), 0u);
    auto direct = morphism_count_direct({&F, 2, 2, 1});
    EXPECT_EQ(morphism_count_moebius({&F, 2, 2, 1}), direct);
    EXPECT_EQ(morphism_count_moebius({&F, 2, 2, 2}), morphism_count_direct({&F, 2, 2, 2}));
    const Field& F5 = Field::get(5);
    EXPECT_EQ(morphism_count_moebius({&F5, 2, 2, 1}), morphism_count_direct({&F5, 2, 2, 1}));
}
