#include <wfl/group_fourier.hpp>
#include <wfl/places.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <random>
#include <sstream>

using namespace wfl;

namespace {

GroupFn random_fn(const Field& F, unsigned n, std::mt19937_64& rng, unsigned maxv = 10) {
    GroupFn g = GroupFn::zeros(F, n);
    for (auto& v : g.values) v = rng() % (maxv + 1);
    return g;
}

Fq dot(const Field& F, const std::vector<Fq>& a, const std::vector<Fq>& b) {
    Fq acc{0};
    for (std::size_t i = 0; i < a.size(); ++i) acc = F.add(acc, F.mul(a[i], b[i]));
    return acc;
}

// Naive O(N^2) transform with the trace pairing.
std::vector<std::uint64_t> naive_dft(const GroupFn& g, const TransformPrime& tp, bool inverse) {
    const Field& F = *g.F;
    std::uint64_t w = inverse ? detail::powmod(tp.omega, F.p() - 1, tp.P) : tp.omega;
    std::vector<std::uint64_t> out(g.size(), 0);
    for (std::size_t b = 0; b < g.size(); ++b) {
        auto bc = g.coords(b);
        u128 acc = 0;
        for (std::size_t x = 0; x < g.size(); ++x) {
            unsigned t = F.trace(dot(F, bc, g.coords(x)));
            acc = (acc + static_cast<u128>(static_cast<std::uint64_t>(g.values[x] % tp.P)) * detail::powmod(w, t, tp.P)) % tp.P;
        }
        out[b] = static_cast<std::uint64_t>(acc);
    }
    return out;
}


}  // namespace

TEST(TransformPrime, SelectionIsDeterministicAndValid) {
    auto a = select_primes(5, Int(1) << 120), b = select_primes(5, Int(1) << 120);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].P, b[i].P);
        EXPECT_EQ(a[i].P % 5, 1u);
        EXPECT_GT(a[i].P, std::uint64_t(1) << 50);
        EXPECT_NE(a[i].omega, 1u);
        EXPECT_EQ(detail::powmod(a[i].omega, 5, a[i].P), 1u);
    }
    EXPECT_THROW(TransformPrime::make(13, 5), std::invalid_argument);
}

TEST(Transform, DeltaGoesToConstant) {
    const Field& F = Field::get(3, 2);
    GroupFn d = GroupFn::zeros(F, 2);
    d.values[0] = 1;
    auto tp = select_primes(3, 1)[0];
    auto fw = transform(d, tp, Direction::Forward);
    for (auto v : fw.values) EXPECT_EQ(static_cast<std::uint64_t>(v), 1u);
}

TEST(Transform, MatchesNaiveDftAndInverts) {
    std::mt19937_64 rng(5);
    for (auto [p, f, n] : std::vector<std::tuple<int, int, int>>{{3, 1, 3}, {2, 3, 1}, {3, 2, 1}, {2, 2, 2}, {5, 1, 2}}) {
        const Field& F = Field::get(p, f);
        GroupFn g = random_fn(F, n, rng);
        auto tp = select_primes(F.p(), 1)[0];
        auto fw = transform(g, tp, Direction::Forward);
        auto naive = naive_dft(g, tp, false);
        for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(static_cast<std::uint64_t>(fw.values[i]), naive[i]);
        auto back = transform(fw, tp, Direction::Inverse);
        auto naive_back = naive_dft(fw, tp, true);
        for (std::size_t i = 0; i < g.size(); ++i) {
            EXPECT_EQ(static_cast<std::uint64_t>(back.values[i]), naive_back[i]);
            EXPECT_EQ(static_cast<std::uint64_t>(back.values[i]), static_cast<std::uint64_t>(g.values[i] * g.size() % tp.P));
        }
        // Parseval: sum F(b) F(-b) = q^n sum f^2.
        u128 lhs = 0, rhs = 0;
        for (std::size_t b = 0; b < g.size(); ++b) {
            auto c = g.coords(b);
            for (auto& x : c) x = F.neg(x);
            lhs = (lhs + static_cast<u128>(static_cast<std::uint64_t>(fw.values[b])) * static_cast<std::uint64_t>(fw.values[g.index(c)])) % tp.P;
            rhs = (rhs + g.values[b] * g.values[b]) % tp.P;
        }
        EXPECT_EQ(static_cast<std::uint64_t>(lhs), static_cast<std::uint64_t>(rhs * g.size() % tp.P));
    }
}

TEST(ConvolvePower, AgreesWithCubicOracle) {
    std::mt19937_64 rng(9);
    const Field& F = Field::get(3);
    for (unsigned n = 1; n <= 3; ++n)
        for (unsigned s = 1; s <= 3; ++s) {
            GroupFn h = random_fn(F, n, rng, 6);
            auto fast = convolve_power(h, s);
            auto slow = oracle::naive_power(h, s);
            EXPECT_EQ(fast.values, slow.values) << "n=" << n << " s=" << s;
            u128 mass = 1;
            for (unsigned i = 0; i < s; ++i) mass *= h.total();
            EXPECT_EQ(fast.total(), mass);
        }
    const Field& F4 = Field::get(2, 2);
    GroupFn h = random_fn(F4, 2, rng, 6);
    EXPECT_EQ(convolve_power(h, 3).values, oracle::naive_power(h, 3).values);
}

TEST(ConvolvePower, DeltaTranslates) {
    const Field& F = Field::get(5);
    GroupFn d = GroupFn::zeros(F, 2);
    std::vector<Fq> g{Fq{2}, Fq{3}};
    d.values[d.index(g)] = 1;
    auto r = convolve_power(d, 4);
    std::vector<Fq> sg{F.from_int(8), F.from_int(12)};
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r.values[i], i == r.index(sg) ? 1u : 0u);
}

TEST(ConvolvePower, DisjointPrimeSetsAgree) {
    std::mt19937_64 rng(21);
    const Field& F = Field::get(3);
    GroupFn h = random_fn(F, 3, rng, 9);
    const unsigned s = 4;
    auto first = select_primes(3, convolution_bound(h, s));
    auto second = select_primes(3, convolution_bound(h, s), static_cast<unsigned>(first.size()));
    for (const auto& a : first)
        for (const auto& b : second) ASSERT_NE(a.P, b.P);
    EXPECT_EQ(convolve_power(h, s, first).values, convolve_power(h, s, second).values);
}

TEST(ConvolvePower, InsufficientModulusIsRefused) {
    const Field& F = Field::get(3);
    GroupFn h = GroupFn::zeros(F, 2);
    for (auto& v : h.values) v = 1000;
    auto one = select_primes(3, 1);
    EXPECT_THROW(convolve_power(h, 6, one), BudgetExceeded);
}

TEST(DualValue, MatchesDirectCharacterSum) {
    std::mt19937_64 rng(13);
    for (auto [p, f, n] : std::vector<std::tuple<int, int, int>>{{3, 1, 2}, {3, 2, 1}, {2, 2, 2}}) {
        const Field& F = Field::get(p, f);
        GroupFn h = random_fn(F, n, rng);
        auto table = dual_table(h);
        for (std::size_t a = 0; a < h.size(); ++a) {
            auto alpha = h.coords(a);
            Cyclotomic direct(F.p());
            for (std::size_t x = 0; x < h.size(); ++x)
                direct += char_psi(F, dot(F, alpha, h.coords(x))) * Rational(from_u128(h.values[x]));
            auto dv = dual_value(h, alpha);
            ASSERT_EQ(dv, direct);
            ASSERT_EQ(table.value(a), direct);
            auto neg = alpha;
            for (auto& x : neg) x = F.neg(x);
            EXPECT_EQ(dv.conj(), dual_value(h, neg));
        }
        EXPECT_EQ(dual_value(h, std::vector<Fq>(n, Fq{0})), Cyclotomic::integer(F.p(), Rational(from_u128(h.total()))));
        // Inverse table round trip: q^n times the original.
        auto back = inverse_dual_table(table);
        for (std::size_t x = 0; x < h.size(); ++x) EXPECT_EQ(back.integer_value(x), from_u128(h.values[x]) * Int(h.size()));
    }
}

TEST(DualValue, UniformHistogramVanishes) {
    const Field& F = Field::get(5);
    GroupFn h = GroupFn::zeros(F, 2);
    for (auto& v : h.values) v = 7;
    for (std::size_t a = 1; a < h.size(); ++a) EXPECT_TRUE(dual_value(h, h.coords(a)).is_zero());
    EXPECT_THROW(dual_value(h, {Fq{1}}), std::invalid_argument);
}

TEST(GroupFnDump, RoundTrip) {
    std::mt19937_64 rng(1);
    GroupFn g = random_fn(Field::get(3, 2), 2, rng, 1000);
    std::stringstream ss;
    write_groupfn(ss, g);
    GroupFn r = read_groupfn(ss);
    EXPECT_EQ(r.values, g.values);
    EXPECT_EQ(r.n, g.n);
    EXPECT_EQ(r.F, g.F);
}
