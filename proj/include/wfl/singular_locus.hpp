#pragma once

#include "arcs.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "poly.hpp"
#include "rational.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace wfl {

constexpr std::uint64_t kDefaultSingBudget = std::uint64_t(1) << 26;

namespace detail {

inline std::vector<Fq> mul_coeffs(const Field& F, const std::vector<Fq>& a, const std::vector<Fq>& b) {
    std::vector<Fq> out(a.size() + b.size() - 1, Fq{0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].v) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = F.add(out[i + j], F.mul(a[i], b[j]));
    }
    return out;
}

inline std::vector<Fq> pow_coeffs(const Field& F, const std::vector<Fq>& a, unsigned n) {
    std::vector<Fq> r{F.one()};
    for (unsigned i = 0; i < n; ++i) r = mul_coeffs(F, r, a);
    return r;
}

inline std::vector<Fq> digits_of(std::uint64_t idx, std::uint32_t Q, std::size_t len) {
    std::vector<Fq> c(len);
    for (auto& x : c) {
        x = Fq{static_cast<std::uint32_t>(idx % Q)};
        idx /= Q;
    }
    return c;
}

inline std::uint64_t checked_space(std::uint32_t Q, std::size_t len, std::uint64_t budget) {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < len; ++i) {
        if (n > budget / Q) throw BudgetExceeded("point enumeration exceeds budget");
        n *= Q;
    }
    return n;
}

}  // namespace detail

inline Poly embed_poly(const Extension& ext, const Poly& f) {
    std::vector<Fq> c;
    c.reserve(static_cast<std::size_t>(std::max(f.deg() + 1, 0)));
    for (int i = 0; i <= f.deg(); ++i) c.push_back(ext(f.coeff(static_cast<std::size_t>(i))));
    return Poly(*ext.big, std::move(c));
}

/// Coordinates alpha(T^i) pushed into F_{q^m}; alpha extends F_{q^m}-linearly.
inline std::vector<Fq> embed_form(const Extension& ext, const LinearForm& alpha) {
    std::vector<Fq> out;
    out.reserve(alpha.coords.size());
    for (Fq c : alpha.coords) out.push_back(ext(c));
    return out;
}

/// alpha(P T^j) = 0 for j = 0..e, with P given by coefficients.
inline bool kills_all_shifts(const Field& B, const std::vector<Fq>& alpha, const std::vector<Fq>& P, unsigned e) {
    for (unsigned j = 0; j <= e; ++j) {
        Fq acc{0};
        for (std::size_t i = 0; i < P.size() && i + j < alpha.size(); ++i) acc = B.add(acc, B.mul(alpha[i + j], P[i]));
        if (acc.v) return false;
    }
    return true;
}

/// a in Sing_alpha: alpha(a^{k-1} b) = 0 for all b of degree <= e.
inline bool sing_member(const Field& B, const std::vector<Fq>& alpha, const std::vector<Fq>& a, unsigned e, unsigned k) {
    return kills_all_shifts(B, alpha, detail::pow_coeffs(B, a, k - 1), e);
}

/// #Sing_alpha(F_{q^m}) by enumerating all a of degree <= e.
inline std::uint64_t sing_points(const LinearForm& alpha, unsigned e, unsigned k, unsigned m, std::uint64_t budget = kDefaultSingBudget) {
    if (alpha.D() != static_cast<int>(k * e)) throw std::invalid_argument("alpha must live on degree ke");
    Extension ext = extend_field(*alpha.F, m);
    const Field& B = *ext.big;
    auto al = embed_form(ext, alpha);
    const std::uint64_t n = detail::checked_space(B.q(), e + 1, budget);
    std::atomic<std::uint64_t> count{0};
    parallel_for(n, [&](std::size_t idx) {
        if (sing_member(B, al, detail::digits_of(idx, B.q(), e + 1), e, k)) count.fetch_add(1, std::memory_order_relaxed);
    });
    return count.load();
}

/// Rank of the symmetric form (a, b) -> alpha(ab) on degree <= e (a Hankel matrix).
inline std::size_t hankel_rank(const LinearForm& alpha, unsigned e) {
    const Field& F = *alpha.F;
    Matrix M(F, e + 1, e + 1);
    for (unsigned i = 0; i <= e; ++i)
        for (unsigned j = 0; j <= e; ++j) M.at(i, j) = alpha.coords[i + j];
    return rank(M);
}

struct DimEstimate {
    enum class Method { Zero, Hankel, Counts };
    std::vector<std::pair<unsigned, std::uint64_t>> counts;
    int dim = 0;
    bool stable = true;
    Method method = Method::Counts;
};

inline const char* to_string(DimEstimate::Method m) {
    switch (m) {
    case DimEstimate::Method::Zero: return "zero";
    case DimEstimate::Method::Hankel: return "hankel";
    default: return "counts";
    }
}

inline int dim_from_count(std::uint64_t count, std::uint64_t Q) {
    if (count <= 1) return 0;
    return static_cast<int>(std::lround(std::log(static_cast<double>(count)) / std::log(static_cast<double>(Q))));
}

/// Dimension of Sing_alpha: exact for alpha = 0 and k = 2, otherwise from point counts up to m_max,
/// stable when the last two extensions agree.
inline DimEstimate sing_dim_estimate(const LinearForm& alpha, unsigned e, unsigned k, unsigned m_max, std::uint64_t budget = kDefaultSingBudget) {
    DimEstimate out;
    if (alpha.is_zero()) {
        out.method = DimEstimate::Method::Zero;
        out.dim = static_cast<int>(e) + 1;
        return out;
    }
    if (k == 2) {
        out.method = DimEstimate::Method::Hankel;
        out.dim = static_cast<int>(e + 1 - hankel_rank(alpha, e));
        return out;
    }
    std::vector<int> dims;
    std::uint64_t Q = 1;
    for (unsigned m = 1; m <= m_max; ++m) {
        Q *= alpha.F->q();
        std::uint64_t c;
        try {
            c = sing_points(alpha, e, k, m, budget);
        } catch (const BudgetExceeded&) {
            break;
        } catch (const std::length_error&) {
            break;
        }
        out.counts.emplace_back(m, c);
        dims.push_back(dim_from_count(c, Q));
    }
    if (dims.empty()) throw BudgetExceeded("no extension degree fits the budget");
    out.dim = dims.back();
    out.stable = dims.size() >= 2 && dims[dims.size() - 2] == dims.back();
    return out;
}

// ---------------------------------------------------------------- (a, c) criterion

/// Searches c = (h/g) dT with deg h <= deg Z - e - 2 whose restriction to Z is tilde(alpha) a^{k-1}.
/// g is the finite part of Z; at infinity the restriction is -H/G with H = u^{N} h(1/u), G = u^{deg g} g(1/u).
/// Works over any extension of the base field; a is given over ext.big.
inline std::optional<Poly> exists_c(const Poly& a, const ResidueForm& atilde, unsigned e, unsigned k, const Extension& ext) {
    const Field& B = *ext.big;
    const DivisorP1& Z = atilde.Z;
    const int N = Z.degree() - static_cast<int>(e) - 2;
    Poly ak = a.pow(k - 1);

    Poly g = Poly::constant(B, B.one());
    for (const auto& [v, m] : Z.parts)
        if (!v.is_infinity()) g *= embed_poly(ext, v.pi).pow(static_cast<unsigned>(m));

    struct Block {
        Poly modulus;
        Poly target;
        std::vector<Poly> columns;
    };
    std::vector<Block> blocks;
    for (std::size_t t = 0; t < Z.parts.size(); ++t) {
        const auto& [v, m] = Z.parts[t];
        Block b;
        Poly r = embed_poly(ext, atilde.local[t]);
        if (!v.is_infinity()) {
            b.modulus = embed_poly(ext, v.pi).pow(static_cast<unsigned>(m));
            b.target = (ak % b.modulus * r) % b.modulus;
            Poly w = inverse_mod(g / b.modulus, b.modulus);
            for (int i = 0; i <= N; ++i) b.columns.push_back((Poly::monomial(B, static_cast<unsigned>(i), B.one()) * w) % b.modulus);
        } else {
            b.modulus = Poly::monomial(B, static_cast<unsigned>(m), B.one());
            const unsigned top = (k - 1) * e;
            std::vector<Fq> rev(top + 1, Fq{0});
            for (unsigned j = 0; j <= top; ++j) rev[j] = ak.coeff(top - j);
            b.target = (Poly(B, rev) * r) % b.modulus;
            const int dg = g.deg();
            std::vector<Fq> G(static_cast<std::size_t>(dg) + 1, Fq{0});
            for (int j = 0; j <= dg; ++j) G[static_cast<std::size_t>(j)] = g.coeff(static_cast<std::size_t>(dg - j));
            Poly Ginv = inverse_mod(Poly(B, G), b.modulus);
            for (int i = 0; i <= N; ++i)
                b.columns.push_back(-((Poly::monomial(B, static_cast<unsigned>(N - i), B.one()) * Ginv) % b.modulus));
        }
        blocks.push_back(std::move(b));
    }
    if (N < 0) {
        for (const auto& b : blocks)
            if (!b.target.is_zero()) return std::nullopt;
        return Poly(B);
    }
    std::size_t rows = 0;
    for (const auto& b : blocks) rows += static_cast<std::size_t>(b.modulus.deg());
    Matrix M(B, rows, static_cast<std::size_t>(N) + 1);
    std::vector<Fq> rhs(rows, Fq{0});
    std::size_t off = 0;
    for (const auto& b : blocks) {
        const auto len = static_cast<std::size_t>(b.modulus.deg());
        for (std::size_t r = 0; r < len; ++r) {
            rhs[off + r] = b.target.coeff(r);
            for (std::size_t c = 0; c < b.columns.size(); ++c) M.at(off + r, c) = b.columns[c].coeff(r);
        }
        off += len;
    }
    auto sol = solve(M, rhs);
    if (!sol) return std::nullopt;
    return Poly(B, *sol);
}

inline bool exists_c_check(const Poly& a, const ResidueForm& atilde, unsigned e, unsigned k, const Extension& ext) {
    return exists_c(a, atilde, e, k, ext).has_value();
}

struct ExistsCReport {
    std::uint64_t points = 0;
    std::uint64_t agree = 0;
    std::uint64_t in_sing = 0;
    bool all_agree() const { return points == agree; }
};

/// Compares the (a, c) criterion with direct membership for every a of degree <= e over F_{q^m}.
inline ExistsCReport compare_exists_c(const LinearForm& alpha, const DivisorP1& Z, unsigned e, unsigned k, unsigned m, std::uint64_t budget = kDefaultSingBudget) {
    auto rf = restrict_form(alpha, Z);
    if (!rf) throw std::invalid_argument("alpha does not factor through Z");
    ResidueForm atilde = tilde_alpha(*rf);
    Extension ext = extend_field(*alpha.F, m);
    const Field& B = *ext.big;
    auto al = embed_form(ext, alpha);
    ExistsCReport rep;
    rep.points = detail::checked_space(B.q(), e + 1, budget);
    for (std::uint64_t idx = 0; idx < rep.points; ++idx) {
        auto a = detail::digits_of(idx, B.q(), e + 1);
        const bool direct = sing_member(B, al, a, e, k);
        const bool via_c = exists_c_check(Poly(B, a), atilde, e, k, ext);
        rep.in_sing += direct;
        rep.agree += direct == via_c;
    }
    return rep;
}

// ---------------------------------------------------------------- Katz bound

struct KatzRow {
    std::uint64_t alpha_index = 0;
    int alpha_degree = 0;
    DimEstimate dim;
    double s1_abs = 0;
    double bound = 0;
    double ratio() const { return s1_abs / bound; }
};

struct KatzReport {
    std::vector<KatzRow> rows;
    std::uint64_t checked = 0, unstable = 0, violations = 0;
    double max_ratio = 0;
    std::uint64_t worst_index = 0;
    bool passed() const { return violations == 0; }
};

/// 3 (k+1)^{e+1} q^{(e+1+dim)/2}.
inline double katz_bound(unsigned q, unsigned k, unsigned e, int dim) {
    return 3.0 * std::pow(static_cast<double>(k + 1), e + 1) * std::pow(static_cast<double>(q), (static_cast<double>(e) + 1 + dim) / 2.0);
}

inline KatzReport katz_bound_check(const Field& F, unsigned e, unsigned k, unsigned m_max = 3, bool with_degree = true) {
    auto tab = S1_table(F, k, e);
    KatzReport rep;
    const int D = static_cast<int>(k * e);
    for (std::uint64_t idx = 0; idx < tab.size(); ++idx) {
        LinearForm alpha = LinearForm::from_index(F, idx, D);
        KatzRow row;
        row.alpha_index = idx;
        row.alpha_degree = with_degree ? min_degree(alpha).degree : -1;
        row.dim = sing_dim_estimate(alpha, e, k, m_max);
        row.s1_abs = tab.value(idx).abs();
        row.bound = katz_bound(F.q(), k, e, row.dim.dim);
        if (!row.dim.stable) {
            ++rep.unstable;
        } else {
            ++rep.checked;
            // 1e-9 relative slack for the complex embedding of an exact value.
            if (row.s1_abs > row.bound * (1 + 1e-9)) ++rep.violations;
            if (row.ratio() > rep.max_ratio) {
                rep.max_ratio = row.ratio();
                rep.worst_index = idx;
            }
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------- dimension bound

struct OverallDimReport {
    DimEstimate dim;
    int min_degree = 0;
    std::vector<Rational> bounds;  // one per minimal Z
    bool holds_any = false, holds_all = true;
};

/// dim Sing_alpha <= max(e+1 - sum ceil(m_v/(k-1)) deg v, 1 + e gamma), over each minimal Z.
inline OverallDimReport overall_dim_bound_check(const LinearForm& alpha, unsigned e, unsigned k, const Rational& gamma, unsigned m_max = 3) {
    OverallDimReport rep;
    rep.dim = sing_dim_estimate(alpha, e, k, m_max);
    auto md = min_degree(alpha);
    rep.min_degree = md.degree;
    const Rational second = 1 + Rational(e) * gamma;
    for (const auto& Z : md.minimal) {
        long first = static_cast<long>(e) + 1;
        for (const auto& [v, m] : Z.parts) first -= static_cast<long>(ceil_div(Int(m), Int(k - 1))) * v.degree;
        Rational b = std::max(Rational(first), second);
        rep.bounds.push_back(b);
        const bool ok = Rational(rep.dim.dim) <= b;
        rep.holds_any |= ok;
        rep.holds_all &= ok;
    }
    return rep;
}

// ---------------------------------------------------------------- general smooth forms

struct Monomial {
    Fq coeff;
    std::vector<unsigned> exps;
};

/// Homogeneous form in nvars variables over a field.
struct HomogeneousForm {
    const Field* F = nullptr;
    unsigned nvars = 0;
    std::vector<Monomial> terms;

    unsigned degree() const {
        unsigned d = 0;
        if (!terms.empty())
            for (unsigned x : terms.front().exps) d += x;
        return d;
    }
    void validate() const {
        const unsigned d = degree();
        for (const auto& t : terms) {
            if (t.exps.size() != nvars) throw std::invalid_argument("monomial arity mismatch");
            unsigned s = 0;
            for (unsigned x : t.exps) s += x;
            if (s != d) throw std::invalid_argument("form is not homogeneous");
        }
    }
    HomogeneousForm partial(unsigned i) const {
        HomogeneousForm out{F, nvars, {}};
        for (const auto& t : terms) {
            if (t.exps[i] == 0) continue;
            Monomial m = t;
            m.coeff = F->mul(t.coeff, F->from_int(static_cast<long long>(t.exps[i])));
            if (!m.coeff.v) continue;
            m.exps[i] -= 1;
            out.terms.push_back(std::move(m));
        }
        return out;
    }
    static HomogeneousForm diagonal(const Field& F, unsigned nvars, unsigned d) {
        HomogeneousForm out{&F, nvars, {}};
        for (unsigned i = 0; i < nvars; ++i) {
            Monomial m{F.one(), std::vector<unsigned>(nvars, 0)};
            m.exps[i] = d;
            out.terms.push_back(std::move(m));
        }
        return out;
    }
};

/// Evaluates a form at a tuple of polynomials over ext.big.
inline Poly evaluate_form(const HomogeneousForm& form, const Extension& ext, const std::vector<Poly>& a) {
    const Field& B = *ext.big;
    Poly acc(B);
    for (const auto& t : form.terms) {
        Poly term = Poly::constant(B, ext(t.coeff));
        for (unsigned i = 0; i < form.nvars; ++i)
            if (t.exps[i]) term *= a[i].pow(t.exps[i]);
        acc += term;
    }
    return acc;
}

/// Exhaustive search for a common projective zero of the gradient over F_{q^m}, m = 1..m_max.
/// Returns true when none is found (smoothness, checked only up to m_max).
inline bool gradient_has_no_zero(const HomogeneousForm& form, unsigned m_max, std::uint64_t budget = kDefaultSingBudget) {
    std::vector<HomogeneousForm> grad;
    for (unsigned i = 0; i < form.nvars; ++i) grad.push_back(form.partial(i));
    for (unsigned m = 1; m <= m_max; ++m) {
        Extension ext = extend_field(*form.F, m);
        const Field& B = *ext.big;
        const std::uint64_t n = detail::checked_space(B.q(), form.nvars, budget);
        for (std::uint64_t idx = 1; idx < n; ++idx) {
            auto x = detail::digits_of(idx, B.q(), form.nvars);
            // Projective normalization: last nonzero coordinate equal to 1.
            std::size_t last = form.nvars;
            while (last-- > 0 && !x[last].v) {}
            if (x[last] != B.one()) continue;
            std::vector<Poly> pt;
            for (Fq c : x) pt.push_back(Poly::constant(B, c));
            bool all_zero = true;
            for (const auto& gi : grad)
                if (!evaluate_form(gi, ext, pt).is_zero()) {
                    all_zero = false;
                    break;
                }
            if (all_zero) return false;
        }
    }
    return true;
}

/// #{(a_0..a_n) of degree <= e over F_{q^m} : alpha(b dF/dx_i(a)) = 0 for all b, i}; alpha lives on degree d e.
inline std::uint64_t sing_general_F(const HomogeneousForm& form, const LinearForm& alpha, unsigned e, unsigned m, std::uint64_t budget = kDefaultSingBudget) {
    form.validate();
    const unsigned d = form.degree();
    if (alpha.D() != static_cast<int>(d * e)) throw std::invalid_argument("alpha must live on degree d e");
    Extension ext = extend_field(*form.F, m);
    const Field& B = *ext.big;
    auto al = embed_form(ext, alpha);
    std::vector<HomogeneousForm> grad;
    for (unsigned i = 0; i < form.nvars; ++i) grad.push_back(form.partial(i));
    const std::size_t len = static_cast<std::size_t>(form.nvars) * (e + 1);
    const std::uint64_t n = detail::checked_space(B.q(), len, budget);
    std::atomic<std::uint64_t> count{0};
    parallel_for(n, [&](std::size_t idx) {
        auto c = detail::digits_of(idx, B.q(), len);
        std::vector<Poly> a;
        for (unsigned i = 0; i < form.nvars; ++i) a.emplace_back(B, std::vector<Fq>(c.begin() + i * (e + 1), c.begin() + (i + 1) * (e + 1)));
        for (const auto& gi : grad) {
            Poly P = evaluate_form(gi, ext, a);
            std::vector<Fq> coeffs;
            for (int j = 0; j <= P.deg(); ++j) coeffs.push_back(P.coeff(static_cast<std::size_t>(j)));
            if (!kills_all_shifts(B, al, coeffs, e)) return;
        }
        count.fetch_add(1, std::memory_order_relaxed);
    }, 256);
    return count.load();
}

}  // namespace wfl
