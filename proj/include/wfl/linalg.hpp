#pragma once

#include "field.hpp"

#include <optional>
#include <vector>

namespace wfl {

/// Dense matrix over F_q, row major.
struct Matrix {
    const Field* F = nullptr;
    std::size_t rows = 0, cols = 0;
    std::vector<Fq> a;

    Matrix() = default;
    Matrix(const Field& field, std::size_t r, std::size_t c) : F(&field), rows(r), cols(c), a(r * c, Fq{0}) {}
    Fq& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    Fq at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

/// Row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> row_reduce(Matrix& M) {
    const Field& F = *M.F;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < M.cols && r < M.rows; ++c) {
        std::size_t piv = r;
        while (piv < M.rows && M.at(piv, c).v == 0) ++piv;
        if (piv == M.rows) continue;
        if (piv != r)
            for (std::size_t j = 0; j < M.cols; ++j) std::swap(M.at(piv, j), M.at(r, j));
        Fq inv = F.inv(M.at(r, c));
        for (std::size_t j = c; j < M.cols; ++j) M.at(r, j) = F.mul(M.at(r, j), inv);
        for (std::size_t i = 0; i < M.rows; ++i) {
            if (i == r || M.at(i, c).v == 0) continue;
            Fq f = M.at(i, c);
            for (std::size_t j = c; j < M.cols; ++j) M.at(i, j) = F.sub(M.at(i, j), F.mul(f, M.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(Matrix M) { return row_reduce(M).size(); }

/// Some solution x of M x = b, or nullopt if inconsistent.
inline std::optional<std::vector<Fq>> solve(const Matrix& M, const std::vector<Fq>& b) {
    Matrix aug(*M.F, M.rows, M.cols + 1);
    for (std::size_t i = 0; i < M.rows; ++i) {
        for (std::size_t j = 0; j < M.cols; ++j) aug.at(i, j) = M.at(i, j);
        aug.at(i, M.cols) = b[i];
    }
    auto piv = row_reduce(aug);
    if (!piv.empty() && piv.back() == M.cols) return std::nullopt;
    std::vector<Fq> x(M.cols, Fq{0});
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug.at(r, M.cols);
    return x;
}

/// Basis of {x : M x = 0}.
inline std::vector<std::vector<Fq>> nullspace(Matrix M) {
    const Field& F = *M.F;
    auto piv = row_reduce(M);
    std::vector<bool> is_piv(M.cols, false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::vector<Fq>> basis;
    for (std::size_t free = 0; free < M.cols; ++free) {
        if (is_piv[free]) continue;
        std::vector<Fq> x(M.cols, Fq{0});
        x[free] = F.one();
        for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = F.neg(M.at(r, free));
        basis.push_back(std::move(x));
    }
    return basis;
}

}  // namespace wfl
