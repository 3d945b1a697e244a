#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

namespace rxn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Dense matrix over exact rationals, row-major. Only what the kernel
/// computation and the simplex solver need.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

/// Basis of the null space of A (right kernel), as exact rational vectors.
/// Gauss-Jordan with exact pivots; no spurious near-zero vectors possible.
inline std::vector<std::vector<Rational>> rational_kernel(RationalMatrix a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::size_t> pivot_col_of_row;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t piv = row;
        while (piv < m && a(piv, col) == 0) ++piv;
        if (piv == m) continue;
        for (std::size_t j = 0; j < n; ++j) std::swap(a(row, j), a(piv, j));
        const Rational p = a(row, col);
        for (std::size_t j = 0; j < n; ++j) a(row, j) /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || a(i, col) == 0) continue;
            const Rational f = a(i, col);
            for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(row, j);
        }
        pivot_col_of_row.push_back(col);
        ++row;
    }

    std::vector<bool> is_pivot(n, false);
    for (auto c : pivot_col_of_row) is_pivot[c] = true;

    std::vector<std::vector<Rational>> basis;
    for (std::size_t free_col = 0; free_col < n; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<Rational> v(n, Rational(0));
        v[free_col] = 1;
        for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r)
            v[pivot_col_of_row[r]] = -a(r, free_col);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Scale a rational vector to the unique coprime integer vector with the
/// same direction and a positive leading nonzero entry.
inline std::vector<BigInt> to_coprime_integers(const std::vector<Rational>& v) {
    BigInt denom_lcm = 1;
    for (const auto& q : v)
        denom_lcm = boost::multiprecision::lcm(denom_lcm, BigInt(boost::multiprecision::denominator(q)));
    std::vector<BigInt> w(v.size());
    BigInt g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        w[i] = BigInt(boost::multiprecision::numerator(v[i])) * (denom_lcm / BigInt(boost::multiprecision::denominator(v[i])));
        g = boost::multiprecision::gcd(g, w[i]);
    }
    if (g != 0)
        for (auto& x : w) x /= g;
    for (const auto& x : w) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : w) y = -y;
        break;
    }
    return w;
}

}  // namespace rxn
