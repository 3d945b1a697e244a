#pragma once

#include "rxn/rational.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rxn {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational objective;
    std::vector<Rational> x;
};

/// Exact two-phase primal simplex with Bland's rule (no cycling):
///   minimize c^T x  subject to  A x = b, x >= 0
/// over arbitrary-precision rationals. Intended for the small systems of
/// the decomposition pipeline; certified bounds, no floating point.
class SimplexSolver {
public:
    LpResult minimize(const RationalMatrix& a, const std::vector<Rational>& b,
                      const std::vector<Rational>& c) {
        m_ = a.rows();
        n_ = a.cols();
        if (b.size() != m_ || c.size() != n_)
            throw std::invalid_argument("LP dimension mismatch");

        // Tableau with artificial columns n_..n_+m_-1; RHS in the last column.
        tab_.assign(m_, std::vector<Rational>(n_ + m_ + 1, Rational(0)));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const bool flip = b[i] < 0;
            for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = flip ? -a(i, j) : a(i, j);
            tab_[i][n_ + i] = 1;
            tab_[i].back() = flip ? -b[i] : b[i];
            basis_[i] = n_ + i;
        }

        // Phase 1: minimize the sum of artificials.
        std::vector<Rational> cost1(n_ + m_, Rational(0));
        for (std::size_t j = n_; j < n_ + m_; ++j) cost1[j] = 1;
        Rational phase1 = run(cost1, n_ + m_);
        if (phase1 != 0) return {LpStatus::Infeasible, Rational(0), {}};

        // Pivot remaining artificials out of the basis (degenerate rows).
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            std::size_t j = 0;
            while (j < n_ && tab_[i][j] == 0) ++j;
            if (j < n_) pivot(i, j);
            // else: the row is all-zero over the originals and redundant;
            // the artificial stays basic at value 0 and never re-enters.
        }

        // Phase 2 over the original columns only.
        std::vector<Rational> cost2(n_ + m_, Rational(0));
        for (std::size_t j = 0; j < n_; ++j) cost2[j] = c[j];
        Rational value = run(cost2, n_);
        if (unbounded_) return {LpStatus::Unbounded, Rational(0), {}};

        LpResult res;
        res.status = LpStatus::Optimal;
        res.objective = value;
        res.x.assign(n_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) res.x[basis_[i]] = tab_[i].back();
        return res;
    }

private:
    /// Optimize the current basis for `cost`, allowing entering columns < limit.
    /// Returns the objective value; sets unbounded_ on an unbounded ray.
    Rational run(const std::vector<Rational>& cost, std::size_t limit) {
        unbounded_ = false;
        while (true) {
            // Reduced costs from scratch: d_j = c_j - cB . column_j.
            // O(m n) per iteration, fine at these sizes and simpler to keep
            // exact than an incrementally updated objective row.
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (is_basic(j)) continue;
                Rational d = cost[j];
                for (std::size_t i = 0; i < m_; ++i)
                    if (cost[basis_[i]] != 0) d -= cost[basis_[i]] * tab_[i][j];
                if (d < 0) {
                    enter = j;  // Bland: smallest eligible index
                    break;
                }
            }
            if (enter == limit) break;

            std::size_t leave = m_;
            Rational best_ratio;
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] <= 0) continue;
                Rational ratio = tab_[i].back() / tab_[i][enter];
                if (leave == m_ || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == m_) {
                unbounded_ = true;
                return Rational(0);
            }
            pivot(leave, enter);
        }
        Rational value = 0;
        for (std::size_t i = 0; i < m_; ++i) value += cost[basis_[i]] * tab_[i].back();
        return value;
    }

    bool is_basic(std::size_t j) const {
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] == j) return true;
        return false;
    }

    void pivot(std::size_t row, std::size_t col) {
        const Rational p = tab_[row][col];
        for (auto& v : tab_[row]) v /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row || tab_[i][col] == 0) continue;
            const Rational f = tab_[i][col];
            for (std::size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    std::size_t m_ = 0, n_ = 0;
    std::vector<std::vector<Rational>> tab_;
    std::vector<std::size_t> basis_;
    bool unbounded_ = false;
};

inline LpResult lp_minimize(const RationalMatrix& a, const std::vector<Rational>& b,
                            const std::vector<Rational>& c) {
    return SimplexSolver().minimize(a, b, c);
}

}  // namespace rxn
