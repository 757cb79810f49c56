#pragma once

// Dense two-phase primal simplex for
//     min c^T x  subject to  M x = rhs,  x >= 0.
// Bland's rule throughout, so identical problems always give identical bases.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace poscon {

enum class LPStatus { optimal, infeasible, unbounded };

inline const char* to_string(LPStatus s) {
    switch (s) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::infeasible: return "infeasible";
        case LPStatus::unbounded: return "unbounded";
    }
    return "?";
}

template <typename T = double>
struct LPProblem {
    DenseVector<T> objective;  // length N
    DenseMatrix<T> eq_matrix;  // m x N
    DenseVector<T> eq_rhs;     // length m
};

template <typename T = double>
struct LPSolution {
    LPStatus status = LPStatus::infeasible;
    DenseVector<T> x;              // length N when optimal (or feasible for phase-one solves)
    T objective_value{};
    std::vector<std::size_t> basis;  // basic column indices, one per non-redundant row
    DenseVector<T> reduced_costs;  // original cost units, length N (phase two only)
    T phase_one_residual{};        // sum of artificials at the end of phase one (scaled units)
    std::size_t pivots = 0;
};

// Floating scalars compare against tolerances; exact scalars (see
// rational.hpp) run with every tolerance at zero.
template <typename T>
struct ScalarTraits {
    static constexpr bool exact = false;
    static T abs(const T& x) { return std::abs(x); }
};

struct LPOptions {
    double tol = 1e-9;
    // 0 selects the default budget of 50 (N + m) pivots.
    std::size_t max_pivots = 0;
};

namespace detail {

template <typename T>
class SimplexTableau {
    using Tr = ScalarTraits<T>;

public:
    SimplexTableau(const DenseMatrix<T>& a, const DenseVector<T>& rhs, T tol, std::size_t max_pivots)
        : m_(a.rows()), n_(a.cols()), tol_(tol), max_pivots_(max_pivots) {
        if (rhs.size() != m_) throw InputError("linprog.Shape", "right-hand side length does not match row count");
        // Column scaling first, then row scaling of the column-scaled matrix.
        col_scale_.assign(n_, T{1});
        for (std::size_t j = 0; j < n_; ++j) {
            T mx{};
            for (std::size_t i = 0; i < m_; ++i) mx = std::max(mx, Tr::abs(a(i, j)));
            if (mx > T{}) col_scale_[j] = T{1} / mx;
        }
        width_ = n_ + m_ + 1;
        tab_.assign(m_ * width_, T{});
        for (std::size_t i = 0; i < m_; ++i) {
            T mx{};
            for (std::size_t j = 0; j < n_; ++j) mx = std::max(mx, Tr::abs(a(i, j) * col_scale_[j]));
            T rs = mx > T{} ? T{1} / mx : T{1};
            if (rhs[i] < T{}) rs = -rs;
            for (std::size_t j = 0; j < n_; ++j) at(i, j) = a(i, j) * col_scale_[j] * rs;
            at(i, n_ + i) = T{1};
            at(i, width_ - 1) = rhs[i] * rs;
        }
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
        active_rows_.assign(m_, true);
        scaled_a_ = DenseMatrix<T>(m_, n_);
        scaled_b_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) scaled_a_(i, j) = at(i, j);
            scaled_b_[i] = at(i, width_ - 1);
        }
    }

    // Returns the sum of artificials after phase one.
    T phase_one() {
        std::vector<T> cost(n_ + m_, T{});
        for (std::size_t i = 0; i < m_; ++i) cost[n_ + i] = T{1};
        run(cost, n_ + m_);
        T w{};
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_) w += std::max(at(i, width_ - 1), T{});
        return w;
    }

    T rhs_scale() const {
        T mx{};
        for (T v : scaled_b_) mx = std::max(mx, Tr::abs(v));
        return mx;
    }

    // Pivots remaining artificials out of the basis; rows where that is
    // impossible are linearly dependent and get deactivated.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (!active_rows_[i] || basis_[i] < n_) continue;
            std::size_t best = n_;
            T best_val{};
            for (std::size_t j = 0; j < n_; ++j) {
                if (is_basic(j)) continue;
                const T v = Tr::abs(at(i, j));
                if (v > tol_ && v > best_val) {
                    best_val = v;
                    best = j;
                }
            }
            if (best == n_) {
                active_rows_[i] = false;
            } else {
                pivot(i, best);
            }
        }
    }

    // Returns false on unboundedness.
    bool phase_two(const DenseVector<T>& objective) {
        std::vector<T> cost(n_ + m_, T{});
        for (std::size_t j = 0; j < n_; ++j) cost[j] = objective[j] * col_scale_[j];
        return run(cost, n_);
    }

    DenseVector<T> solution() const {
        DenseVector<T> x(n_, T{});
        for (std::size_t i = 0; i < m_; ++i)
            if (active_rows_[i] && basis_[i] < n_) x[basis_[i]] = std::max(at(i, width_ - 1), T{});
        if constexpr (!Tr::exact) refine(x);
        for (std::size_t j = 0; j < n_; ++j) x[j] *= col_scale_[j];
        return x;
    }

    std::vector<std::size_t> basis() const {
        std::vector<std::size_t> b;
        for (std::size_t i = 0; i < m_; ++i)
            if (active_rows_[i] && basis_[i] < n_) b.push_back(basis_[i]);
        return b;
    }

    DenseVector<T> reduced_costs(const DenseVector<T>& objective) const {
        DenseVector<T> d(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            T v = objective[j] * col_scale_[j];
            for (std::size_t i = 0; i < m_; ++i)
                if (active_rows_[i]) v -= objective_of(basis_[i], objective) * at(i, j);
            d[j] = v / col_scale_[j];
        }
        return d;
    }

    std::size_t pivots() const { return pivots_; }

private:
    T& at(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
    const T& at(std::size_t i, std::size_t j) const { return tab_[i * width_ + j]; }

    bool is_basic(std::size_t j) const {
        for (std::size_t i = 0; i < m_; ++i)
            if (active_rows_[i] && basis_[i] == j) return true;
        return false;
    }

    T objective_of(std::size_t j, const DenseVector<T>& objective) const {
        return j < n_ ? objective[j] * col_scale_[j] : T{};
    }

    void pivot(std::size_t r, std::size_t c) {
        if (++pivots_ > max_pivots_) throw IterationLimit(max_pivots_);
        const T p = at(r, c);
        for (std::size_t j = 0; j < width_; ++j) at(r, j) /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || !active_rows_[i]) continue;
            const T f = at(i, c);
            if (f == T{}) continue;
            for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = T{};
        }
        basis_[r] = c;
    }

    // Bland's rule simplex over columns [0, allowed). Returns false when unbounded.
    bool run(const std::vector<T>& cost, std::size_t allowed) {
        const T tie = Tr::exact ? T{} : T(1e-12);
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (is_basic(j)) continue;
                T d = cost[j];
                for (std::size_t i = 0; i < m_; ++i)
                    if (active_rows_[i]) d -= cost[basis_[i]] * at(i, j);
                if (d < -tol_) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return true;
            std::size_t leave = m_;
            T best{};
            for (std::size_t i = 0; i < m_; ++i) {
                if (!active_rows_[i]) continue;
                const T a = at(i, enter);
                if (a <= tol_) continue;
                const T ratio = std::max(at(i, width_ - 1), T{}) / a;
                if (leave == m_ || ratio < best - tie * (T{1} + Tr::abs(best))) {
                    best = ratio;
                    leave = i;
                } else if (Tr::abs(ratio - best) <= tie * (T{1} + Tr::abs(best)) && basis_[i] < basis_[leave]) {
                    leave = i;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    // Recomputes basic values from the scaled original rows; keeps the
    // tableau values if the basis matrix is numerically singular.
    void refine(DenseVector<T>& x) const {
        std::vector<std::size_t> rows, cols;
        for (std::size_t i = 0; i < m_; ++i)
            if (active_rows_[i] && basis_[i] < n_) {
                rows.push_back(i);
                cols.push_back(basis_[i]);
            }
        if (rows.empty() || rows.size() != count_active()) return;
        const std::size_t k = rows.size();
        DenseMatrix<T> bm(k, k);
        DenseVector<T> rhs(k), xb;
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) bm(r, c) = scaled_a_(rows[r], cols[c]);
            rhs[r] = scaled_b_[rows[r]];
        }
        if (!solve_square(bm, rhs, xb, T(1e-13))) return;
        for (std::size_t c = 0; c < k; ++c)
            if (xb[c] < -tol_) return;
        for (std::size_t c = 0; c < k; ++c) x[cols[c]] = std::max(xb[c], T{});
    }

    std::size_t count_active() const {
        return static_cast<std::size_t>(std::count(active_rows_.begin(), active_rows_.end(), true));
    }

    std::size_t m_, n_, width_ = 0;
    T tol_;
    std::size_t max_pivots_;
    std::size_t pivots_ = 0;
    std::vector<T> tab_;
    std::vector<std::size_t> basis_;
    std::vector<bool> active_rows_;
    std::vector<T> col_scale_;
    DenseMatrix<T> scaled_a_;
    DenseVector<T> scaled_b_;
};

inline std::size_t pivot_budget(const LPOptions& opt, std::size_t n, std::size_t m) {
    return opt.max_pivots ? opt.max_pivots : 50 * (n + m);
}

template <typename T>
T tolerance_of(const LPOptions& opt) {
    if constexpr (ScalarTraits<T>::exact)
        return T{};
    else
        return T(opt.tol);
}

}  // namespace detail

/**
 * Solves min c^T x s.t. M x = rhs, x >= 0. Infeasible and unbounded are
 * statuses; running out of pivots throws IterationLimit.
 *
 * Rows and columns are equilibrated internally, so badly scaled columns
 * (powers A^k b) do not distort the pivot tolerance.
 */
template <typename T>
LPSolution<T> solve(const LPProblem<T>& p, const LPOptions& opt = {}) {
    const std::size_t n = p.eq_matrix.cols();
    if (p.objective.size() != n) throw InputError("linprog.Shape", "objective length does not match column count");
    detail::SimplexTableau<T> tab(p.eq_matrix, p.eq_rhs, detail::tolerance_of<T>(opt), detail::pivot_budget(opt, n, p.eq_matrix.rows()));
    LPSolution<T> out;
    out.phase_one_residual = tab.phase_one();
    if (out.phase_one_residual > detail::tolerance_of<T>(opt) * (T{1} + tab.rhs_scale())) {
        out.status = LPStatus::infeasible;
        out.pivots = tab.pivots();
        return out;
    }
    tab.drive_out_artificials();
    if (!tab.phase_two(p.objective)) {
        out.status = LPStatus::unbounded;
        out.pivots = tab.pivots();
        return out;
    }
    out.status = LPStatus::optimal;
    out.x = tab.solution();
    out.basis = tab.basis();
    out.reduced_costs = tab.reduced_costs(p.objective);
    out.objective_value = T{};
    for (std::size_t j = 0; j < n; ++j) out.objective_value += p.objective[j] * out.x[j];
    out.pivots = tab.pivots();
    return out;
}

template <typename T>
struct Feasibility {
    bool feasible = false;
    DenseVector<T> witness;  // nonnegative, M w = rhs
    T residual{};            // phase-one sum of artificials (scaled units)
};

/// Phase one only: is {z >= 0 : M z = rhs} nonempty, and if so one point of it.
template <typename T>
Feasibility<T> feasible(const DenseMatrix<T>& m, const DenseVector<T>& rhs, const LPOptions& opt = {}) {
    detail::SimplexTableau<T> tab(m, rhs, detail::tolerance_of<T>(opt), detail::pivot_budget(opt, m.cols(), m.rows()));
    Feasibility<T> out;
    out.residual = tab.phase_one();
    if (out.residual > detail::tolerance_of<T>(opt) * (T{1} + tab.rhs_scale())) return out;
    tab.drive_out_artificials();
    out.feasible = true;
    out.witness = tab.solution();
    return out;
}

}  // namespace poscon
