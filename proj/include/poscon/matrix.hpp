#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace poscon {

template <typename T>
using DenseVector = std::vector<T>;

using Vector = DenseVector<double>;

/**
 * Dense row-major matrix. Small sizes only (n up to a few dozen); every
 * algorithm in this library is O(n^3) on these.
 */
template <typename T>
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    DenseMatrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    static DenseMatrix from_columns(std::span<const DenseVector<T>> cols, std::size_t rows) {
        DenseMatrix m(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            assert(cols[j].size() == rows);
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const T> data() const noexcept { return data_; }

    DenseVector<T> column(std::size_t j) const {
        DenseVector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, std::span<const T> c) {
        assert(c.size() == rows_);
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrix = DenseMatrix<double>;

template <typename T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: inner dimension mismatch");
    DenseMatrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <typename T>
DenseVector<T> operator*(const DenseMatrix<T>& a, std::span<const T> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
    DenseVector<T> y(a.rows(), T{});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

template <typename T>
DenseVector<T> operator*(const DenseMatrix<T>& a, const DenseVector<T>& x) {
    return a * std::span<const T>(x);
}

template <typename T>
DenseMatrix<T> operator-(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix difference: shape mismatch");
    DenseMatrix<T> c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

template <typename T>
DenseMatrix<T> operator*(T s, const DenseMatrix<T>& a) {
    DenseMatrix<T> c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
    return c;
}

// Maximum absolute row sum.
template <typename T>
T norm_inf(const DenseMatrix<T>& a) {
    T best{};
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

template <typename T>
T max_abs(const DenseMatrix<T>& a) {
    T best{};
    for (T v : a.data()) best = std::max(best, std::abs(v));
    return best;
}

template <typename T>
T norm_inf(std::span<const T> x) {
    T best{};
    for (T v : x) best = std::max(best, std::abs(v));
    return best;
}

template <typename T>
T norm_inf(const DenseVector<T>& x) {
    return norm_inf(std::span<const T>(x));
}

template <typename T>
T norm_1(std::span<const T> x) {
    T s{};
    for (T v : x) s += std::abs(v);
    return s;
}

template <typename T>
T norm_1(const DenseVector<T>& x) {
    return norm_1(std::span<const T>(x));
}

template <typename T>
T frobenius(const DenseMatrix<T>& a) {
    T s{};
    for (T v : a.data()) s += v * v;
    return std::sqrt(s);
}

template <typename T>
DenseMatrix<T> matrix_power(const DenseMatrix<T>& a, std::size_t k) {
    DenseMatrix<T> result = DenseMatrix<T>::identity(a.rows());
    DenseMatrix<T> base = a;
    while (k) {
        if (k & 1U) result = result * base;
        k >>= 1U;
        if (k) base = base * base;
    }
    return result;
}

/**
 * Solves the square system m x = rhs by Gaussian elimination with partial
 * pivoting. Returns false when a pivot falls below `singular_tol` times the
 * largest entry of m.
 */
template <typename T>
bool solve_square(DenseMatrix<T> m, DenseVector<T> rhs, DenseVector<T>& x, T singular_tol = T(1e-14)) {
    const std::size_t n = m.rows();
    if (!m.square() || rhs.size() != n) throw std::invalid_argument("solve_square: shape mismatch");
    const T scale = std::max(max_abs(m), T(1e-300));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (std::abs(m(piv, col)) <= singular_tol * scale) return false;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const T f = m(r, col) / m(col, col);
            if (f == T{}) continue;
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
            rhs[r] -= f * rhs[col];
        }
    }
    x.assign(n, T{});
    for (std::size_t i = n; i-- > 0;) {
        T s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return true;
}

// Inverse via column-by-column solves; empty optional-like result signalled by false.
template <typename T>
bool invert(const DenseMatrix<T>& m, DenseMatrix<T>& inv, T singular_tol = T(1e-14)) {
    const std::size_t n = m.rows();
    inv = DenseMatrix<T>(n, n);
    DenseVector<T> e(n), x;
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), T{});
        e[j] = T{1};
        if (!solve_square(m, e, x, singular_tol)) return false;
        inv.set_column(j, x);
    }
    return true;
}

/**
 * Numerical rank by Householder QR with column pivoting. Columns are first
 * scaled to unit 2-norm (rank is invariant under column scaling); a diagonal
 * entry of R counts when it exceeds rel_tol times the Frobenius norm of the
 * scaled matrix.
 */
template <typename T>
std::size_t numerical_rank(DenseMatrix<T> m, T rel_tol) {
    const std::size_t rows = m.rows(), cols = m.cols();
    for (std::size_t j = 0; j < cols; ++j) {
        T s{};
        for (std::size_t i = 0; i < rows; ++i) s += m(i, j) * m(i, j);
        s = std::sqrt(s);
        if (s > T{})
            for (std::size_t i = 0; i < rows; ++i) m(i, j) /= s;
    }
    const T threshold = rel_tol * std::max(frobenius(m), T(1e-300));
    std::vector<T> colnorm(cols);
    std::size_t rank = 0;
    const std::size_t steps = std::min(rows, cols);
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t j = k; j < cols; ++j) {
            T s{};
            for (std::size_t i = k; i < rows; ++i) s += m(i, j) * m(i, j);
            colnorm[j] = std::sqrt(s);
        }
        std::size_t piv = k;
        for (std::size_t j = k + 1; j < cols; ++j)
            if (colnorm[j] > colnorm[piv]) piv = j;
        if (colnorm[piv] <= threshold) break;
        if (piv != k)
            for (std::size_t i = 0; i < rows; ++i) std::swap(m(i, piv), m(i, k));
        // Householder reflector zeroing m(k+1.., k).
        T alpha = colnorm[piv];
        if (m(k, k) > T{}) alpha = -alpha;
        std::vector<T> v(rows - k);
        for (std::size_t i = k; i < rows; ++i) v[i - k] = m(i, k);
        v[0] -= alpha;
        T vnorm2{};
        for (T vi : v) vnorm2 += vi * vi;
        if (vnorm2 > T{}) {
            for (std::size_t j = k; j < cols; ++j) {
                T dot{};
                for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * m(i, j);
                const T f = T{2} * dot / vnorm2;
                for (std::size_t i = k; i < rows; ++i) m(i, j) -= f * v[i - k];
            }
        }
        ++rank;
    }
    return rank;
}

/**
 * One vector spanning the (assumed one-dimensional) null space of a square
 * matrix, via Gaussian elimination with complete pivoting. Elimination stops
 * at the first pivot below rel_tol * max|m|; the remaining unknowns are set
 * to zero except the first free one, which is 1.
 */
template <typename T>
DenseVector<T> null_vector(DenseMatrix<T> m, T rel_tol = T(1e-9)) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> colperm(n);
    for (std::size_t j = 0; j < n; ++j) colperm[j] = j;
    const T scale = std::max(max_abs(m), T(1e-300));
    std::size_t r = 0;
    for (; r < n; ++r) {
        std::size_t pi = r, pj = r;
        for (std::size_t i = r; i < n; ++i)
            for (std::size_t j = r; j < n; ++j)
                if (std::abs(m(i, j)) > std::abs(m(pi, pj))) {
                    pi = i;
                    pj = j;
                }
        if (std::abs(m(pi, pj)) <= rel_tol * scale) break;
        for (std::size_t j = 0; j < n; ++j) std::swap(m(r, j), m(pi, j));
        for (std::size_t i = 0; i < n; ++i) std::swap(m(i, r), m(i, pj));
        std::swap(colperm[r], colperm[pj]);
        for (std::size_t i = r + 1; i < n; ++i) {
            const T f = m(i, r) / m(r, r);
            if (f == T{}) continue;
            for (std::size_t j = r; j < n; ++j) m(i, j) -= f * m(r, j);
        }
    }
    DenseVector<T> y(n, T{});
    if (r == n) r = n - 1;  // full numerical rank: treat the last pivot as zero
    y[r] = T{1};
    for (std::size_t i = r; i-- > 0;) {
        T s{};
        for (std::size_t j = i + 1; j <= r; ++j) s -= m(i, j) * y[j];
        y[i] = s / m(i, i);
    }
    DenseVector<T> x(n, T{});
    for (std::size_t j = 0; j < n; ++j) x[colperm[j]] = y[j];
    return x;
}

}  // namespace poscon
