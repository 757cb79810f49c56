#pragma once

// Eigenvalues of small dense real matrices: balancing, reduction to upper
// Hessenberg form by stabilised elimination, then Francis double-shift QR.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace poscon {

class EigenFailure : public NumericalError {
public:
    explicit EigenFailure(std::size_t sweeps)
        : NumericalError("spectral.EigenFailure",
                         "QR iteration did not converge within " + std::to_string(sweeps) + " sweeps") {}
};

namespace detail {

// 1-based square work array; keeps the QR sweep close to its textbook form.
template <typename T>
struct Work {
    std::size_t n;
    std::vector<T> v;
    explicit Work(std::size_t n_) : n(n_), v((n_ + 1) * (n_ + 1), T{}) {}
    T& operator()(std::size_t i, std::size_t j) { return v[i * (n + 1) + j]; }
};

template <typename T>
void balance(Work<T>& a) {
    constexpr T radix = 2;
    constexpr T sqrdx = radix * radix;
    const std::size_t n = a.n;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 1; i <= n; ++i) {
            T r{}, c{};
            for (std::size_t j = 1; j <= n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == T{} || r == T{}) continue;
            T g = r / radix;
            T f = 1;
            const T s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < T(0.95) * s) {
                done = false;
                g = T{1} / f;
                for (std::size_t j = 1; j <= n; ++j) a(i, j) *= g;
                for (std::size_t j = 1; j <= n; ++j) a(j, i) *= f;
            }
        }
    }
}

template <typename T>
void to_hessenberg(Work<T>& a) {
    const std::size_t n = a.n;
    for (std::size_t m = 2; m < n; ++m) {
        T x{};
        std::size_t i = m;
        for (std::size_t j = m; j <= n; ++j)
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                i = j;
            }
        if (i != m) {
            for (std::size_t j = m - 1; j <= n; ++j) std::swap(a(i, j), a(m, j));
            for (std::size_t j = 1; j <= n; ++j) std::swap(a(j, i), a(j, m));
        }
        if (x != T{}) {
            for (i = m + 1; i <= n; ++i) {
                T y = a(i, m - 1);
                if (y != T{}) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (std::size_t j = m; j <= n; ++j) a(i, j) -= y * a(m, j);
                    for (std::size_t j = 1; j <= n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
    for (std::size_t i = 3; i <= n; ++i)
        for (std::size_t j = 1; j + 1 < i; ++j) a(i, j) = T{};
}

template <typename T>
T sign_of(T a, T b) {
    return b >= T{} ? std::abs(a) : -std::abs(a);
}

// Francis double-shift QR on an upper Hessenberg matrix.
template <typename T>
std::vector<std::complex<T>> hessenberg_qr(Work<T>& a, std::size_t sweep_budget) {
    const std::size_t n = a.n;
    std::vector<T> wr(n + 1), wi(n + 1);
    T anorm{};
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = (i > 1 ? i - 1 : 1); j <= n; ++j) anorm += std::abs(a(i, j));

    std::size_t total = 0;
    std::size_t nn = n;
    T t{};
    while (nn >= 1) {
        std::size_t its = 0;
        std::size_t l;
        do {
            for (l = nn; l >= 2; --l) {
                T s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == T{}) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = T{};
                    break;
                }
            }
            if (l < 1) l = 1;
            T x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = T{};
                --nn;
            } else {
                T y = a(nn - 1, nn - 1);
                T w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    T p = T(0.5) * (y - x);
                    T q = p * p + w;
                    T z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= T{}) {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != T{}) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = T{};
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn = nn >= 2 ? nn - 2 : 0;
                } else {
                    if (total >= sweep_budget) throw EigenFailure(sweep_budget);
                    if (its > 0 && its % 10 == 0) {
                        // exceptional shift
                        t += x;
                        for (std::size_t i = 1; i <= nn; ++i) a(i, i) -= x;
                        T s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = T(0.75) * s;
                        w = T(-0.4375) * s * s;
                    }
                    ++its;
                    ++total;
                    std::size_t m;
                    T p{}, q{}, r{}, z{};
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        T s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const T u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const T v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (std::size_t i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = T{};
                        if (i != m + 2) a(i, i - 3) = T{};
                    }
                    for (std::size_t k = m; k + 1 <= nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = T{};
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != T{}) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const T s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s != T{}) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (std::size_t j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const std::size_t mmin = nn < k + 3 ? nn : k + 3;
                            for (std::size_t i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (nn >= 1 && l + 1 < nn);
    }
    std::vector<std::complex<T>> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
    return out;
}

}  // namespace detail

/**
 * All n eigenvalues of a real square matrix, with multiplicity. Complex
 * eigenvalues come in exact conjugate pairs. Throws EigenFailure when the
 * QR sweeps exceed 200 n.
 */
template <typename T>
std::vector<std::complex<T>> eigenvalues(const DenseMatrix<T>& m) {
    if (!m.square()) throw InputError("spectral.Shape", "eigenvalues of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return {};
    detail::Work<T> a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i + 1, j + 1) = m(i, j);
    detail::balance(a);
    detail::to_hessenberg(a);
    return detail::hessenberg_qr(a, 200 * n);
}

}  // namespace poscon
