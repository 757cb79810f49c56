#pragma once

// Spectrum of A, the Perron-Frobenius split into dominant and remaining
// eigenvalues, rational-angle classification and nonnegative recursions
// A^m = sum c_i A^i with c >= 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "eigen.hpp"
#include "errors.hpp"
#include "linprog.hpp"
#include "matrix.hpp"
#include "posmat.hpp"
#include "tolerances.hpp"

namespace poscon {

using Complex = std::complex<double>;

class IrrationalAngle : public NumericalError {
public:
    explicit IrrationalAngle(Complex lambda)
        : NumericalError("spectral.IrrationalAngle", "eigenvalue (" + std::to_string(lambda.real()) + ", " +
                                                         std::to_string(lambda.imag()) +
                                                         ") has no rational angle at the configured resolution") {}
};

class CyclicityMismatch : public NumericalError {
public:
    CyclicityMismatch(std::size_t graph_h, std::size_t spectral_h)
        : NumericalError("spectral.CyclicityMismatch",
                         "digraph period " + std::to_string(graph_h) + " but " + std::to_string(spectral_h) +
                             " eigenvalues of maximal modulus") {}
};

// infinite: the A2 block carries every non-dominant eigenvalue.
// finite: the A2 block carries everything except rho itself.
enum class SplitMode { infinite, finite };

inline const char* to_string(SplitMode m) { return m == SplitMode::infinite ? "infinite" : "finite"; }

struct SpectralSummary {
    std::vector<Complex> eigenvalues;  // descending modulus, then ascending angle in [0, 2pi)
    double rho = 0.0;
    std::vector<Complex> dominant;
    std::vector<Complex> nondominant;
    std::size_t h = 1;
    SplitMode mode = SplitMode::infinite;
    std::vector<Complex> a2_spectrum;
};

struct AngleClass {
    Complex lambda;
    bool is_rational = false;
    long p = 0;  // arg(lambda) / 2pi ~ p / q, 0 <= p < q
    long q = 1;
};

enum class FailingCondition { C1, C2, C3, C4 };

inline const char* to_string(FailingCondition c) {
    switch (c) {
        case FailingCondition::C1: return "C1";
        case FailingCondition::C2: return "C2";
        case FailingCondition::C3: return "C3";
        case FailingCondition::C4: return "C4";
    }
    return "?";
}

struct RecursionCertificate {
    bool holds = false;
    bool vacuous = false;  // spectral test passed because no positive eigenvalue exists
    std::size_t degree_nm = 0;
    std::vector<double> coefficients;  // c_0 .. c_{nm-1}
    std::optional<FailingCondition> failing_condition;
    double residual = 0.0;  // |A^nm - sum c_i A^i|_inf / |A^nm|_inf
};

namespace detail {

inline double angle_fraction(Complex z) {
    double phi = std::atan2(z.imag(), z.real()) / (2.0 * std::numbers::pi);
    if (phi < 0.0) phi += 1.0;
    if (phi >= 1.0) phi -= 1.0;
    return phi;
}

inline void sort_spectrum(std::vector<Complex>& ev, double scale) {
    const double tie = 1e-12 * std::max(1.0, scale);
    std::sort(ev.begin(), ev.end(), [tie](Complex a, Complex b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (std::abs(ma - mb) > tie) return ma > mb;
        return angle_fraction(a) < angle_fraction(b);
    });
}

inline bool is_positive_real(Complex z, double scale, const Tolerances& tol) {
    const double s = tol.eig * std::max(1.0, scale);
    return std::abs(z.imag()) <= s && z.real() > s;
}

}  // namespace detail

/**
 * Characteristic polynomial det(lambda I - A) by Faddeev-LeVerrier in long
 * double. Returned highest degree first: {1, a_1, ..., a_n}.
 */
inline std::vector<double> characteristic_polynomial(const Matrix& a) {
    const std::size_t n = a.rows();
    DenseMatrix<long double> al(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) al(i, j) = a(i, j);
    std::vector<long double> c(n + 1);
    c[0] = 1.0L;
    DenseMatrix<long double> m(n, n);  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        DenseMatrix<long double> next = al * m;
        for (std::size_t i = 0; i < n; ++i) next(i, i) += c[k - 1];
        m = std::move(next);
        DenseMatrix<long double> am = al * m;
        long double tr = 0.0L;
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        c[k] = -tr / static_cast<long double>(k);
    }
    return {c.begin(), c.end()};
}

/// Horner evaluation of a highest-degree-first coefficient list.
inline Complex eval_poly(const std::vector<double>& coeffs, Complex z) {
    Complex v = 0.0;
    for (double c : coeffs) v = v * z + c;
    return v;
}

/**
 * Eigenvalues with multiplicity, rho and the dominant / non-dominant split.
 * Dominance: |lambda| >= rho - tol.eig * max(1, rho). For irreducible A the
 * dominant count must equal the digraph period; a mismatch throws
 * CyclicityMismatch.
 */
inline SpectralSummary spectrum(const NonnegMatrix& a, const Tolerances& tol = {}) {
    SpectralSummary s;
    s.eigenvalues = eigenvalues(a.matrix());
    for (const Complex& z : s.eigenvalues) s.rho = std::max(s.rho, std::abs(z));
    detail::sort_spectrum(s.eigenvalues, s.rho);
    const double cut = s.rho - tol.eig * std::max(1.0, s.rho);
    for (const Complex& z : s.eigenvalues) (std::abs(z) >= cut ? s.dominant : s.nondominant).push_back(z);
    s.h = s.dominant.size();
    if (is_irreducible(a, tol.zero)) {
        const std::size_t g = cyclicity_degree(a, tol.zero);
        if (g != s.h) throw CyclicityMismatch(g, s.h);
    }
    s.a2_spectrum = s.nondominant;
    return s;
}

/**
 * spectrum() plus the A2 block spectrum for the requested split. Only
 * eigenvalues are produced; no similarity transform is formed.
 */
inline SpectralSummary pf_split(const NonnegMatrix& a, SplitMode mode, const Tolerances& tol = {}) {
    if (!is_irreducible(a, tol.zero)) detail::throw_reducible(a, tol.zero);
    SpectralSummary s = spectrum(a, tol);
    s.mode = mode;
    if (mode == SplitMode::infinite) {
        s.a2_spectrum = s.nondominant;
    } else {
        s.a2_spectrum = s.eigenvalues;
        std::size_t best = 0;
        for (std::size_t i = 1; i < s.a2_spectrum.size(); ++i)
            if (std::abs(s.a2_spectrum[i] - s.rho) < std::abs(s.a2_spectrum[best] - s.rho)) best = i;
        s.a2_spectrum.erase(s.a2_spectrum.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return s;
}

/**
 * Rational-angle test on arg(lambda) / 2pi: walks the continued-fraction
 * convergents with denominator <= q_max and accepts the first one within
 * tol.angle.
 */
inline AngleClass classify_angle(Complex lambda, const Tolerances& tol = {}) {
    AngleClass out;
    out.lambda = lambda;
    const double phi = detail::angle_fraction(lambda);
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = phi;
    for (int iter = 0; iter < 64; ++iter) {
        const double ai = std::floor(x);
        const long a = static_cast<long>(ai);
        const long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > tol.q_max) break;
        if (std::abs(phi - static_cast<double>(p2) / static_cast<double>(q2)) <= tol.angle) {
            out.is_rational = true;
            out.q = q2;
            out.p = p2 % q2;
            return out;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = x - ai;
        if (frac <= 0.0) break;
        x = 1.0 / frac;
    }
    return out;
}

/**
 * Smallest M such that every listed eigenvalue, divided by its modulus, is an
 * (M h)-th root of unity: M = lcm_j q_j / gcd(q_j, h).
 */
inline long minimal_M(const std::vector<Complex>& a2_dominant, std::size_t h, const Tolerances& tol = {}) {
    long m = 1;
    const long hl = static_cast<long>(h);
    for (const Complex& z : a2_dominant) {
        const AngleClass c = classify_angle(z, tol);
        if (!c.is_rational) throw IrrationalAngle(z);
        m = std::lcm(m, c.q / std::gcd(c.q, hl));
    }
    return m;
}

/**
 * Decides whether the given A2 spectrum admits a nonnegative recursion given
 * cyclicity h. Without a positive real eigenvalue the answer is yes. Otherwise
 * the first failing check is reported:
 *   C1 the largest positive eigenvalue equals rho(A2);
 *   C2 every eigenvalue of modulus rho(A2) has a rational angle;
 *   C3 those eigenvalues are simple;
 *   C4 no smaller nonzero eigenvalue sits at an angle 2 pi m / (M h).
 * Modulus ties and multiplicities use tol.cluster relative to max(1, rho(A2)).
 */
inline RecursionCertificate roitman_conditions(const std::vector<Complex>& a2_spectrum, std::size_t h,
                                               const Tolerances& tol = {}) {
    RecursionCertificate cert;
    double rho2 = 0.0;
    for (const Complex& z : a2_spectrum) rho2 = std::max(rho2, std::abs(z));
    double r = -1.0;
    for (const Complex& z : a2_spectrum)
        if (detail::is_positive_real(z, rho2, tol)) r = std::max(r, z.real());
    if (r < 0.0) {
        cert.holds = true;
        cert.vacuous = true;
        return cert;
    }
    const double tie = tol.cluster * std::max(1.0, rho2);
    auto fail = [&](FailingCondition c) {
        cert.holds = false;
        cert.failing_condition = c;
        return cert;
    };
    if (std::abs(r - rho2) > tie) return fail(FailingCondition::C1);

    std::vector<Complex> dom, rest;
    for (const Complex& z : a2_spectrum) (std::abs(z) >= rho2 - tie ? dom : rest).push_back(z);
    for (const Complex& z : dom)
        if (!classify_angle(z, tol).is_rational) return fail(FailingCondition::C2);
    for (const Complex& z : dom) {
        std::size_t near = 0;
        for (const Complex& w : a2_spectrum)
            if (std::abs(z - w) <= tie) ++near;
        if (near > 1) return fail(FailingCondition::C3);
    }
    const double mh = static_cast<double>(minimal_M(dom, h, tol) * static_cast<long>(h));
    for (const Complex& z : rest) {
        if (std::abs(z) <= tol.eig * std::max(1.0, rho2)) continue;
        const double t = detail::angle_fraction(z) * mh;
        if (std::abs(t - std::round(t)) <= tol.angle * mh) return fail(FailingCondition::C4);
    }
    cert.holds = true;
    return cert;
}

/**
 * Searches degrees n_m = n .. k_max for A^n_m = sum_{i<n_m} c_i A^i with
 * c >= 0. Each degree is an LP over the n^2 entrywise equations, solved on
 * rho-normalised powers and minimising sum c_i, so the certificate is the
 * least-total-weight recursion of the lowest feasible degree. Returns
 * holds = false when no degree up to k_max works; throws BudgetExceeded if
 * the LP budget runs out before a verdict.
 */
inline RecursionCertificate nonneg_recursion_coeffs(const NonnegMatrix& a, std::size_t k_max,
                                                    const Tolerances& tol = {}) {
    const std::size_t n = a.dim();
    RecursionCertificate cert;
    if (k_max < n) return cert;
    double rho = 0.0;
    for (const Complex& z : eigenvalues(a.matrix())) rho = std::max(rho, std::abs(z));
    if (!(rho > 0.0)) rho = 1.0;
    const Matrix an = (1.0 / rho) * a.matrix();
    std::vector<Matrix> powers{Matrix::identity(n)};
    powers.reserve(k_max + 1);
    while (powers.size() <= k_max) powers.push_back(powers.back() * an);

    LPOptions opt;
    opt.tol = tol.lp;
    for (std::size_t nm = n; nm <= k_max; ++nm) {
        LPProblem<double> lp;
        lp.eq_matrix = Matrix(n * n, nm);
        lp.eq_rhs.resize(n * n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                for (std::size_t i = 0; i < nm; ++i) lp.eq_matrix(r * n + c, i) = powers[i](r, c);
                lp.eq_rhs[r * n + c] = powers[nm](r, c);
            }
        // c_i = d_i rho^(nm-i); weights rescaled so the largest is 1.
        std::vector<double> w(nm);
        double wmax = 0.0;
        for (std::size_t i = 0; i < nm; ++i) {
            w[i] = std::pow(rho, static_cast<double>(nm - i));
            wmax = std::max(wmax, w[i]);
        }
        lp.objective.resize(nm);
        for (std::size_t i = 0; i < nm; ++i) lp.objective[i] = w[i] / wmax;
        LPSolution<double> sol;
        try {
            sol = solve(lp, opt);
        } catch (const IterationLimit&) {
            throw BudgetExceeded(n, nm);
        }
        if (sol.status != LPStatus::optimal) continue;

        std::vector<double> coeffs(nm);
        for (std::size_t i = 0; i < nm; ++i) coeffs[i] = sol.x[i] * w[i];
        Matrix lhs = matrix_power(a.matrix(), nm);
        Matrix sum(n, n);
        Matrix pw = Matrix::identity(n);
        for (std::size_t i = 0; i < nm; ++i) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) sum(r, c) += coeffs[i] * pw(r, c);
            pw = pw * a.matrix();
        }
        const double denom = std::max(norm_inf(lhs), 1e-300);
        const double resid = norm_inf(lhs - sum) / denom;
        if (resid > tol.recur) continue;
        cert.holds = true;
        cert.degree_nm = nm;
        cert.coefficients = std::move(coeffs);
        cert.residual = resid;
        return cert;
    }
    return cert;
}

}  // namespace poscon
