#pragma once

// Exact rational scalars for the simplex. Every finite double is a rational,
// so inputs convert without loss.

#include <gmpxx.h>

#include "linprog.hpp"
#include "matrix.hpp"

namespace poscon {

using Rational = mpq_class;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static Rational abs(const Rational& x) { return ::abs(x); }
};

inline DenseMatrix<Rational> to_rational(const Matrix& m) {
    DenseMatrix<Rational> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
    return out;
}

inline DenseVector<Rational> to_rational(const Vector& v) {
    DenseVector<Rational> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(v[i]);
    return out;
}

}  // namespace poscon
