#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <numbers>

#include <poscon/spectral.hpp>

#include "support.hpp"

using namespace poscon;
namespace ts = testing_support;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<Complex> oracle_eigenvalues(const Matrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<Complex> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

// Greedy matching of two multisets; returns the worst pairing distance.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    for (const Complex& z : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](Complex x, Complex y) { return std::abs(x - z) < std::abs(y - z); });
        worst = std::max(worst, std::abs(*it - z));
        b.erase(it);
    }
    return worst;
}

Matrix random_positive_pattern(std::size_t n, double density) {
    for (;;) {
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (ts::uniform(0, 1) < density) a(i, j) = ts::uniform(0.05, 3.0);
        if (is_irreducible(NonnegMatrix(a))) return a;
    }
}

}  // namespace

TEST_CASE("eigenvalues of small fixed matrices") {
    CHECK(multiset_distance(eigenvalues(Matrix::identity(3)), {1, 1, 1}) < 1e-14);
    CHECK(multiset_distance(eigenvalues(Matrix{{0, 1}, {1, 0}}), {1, -1}) < 1e-14);
    CHECK(multiset_distance(eigenvalues(Matrix{{0, -1}, {1, 0}}), {Complex(0, 1), Complex(0, -1)}) < 1e-14);
    CHECK(multiset_distance(eigenvalues(Matrix{{5.0}}), {5.0}) == 0.0);
    for (std::size_t n = 2; n <= 8; ++n) {
        Matrix p(n, n);
        for (std::size_t i = 0; i < n; ++i) p((i + 1) % n, i) = 1.0;
        std::vector<Complex> roots;
        for (std::size_t k = 0; k < n; ++k) roots.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / n));
        CHECK(multiset_distance(eigenvalues(p), roots) < 1e-12);
    }
}

TEST_CASE("eigenvalues agree with an independent solver on the worked systems") {
    for (const Matrix& a : {ts::primitive_polyhedral_closure_a(), ts::round_cone_a(), ts::vertex_six_a(), ts::planar_a()})
        CHECK(multiset_distance(eigenvalues(a), oracle_eigenvalues(a)) < 1e-10);
}

TEST_CASE("property: eigenvalues agree with an independent solver on random nonnegative matrices") {
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = static_cast<std::size_t>(ts::uniform_int(1, 10));
        const Matrix a = random_positive_pattern(n, ts::uniform(0.2, 1.0));
        const auto ours = eigenvalues(a);
        double rho = 0;
        for (auto z : ours) rho = std::max(rho, std::abs(z));
        CHECK(multiset_distance(ours, oracle_eigenvalues(a)) < 1e-8 * std::max(1.0, rho));
        // conjugate pairs are exact
        for (auto z : ours)
            if (z.imag() != 0.0)
                CHECK(std::count(ours.begin(), ours.end(), std::conj(z)) >= 1);
    }
}

TEST_CASE("spectrum of the worked systems") {
    SECTION("round-cone system") {
        auto s = spectrum(NonnegMatrix(ts::round_cone_a()));
        CHECK(multiset_distance(s.eigenvalues, {-1.05, 0.7116, 1.3383}) < 1e-3);
        CHECK_THAT(s.rho, WithinAbs(1.3383, 1e-3));
        CHECK(s.h == 1);
    }
    SECTION("four-state system") {
        auto s = spectrum(NonnegMatrix(ts::vertex_six_a()));
        // entries are printed to four decimals, so the match is loose
        CHECK(multiset_distance(s.eigenvalues, {10, -4, Complex(1, 1), Complex(1, -1)}) < 1e-3);
        CHECK_THAT(s.rho, WithinAbs(10.0, 1e-4));
    }
    SECTION("identity") {
        auto s = spectrum(NonnegMatrix::identity(3));
        CHECK(s.rho == 1.0);
        CHECK(s.eigenvalues.size() == 3);
    }
}

TEST_CASE("pf_split") {
    auto s1 = pf_split(NonnegMatrix(ts::primitive_polyhedral_closure_a()), SplitMode::infinite);
    CHECK(multiset_distance(s1.a2_spectrum, {0.9, -0.8}) < 1e-3);
    auto s2 = pf_split(NonnegMatrix(ts::round_cone_a()), SplitMode::infinite);
    CHECK(multiset_distance(s2.a2_spectrum, {-1.05, 0.7116}) < 1e-3);
    auto s3 = pf_split(NonnegMatrix(ts::vertex_six_a()), SplitMode::finite);
    CHECK(multiset_distance(s3.a2_spectrum, {-4, Complex(1, 1), Complex(1, -1)}) < 1e-3);

    // the two modes differ only when h > 1
    NonnegMatrix cyc{{0, 1}, {1, 0}};
    CHECK(pf_split(cyc, SplitMode::infinite).a2_spectrum.empty());
    auto fin = pf_split(cyc, SplitMode::finite);
    REQUIRE(fin.a2_spectrum.size() == 1);
    CHECK_THAT(fin.a2_spectrum[0].real(), WithinAbs(-1.0, 1e-12));
    CHECK_THROWS_AS(pf_split(NonnegMatrix{{1, 0}, {1, 1}}, SplitMode::finite), Reducible);
}

TEST_CASE("classify_angle") {
    auto a = classify_angle(-0.8);
    CHECK(a.is_rational);
    CHECK(a.p == 1);
    CHECK(a.q == 2);
    auto b = classify_angle(Complex(1, 1));
    CHECK(b.is_rational);
    CHECK(b.p == 1);
    CHECK(b.q == 8);
    CHECK_FALSE(classify_angle(std::polar(2.0, 2 * std::numbers::pi * 0.31416)).is_rational);
    auto c = classify_angle(3.0);
    CHECK(c.is_rational);
    CHECK(c.p == 0);
    CHECK(c.q == 1);
}

TEST_CASE("property: conjugation mirrors the angle class") {
    for (int trial = 0; trial < 200; ++trial) {
        Complex z;
        if (trial % 2 == 0) {
            const int q = ts::uniform_int(2, 64);
            const int p = ts::uniform_int(1, q - 1);
            z = std::polar(ts::uniform(0.1, 5.0), 2 * std::numbers::pi * p / q);
        } else {
            z = std::polar(ts::uniform(0.1, 5.0), ts::uniform(0.01, 6.27));
        }
        if (z.imag() == 0.0) continue;
        auto a = classify_angle(z), b = classify_angle(std::conj(z));
        CHECK(a.is_rational == b.is_rational);
        if (a.is_rational) {
            CHECK(a.q == b.q);
            CHECK(b.p == (a.q - a.p) % a.q);
        }
    }
}

TEST_CASE("minimal_M") {
    CHECK(minimal_M({-2.0}, 1) == 2);
    CHECK(minimal_M({std::polar(1.0, 2 * std::numbers::pi / 3), std::polar(1.0, 4 * std::numbers::pi / 3)}, 1) == 3);
    CHECK(minimal_M({-2.0}, 2) == 1);
    CHECK(minimal_M({1.5}, 1) == 1);
    CHECK_THROWS_AS(minimal_M({std::polar(1.0, 2 * std::numbers::pi * 0.31416)}, 1), IrrationalAngle);
}

TEST_CASE("roitman_conditions") {
    SECTION("positive dominant simple eigenvalue holds") {
        auto c = roitman_conditions({0.9, -0.8}, 1);
        CHECK(c.holds);
        CHECK_FALSE(c.vacuous);
    }
    SECTION("positive eigenvalue below rho(A2) fails C1") {
        auto c = roitman_conditions({-1.05, 0.7116}, 1);
        CHECK_FALSE(c.holds);
        REQUIRE(c.failing_condition);
        CHECK(*c.failing_condition == FailingCondition::C1);
    }
    SECTION("no positive eigenvalue holds vacuously") {
        auto c = roitman_conditions({-4, Complex(1, 1), Complex(1, -1)}, 1);
        CHECK(c.holds);
        CHECK(c.vacuous);
    }
    SECTION("irrational dominant angle fails C2") {
        const Complex z = std::polar(1.0, 2 * std::numbers::pi * 0.31416);
        auto c = roitman_conditions({1.0, z, std::conj(z)}, 1);
        CHECK(*c.failing_condition == FailingCondition::C2);
    }
    SECTION("double dominant eigenvalue fails C3") {
        auto c = roitman_conditions({1.0, 1.0, 0.3}, 1);
        CHECK(*c.failing_condition == FailingCondition::C3);
    }
    SECTION("smaller eigenvalue on a dominant ray fails C4") {
        auto c = roitman_conditions({1.0, 0.5}, 1);
        CHECK(*c.failing_condition == FailingCondition::C4);
        auto d = roitman_conditions({1.0, -1.0, -0.5}, 1);  // M = 2 admits angle 1/2
        CHECK(*d.failing_condition == FailingCondition::C4);
        auto e = roitman_conditions({1.0, -0.5}, 1);
        CHECK(e.holds);
    }
    SECTION("zero eigenvalues carry no angle") { CHECK(roitman_conditions({1.0, 0.0}, 1).holds); }
}

TEST_CASE("characteristic polynomial") {
    auto c = characteristic_polynomial(ts::planar_a());
    REQUIRE(c.size() == 3);
    CHECK_THAT(c[1], WithinAbs(-6.0, 1e-12));
    CHECK_THAT(c[2], WithinAbs(-36.0, 1e-12));
    Matrix p(4, 4);
    for (std::size_t i = 0; i < 4; ++i) p((i + 1) % 4, i) = 2.0;
    auto cp = characteristic_polynomial(p);
    CHECK(cp[1] == 0.0);
    CHECK(cp[2] == 0.0);
    CHECK(cp[3] == 0.0);
    CHECK_THAT(cp[4], WithinAbs(-16.0, 1e-12));
    for (auto z : eigenvalues(ts::vertex_six_a()))
        CHECK(std::abs(eval_poly(characteristic_polynomial(ts::vertex_six_a()), z)) < 1e-6 * 1e4);
}

TEST_CASE("nonnegative recursion search") {
    SECTION("four-state system recurs at degree six") {
        NonnegMatrix a(ts::vertex_six_a());
        auto c = nonneg_recursion_coeffs(a, default_k_max(4));
        REQUIRE(c.holds);
        CHECK(c.degree_nm == 6);
        const std::vector<double> expected{166.7569, 16.1434, 0, 0, 39.7036, 6.0262};
        for (std::size_t i = 0; i < 6; ++i) {
            if (expected[i] == 0.0)
                CHECK(std::abs(c.coefficients[i]) < 1e-6);
            else
                CHECK_THAT(c.coefficients[i], WithinRel(expected[i], 1e-2));
        }
        CHECK(c.residual <= Tolerances{}.recur);
    }
    SECTION("two-cycle recurs at degree two") {
        auto c = nonneg_recursion_coeffs(NonnegMatrix{{0, 1}, {1, 0}}, 20);
        REQUIRE(c.holds);
        CHECK(c.degree_nm == 2);
        CHECK_THAT(c.coefficients[0], WithinAbs(1.0, 1e-12));
        CHECK_THAT(c.coefficients[1], WithinAbs(0.0, 1e-12));
    }
    SECTION("positive non-Perron eigenvalue rules a recursion out") {
        auto c = nonneg_recursion_coeffs(NonnegMatrix(ts::primitive_polyhedral_closure_a()), 20);
        CHECK_FALSE(c.holds);
        CHECK_FALSE(c.failing_condition);
    }
}

TEST_CASE("property: Perron root is an eigenvalue with a positive eigenvector and the spectrum rotates by 2pi/h") {
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = static_cast<std::size_t>(ts::uniform_int(2, 7));
        Matrix a = random_positive_pattern(n, ts::uniform(0.25, 0.9));
        NonnegMatrix na(a);
        SpectralSummary s;
        try {
            s = spectrum(na);
        } catch (const CyclicityMismatch&) {
            FAIL("cyclicity mismatch");
        }
        const double tol = 1e-8 * std::max(1.0, s.rho);
        bool rho_is_eigen = false;
        for (auto z : s.eigenvalues) rho_is_eigen |= std::abs(z - s.rho) <= tol;
        CHECK(rho_is_eigen);
        Matrix shifted = a;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= s.rho;
        Vector v = null_vector(shifted);
        const double sign = std::accumulate(v.begin(), v.end(), 0.0) >= 0 ? 1.0 : -1.0;
        for (double x : v) CHECK(sign * x > -1e-8);
        const Complex rot = std::polar(1.0, 2 * std::numbers::pi / static_cast<double>(s.h));
        for (auto z : s.eigenvalues) {
            double best = 1e300;
            for (auto w : s.eigenvalues) best = std::min(best, std::abs(z * rot - w));
            CHECK(best <= 1e-6 * std::max(1.0, s.rho));
        }
        for (auto z : s.eigenvalues) CHECK(std::abs(z) <= s.rho + tol);
    }
}
