#include <catch_amalgamated.hpp>

#include <poscon/cones.hpp>

#include "support.hpp"

using namespace poscon;
namespace ts = testing_support;
using Catch::Matchers::WithinAbs;

namespace {

Matrix conmat_of(const Matrix& a, const Vector& b, std::size_t k) {
    Matrix m(a.rows(), k);
    Vector col = b;
    for (std::size_t j = 0; j < k; ++j) {
        m.set_column(j, col);
        col = a * col;
    }
    return m;
}

double witness_residual(const GeneratorCone& c, const Vector& w, const Vector& p) {
    Vector r = c.matrix() * w;
    double worst = 0;
    for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(r[i] - p[i]));
    return worst;
}

}  // namespace

TEST_CASE("construction drops zero generators and rejects negative ones") {
    GeneratorCone c(Matrix{{1, 0, 2}, {0, 0, 1}});
    CHECK(c.size() == 2);
    CHECK(c.label(1) == "g2");
    CHECK_THROWS_AS(GeneratorCone(Matrix{{1, -1}, {0, 1}}), NegativeEntry);
}

TEST_CASE("membership") {
    GeneratorCone planar(Matrix{{2, 12}, {1, 24}});
    auto m = member(planar, Vector{3, 2});
    REQUIRE(m.member);
    CHECK_THAT(m.witness[0], WithinAbs(4.0 / 3.0, 1e-12));
    CHECK_THAT(m.witness[1], WithinAbs(1.0 / 36.0, 1e-12));
    auto z = member(planar, Vector{0, 0});
    REQUIRE(z.member);
    CHECK(z.witness == Vector{0, 0});
    CHECK_FALSE(member(GeneratorCone(Matrix{{1}, {0}}), Vector{0, 1}).member);
    CHECK(member(GeneratorCone(2), Vector{0, 0}).member);
    CHECK_FALSE(member(GeneratorCone(2), Vector{1, 0}).member);
}

TEST_CASE("inclusion") {
    GeneratorCone planar(Matrix{{2, 12}, {1, 24}});
    GeneratorCone target(Matrix{{3, 2}, {2, 3}});
    CHECK(includes(planar, target));
    CHECK(includes(target, target));
    CHECK_FALSE(includes(GeneratorCone(Matrix{{1}, {1}}), GeneratorCone(Matrix::identity(2))));
}

TEST_CASE("A-invariance") {
    NonnegMatrix a6(ts::vertex_six_a());
    CHECK(a_invariant(GeneratorCone(conmat_of(a6.matrix(), ts::vertex_six_b(), 6)), a6));
    CHECK_FALSE(a_invariant(GeneratorCone(conmat_of(a6.matrix(), ts::vertex_six_b(), 5)), a6));
    CHECK(a_invariant(GeneratorCone(Matrix::identity(3)), NonnegMatrix(ts::round_cone_a())));
    NonnegMatrix a1(ts::primitive_polyhedral_closure_a());
    CHECK_FALSE(a_invariant(GeneratorCone(conmat_of(a1.matrix(), ts::primitive_polyhedral_closure_b(), 3)), a1));
}

TEST_CASE("simplicial enumeration") {
    auto x = simplicial_enumeration_member(GeneratorCone(Matrix{{2, 12}, {1, 24}}), Vector{3, 2});
    REQUIRE(x.size() == 1);
    CHECK_THAT(x[0][0], WithinAbs(4.0 / 3.0, 1e-12));
    CHECK_THAT(x[0][1], WithinAbs(1.0 / 36.0, 1e-12));

    auto two = simplicial_enumeration_member(GeneratorCone(Matrix{{1, 0, 1}, {0, 1, 1}}), Vector{1, 1});
    bool has_pair = false, has_diag = false;
    for (const auto& v : two) {
        has_pair |= std::abs(v[0] - 1) < 1e-12 && std::abs(v[1] - 1) < 1e-12 && v[2] == 0;
        has_diag |= v[0] == 0 && v[1] == 0 && std::abs(v[2] - 1) < 1e-12;
    }
    CHECK(has_pair);
    CHECK(has_diag);

    CHECK(simplicial_enumeration_member(GeneratorCone(Matrix{{2, 12}, {1, 24}}), Vector{1, 0}).empty());
    CHECK_THROWS_AS(simplicial_enumeration_member(GeneratorCone(Matrix{{1, 2}, {1, 2}}), Vector{1, 1}), RankDeficient);
    Tolerances small;
    small.enum_cap = 5;
    GeneratorCone four(Matrix{{1, 0, 1, 2}, {0, 1, 1, 1}});
    CHECK_THROWS_AS(simplicial_enumeration_member(four, Vector{1, 1}, small), CombinatorialBudget);
    CHECK_FALSE(simplicial_enumeration_member(four, Vector{1, 1}).empty());
}

TEST_CASE("simplex projection and deduplication") {
    auto pts = project_simplex(GeneratorCone(Matrix{{2, 0}, {1, 0}, {0, 5}}));
    CHECK_THAT(pts[0][0], WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(pts[0][1], WithinAbs(1.0 / 3.0, 1e-15));
    CHECK(pts[1] == Vector{0, 0, 1});
    GeneratorCone c(Matrix{{1, 2, 1}, {1, 2, 0}}, {"a", "b", "c"});
    auto d = deduplicate(c);
    CHECK(d.size() == 2);
    CHECK(d.label(0) == "a");
    CHECK(d.label(1) == "c");
}

namespace {

// Random full-row-rank generators in R^3 with first coordinate >= 20% of the mass.
GeneratorCone random_tilted_cone(std::size_t count) {
    for (;;) {
        Matrix m(3, count);
        for (std::size_t j = 0; j < count; ++j) {
            const double x2 = ts::uniform(0, 1), x3 = ts::uniform(0, 1);
            const double x1 = ts::uniform(0.25, 1.5) * (x2 + x3) + ts::uniform(0.01, 0.2);
            m(0, j) = x1;
            m(1, j) = x2;
            m(2, j) = x3;
        }
        if (numerical_rank(m, 1e-6) == 3) return GeneratorCone(m);
    }
}

}  // namespace

TEST_CASE("property: LP membership agrees with simplicial enumeration") {
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t count = static_cast<std::size_t>(ts::uniform_int(4, 7));
        GeneratorCone c = random_tilted_cone(count);
        Vector p(3);
        const bool inside = trial % 2 == 0;
        if (inside) {
            Vector coef(count);
            for (auto& v : coef) v = ts::uniform(0, 1);
            p = c.matrix() * coef;
        } else {
            p[1] = ts::uniform(0.1, 1);
            p[2] = ts::uniform(0.1, 1);
            p[0] = ts::uniform(0, 0.1) * (p[1] + p[2]);
        }
        auto lp = member(c, p);
        auto en = simplicial_enumeration_member(c, p);
        CHECK(lp.member == inside);
        CHECK(lp.member == !en.empty());
        if (lp.member) {
            CHECK(witness_residual(c, lp.witness, p) <= 1e-9 * (1 + norm_inf(p)));
            for (double w : lp.witness) CHECK(w >= 0.0);
            // rescaling a generator rescales its coefficient, not the verdict
            Matrix scaled = c.matrix();
            const double f = ts::uniform(0.01, 100);
            for (std::size_t i = 0; i < 3; ++i) scaled(i, 0) *= f;
            CHECK(member(GeneratorCone(scaled), p).member);
        }
    }
}

TEST_CASE("property: inclusion is transitive on nested generator prefixes") {
    for (int trial = 0; trial < 30; ++trial) {
        GeneratorCone big = random_tilted_cone(7);
        Matrix m = big.matrix();
        auto prefix = [&](std::size_t k) {
            Matrix sub(3, k);
            for (std::size_t j = 0; j < k; ++j) sub.set_column(j, m.column(j));
            return GeneratorCone(sub);
        };
        auto a = prefix(3), b = prefix(5), c = prefix(7);
        CHECK(includes(b, a));
        CHECK(includes(c, b));
        CHECK(includes(c, a));
        CHECK(includes(c, c));
    }
}
