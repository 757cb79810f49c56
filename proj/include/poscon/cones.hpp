#pragma once

// Polyhedral cones in the nonnegative orthant, held as generator lists.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linprog.hpp"
#include "matrix.hpp"
#include "posmat.hpp"
#include "tolerances.hpp"

namespace poscon {

class RankDeficient : public NumericalError {
public:
    RankDeficient(std::size_t rank, std::size_t dim)
        : NumericalError("cones.RankDeficient", "generators span rank " + std::to_string(rank) + " < " +
                                                    std::to_string(dim)) {}
};

class CombinatorialBudget : public NumericalError {
public:
    CombinatorialBudget(double subsets, std::size_t cap)
        : NumericalError("cones.CombinatorialBudget", "enumeration needs " + std::to_string(subsets) +
                                                          " subsets, cap is " + std::to_string(cap)) {}
};

/**
 * cone(g_1, ..., g_m) with one label per generator. Zero columns are dropped
 * on insertion; entries must be nonnegative (round-off negatives down to
 * -1e-12 |g|_inf are clamped to zero).
 */
class GeneratorCone {
public:
    GeneratorCone() = default;

    explicit GeneratorCone(std::size_t ambient_dim) : dim_(ambient_dim) {
        if (dim_ == 0) throw InputError("cones.Shape", "cone must live in dimension >= 1");
    }

    GeneratorCone(const Matrix& generators, const std::vector<std::string>& labels = {})
        : GeneratorCone(generators.rows()) {
        for (std::size_t j = 0; j < generators.cols(); ++j)
            add(generators.column(j), j < labels.size() ? labels[j] : "g" + std::to_string(j));
    }

    // Returns false when g is zero and was dropped.
    bool add(Vector g, std::string label) {
        if (g.size() != dim_) throw InputError("cones.Shape", "generator has wrong dimension");
        const double mx = norm_inf(g);
        if (!(mx > 0.0)) return false;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] < 0.0) {
                if (g[i] < -1e-12 * mx) throw NegativeEntry(i, gens_.size(), g[i], "generator");
                g[i] = 0.0;
            }
        }
        gens_.push_back(std::move(g));
        labels_.push_back(std::move(label));
        return true;
    }

    std::size_t ambient_dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return gens_.size(); }
    bool empty() const noexcept { return gens_.empty(); }
    const Vector& generator(std::size_t i) const { return gens_.at(i); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<Vector>& generators() const noexcept { return gens_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    Matrix matrix() const {
        Matrix m(dim_, gens_.size());
        for (std::size_t j = 0; j < gens_.size(); ++j) m.set_column(j, gens_[j]);
        return m;
    }

    /// Union of generator lists.
    GeneratorCone joined(const GeneratorCone& other) const {
        GeneratorCone out = *this;
        for (std::size_t j = 0; j < other.size(); ++j) out.add(other.generator(j), other.label(j));
        return out;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Vector> gens_;
    std::vector<std::string> labels_;
};

struct Membership {
    bool member = false;
    Vector witness;  // coefficients over the cone's generators, >= 0
};

/// p in cone(C)? Phase-one LP on the generator matrix; the witness is the coefficient vector.
inline Membership member(const GeneratorCone& c, const Vector& p, const Tolerances& tol = {}) {
    if (p.size() != c.ambient_dim()) throw InputError("cones.Shape", "point has wrong dimension");
    Membership out;
    if (c.empty()) {
        out.member = norm_inf(p) == 0.0;
        return out;
    }
    LPOptions opt;
    opt.tol = tol.lp;
    auto f = feasible(c.matrix(), p, opt);
    out.member = f.feasible;
    if (f.feasible) out.witness = std::move(f.witness);
    return out;
}

inline Membership member(const GeneratorCone& c, const NonnegVector& p, const Tolerances& tol = {}) {
    return member(c, p.values(), tol);
}

/// cone(inner) subset of cone(outer), checked generator by generator.
inline bool includes(const GeneratorCone& outer, const GeneratorCone& inner, const Tolerances& tol = {}) {
    for (const Vector& g : inner.generators())
        if (!member(outer, g, tol).member) return false;
    return true;
}

/// A cone(C) subset of cone(C): every A g is a member.
inline bool a_invariant(const GeneratorCone& c, const NonnegMatrix& a, const Tolerances& tol = {}) {
    for (const Vector& g : c.generators())
        if (!member(c, a.matrix() * g, tol).member) return false;
    return true;
}

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

inline double norm1_condition(const Matrix& b, const Matrix& inv) {
    auto n1 = [](const Matrix& m) {
        double best = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
            best = std::max(best, s);
        }
        return best;
    };
    return n1(b) * n1(inv);
}

}  // namespace detail

/**
 * Every nonnegative basic solution of G x = p: for each n-subset of
 * generators with a well-conditioned square submatrix, solve and keep the
 * solution when all coefficients are >= -tol.lp. Each returned vector has one
 * entry per generator (zero outside the subset). Nonempty iff p is in the cone.
 * Exponential in the generator count; intended as a test oracle.
 */
inline std::vector<Vector> simplicial_enumeration_member(const GeneratorCone& c, const Vector& p,
                                                         const Tolerances& tol = {}) {
    const std::size_t n = c.ambient_dim();
    const std::size_t m = c.size();
    if (p.size() != n) throw InputError("cones.Shape", "point has wrong dimension");
    const std::size_t rank = m == 0 ? 0 : numerical_rank(c.matrix(), tol.rank);
    if (rank < n) throw RankDeficient(rank, n);
    const double count = detail::binomial(m, n);
    if (count > static_cast<double>(tol.enum_cap)) throw CombinatorialBudget(count, tol.enum_cap);

    // Unit 1-norm columns keep the sign test independent of generator scale.
    std::vector<double> scale(m);
    for (std::size_t j = 0; j < m; ++j) scale[j] = norm_1(c.generator(j));
    const double slack = tol.lp * (1.0 + norm_inf(p));

    std::vector<Vector> out;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (;;) {
        Matrix b(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) b(i, k) = c.generator(idx[k])[i] / scale[idx[k]];
        Matrix inv;
        if (invert(b, inv) && detail::norm1_condition(b, inv) <= tol.cond_max) {
            const Vector y = inv * p;
            if (std::all_of(y.begin(), y.end(), [&](double v) { return v >= -slack; })) {
                Vector x(m, 0.0);
                for (std::size_t k = 0; k < n; ++k) x[idx[k]] = std::max(y[k], 0.0) / scale[idx[k]];
                out.push_back(std::move(x));
            }
        }
        // next n-subset in lexicographic order
        std::size_t k = n;
        while (k > 0 && idx[k - 1] == m - n + k - 1) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t j = k; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

/// Each generator scaled onto the unit simplex {x >= 0, sum x = 1}.
inline std::vector<Vector> project_simplex(const GeneratorCone& c) {
    std::vector<Vector> out;
    out.reserve(c.size());
    for (const Vector& g : c.generators()) {
        const double s = std::accumulate(g.begin(), g.end(), 0.0);
        Vector q = g;
        for (double& v : q) v /= s;
        out.push_back(std::move(q));
    }
    return out;
}

/// Merges generators whose simplex projections agree within tol.dedup (first label wins).
inline GeneratorCone deduplicate(const GeneratorCone& c, const Tolerances& tol = {}) {
    GeneratorCone out(c.ambient_dim());
    const auto proj = project_simplex(c);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < c.size(); ++j) {
        bool dup = false;
        for (std::size_t k : kept) {
            double d = 0.0;
            for (std::size_t i = 0; i < c.ambient_dim(); ++i) d = std::max(d, std::abs(proj[j][i] - proj[k][i]));
            if (d <= tol.dedup) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        kept.push_back(j);
        out.add(c.generator(j), c.label(j));
    }
    return out;
}

}  // namespace poscon
