#pragma once

// Nonnegative-matrix core: validation, adjacency digraph, irreducibility,
// cyclicity degree and the block-cyclic normal form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "tolerances.hpp"

namespace poscon {

/// Square matrix with every entry >= 0. Immutable once built.
class NonnegMatrix {
public:
    explicit NonnegMatrix(Matrix m) : m_(std::move(m)) {
        if (!m_.square() || m_.rows() == 0) throw InputError("posmat.Shape", "system matrix must be square with n >= 1");
        for (std::size_t i = 0; i < m_.rows(); ++i)
            for (std::size_t j = 0; j < m_.cols(); ++j)
                if (!(m_(i, j) >= 0.0)) throw NegativeEntry(i, j, m_(i, j), "A");
    }

    NonnegMatrix(std::initializer_list<std::initializer_list<double>> rows) : NonnegMatrix(Matrix(rows)) {}

    static NonnegMatrix identity(std::size_t n) { return NonnegMatrix(Matrix::identity(n)); }

    std::size_t dim() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }

private:
    Matrix m_;
};

/// Vector with every entry >= 0.
class NonnegVector {
public:
    explicit NonnegVector(Vector v, const char* where = "b") : v_(std::move(v)) {
        if (v_.empty()) throw InputError("posmat.Shape", std::string(where) + " must have at least one entry");
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (!(v_[i] >= 0.0)) throw NegativeEntry(i, 0, v_[i], where);
    }

    NonnegVector(std::initializer_list<double> v) : NonnegVector(Vector(v)) {}

    std::size_t dim() const noexcept { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    const Vector& values() const noexcept { return v_; }

private:
    Vector v_;
};

/**
 * Checks that (A, b) describes a positive system: square A, matching b and
 * no negative entry anywhere. Trajectories from x0 = 0 under nonnegative
 * inputs then stay in the orthant.
 */
inline void validate_positive_system(const Matrix& a, const Vector& b) {
    if (!a.square() || a.rows() == 0) throw InputError("posmat.Shape", "system matrix must be square with n >= 1");
    if (b.size() != a.rows())
        throw InputError("posmat.Shape", "input vector has " + std::to_string(b.size()) + " entries, expected " +
                                             std::to_string(a.rows()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!(a(i, j) >= 0.0)) throw NegativeEntry(i, j, a(i, j), "A");
    for (std::size_t i = 0; i < b.size(); ++i)
        if (!(b[i] >= 0.0)) throw NegativeEntry(i, 0, b[i], "b");
}

inline void validate_positive_system(const NonnegMatrix& a, const NonnegVector& b) {
    validate_positive_system(a.matrix(), b.values());
}

/// Adjacency list with an edge i -> j whenever A(j, i) > tol (x_i feeds x_j).
inline std::vector<std::vector<std::size_t>> adjacency(const NonnegMatrix& a, double tol = Tolerances{}.zero) {
    const std::size_t n = a.dim();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a(j, i) > tol) adj[i].push_back(j);
    return adj;
}

/// Tarjan's algorithm; components come out in reverse topological order.
inline std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& adj) {
    const std::size_t n = adj.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    std::size_t counter = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : adj[v]) {
            if (index[w] == unvisited) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] == unvisited) visit(v);
    return out;
}

/**
 * True iff the adjacency digraph is strongly connected. A 1x1 matrix counts
 * as irreducible only when its entry is positive; downstream analysis needs
 * rho(A) > 0.
 */
inline bool is_irreducible(const NonnegMatrix& a, double tol = Tolerances{}.zero) {
    if (a.dim() == 1) return a(0, 0) > tol;
    return strongly_connected_components(adjacency(a, tol)).size() == 1;
}

namespace detail {

// BFS levels from node 0; requires a strongly connected digraph.
inline std::vector<std::size_t> bfs_levels(const std::vector<std::vector<std::size_t>>& adj) {
    constexpr std::size_t unseen = static_cast<std::size_t>(-1);
    std::vector<std::size_t> level(adj.size(), unseen);
    std::queue<std::size_t> q;
    level[0] = 0;
    q.push(0);
    while (!q.empty()) {
        const std::size_t v = q.front();
        q.pop();
        for (std::size_t w : adj[v])
            if (level[w] == unseen) {
                level[w] = level[v] + 1;
                q.push(w);
            }
    }
    return level;
}

inline std::size_t period_from_levels(const std::vector<std::vector<std::size_t>>& adj,
                                      const std::vector<std::size_t>& level) {
    std::size_t g = 0;
    for (std::size_t v = 0; v < adj.size(); ++v)
        for (std::size_t w : adj[v]) {
            // level[v] + 1 >= level[w] always holds for BFS levels.
            const std::size_t diff = level[v] + 1 - level[w];
            g = std::gcd(g, diff);
        }
    return g == 0 ? 1 : g;
}

[[noreturn]] inline void throw_reducible(const NonnegMatrix& a, double tol) {
    if (a.dim() == 1) throw Reducible(std::vector<std::vector<std::size_t>>{{0}});
    throw Reducible(strongly_connected_components(adjacency(a, tol)));
}

}  // namespace detail

/**
 * Degree of cyclicity h: the gcd of all directed cycle lengths, read off
 * BFS levels (every edge u -> v contributes level(u) + 1 - level(v)).
 * The spectral module cross-checks it against the number of eigenvalues of
 * modulus rho(A).
 */
inline std::size_t cyclicity_degree(const NonnegMatrix& a, double tol = Tolerances{}.zero) {
    if (!is_irreducible(a, tol)) detail::throw_reducible(a, tol);
    const auto adj = adjacency(a, tol);
    return detail::period_from_levels(adj, detail::bfs_levels(adj));
}

struct StructureInfo {
    bool irreducible = false;
    std::size_t cyclicity_h = 1;
    // New position p holds original index permutation[p]. Empty when reducible.
    std::vector<std::size_t> permutation;
    std::vector<std::size_t> block_sizes;
    // Diagnostic partition, always populated.
    std::vector<std::vector<std::size_t>> components;
};

/// Ahat(p, q) = A(perm[p], perm[q]), i.e. S^T A S for the permutation matrix S.
inline Matrix permute_symmetric(const Matrix& a, const std::vector<std::size_t>& perm) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t p = 0; p < perm.size(); ++p)
        for (std::size_t q = 0; q < perm.size(); ++q) out(p, q) = a(perm[p], perm[q]);
    return out;
}

/**
 * Relabels the states of an irreducible A so that Ahat = S^T A S is block
 * cyclic: nonzero blocks only at (k, k+1) and (h-1, 0), zero diagonal blocks.
 * Ahat^h is then block diagonal. For h = 1 the identity permutation is
 * returned with A unchanged.
 */
inline std::pair<StructureInfo, NonnegMatrix> cyclic_normal_form(const NonnegMatrix& a,
                                                                double tol = Tolerances{}.zero) {
    const std::size_t n = a.dim();
    if (!is_irreducible(a, tol)) detail::throw_reducible(a, tol);
    const auto adj = adjacency(a, tol);
    const auto level = detail::bfs_levels(adj);
    const std::size_t h = detail::period_from_levels(adj, level);

    StructureInfo info;
    info.irreducible = true;
    info.cyclicity_h = h;
    info.components = {std::vector<std::size_t>(n)};
    std::iota(info.components[0].begin(), info.components[0].end(), std::size_t{0});

    // An edge i -> j means level(j) = level(i) + 1 (mod h); block = -level mod h
    // puts A(j, i) in block row (block(i) - 1), i.e. on the block superdiagonal.
    std::vector<std::size_t> block(n);
    for (std::size_t v = 0; v < n; ++v) block[v] = (h - level[v] % h) % h;
    info.permutation.resize(n);
    std::iota(info.permutation.begin(), info.permutation.end(), std::size_t{0});
    std::stable_sort(info.permutation.begin(), info.permutation.end(),
                     [&](std::size_t x, std::size_t y) { return block[x] < block[y]; });
    info.block_sizes.assign(h, 0);
    for (std::size_t v = 0; v < n; ++v) ++info.block_sizes[block[v]];

    NonnegMatrix permuted(permute_symmetric(a.matrix(), info.permutation));
    return {std::move(info), std::move(permuted)};
}

/// Structural summary for any nonnegative matrix, reducible ones included.
inline StructureInfo analyze_structure(const NonnegMatrix& a, double tol = Tolerances{}.zero) {
    if (is_irreducible(a, tol)) return cyclic_normal_form(a, tol).first;
    StructureInfo info;
    info.irreducible = false;
    info.cyclicity_h = 1;
    info.components = a.dim() == 1 ? std::vector<std::vector<std::size_t>>{{0}}
                                   : strongly_connected_components(adjacency(a, tol));
    return info;
}

}  // namespace poscon
