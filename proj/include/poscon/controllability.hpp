#pragma once

// Controllable cones of x(t+1) = A x(t) + b u(t), x(0) = 0, u >= 0:
// controllability matrices, limit matrices, polyhedrality verdicts, vertex
// numbers and target reachability with input reconstruction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cones.hpp"
#include "errors.hpp"
#include "linprog.hpp"
#include "matrix.hpp"
#include "posmat.hpp"
#include "rational.hpp"
#include "spectral.hpp"
#include "tolerances.hpp"

namespace poscon {

class ConvergenceFailure : public NumericalError {
public:
    explicit ConvergenceFailure(std::size_t squarings)
        : NumericalError("controllability.ConvergenceFailure",
                         "limit matrix did not settle after " + std::to_string(squarings) + " squarings") {}
};

class LimitGeneratorUsed : public Error {
public:
    LimitGeneratorUsed()
        : Error("controllability.LimitGeneratorUsed",
                "witness uses a limit generator; no finite input sequence reaches this target") {}
};

class RankDeficientSystem : public InputError {
public:
    RankDeficientSystem(std::size_t rank, std::size_t n)
        : InputError("controllability.RankDeficient",
                     "controllability matrix [b, Ab, ..., A^(n-1) b] has rank " + std::to_string(rank) + " < " +
                         std::to_string(n) + " and b is not in the cone of the Frobenius eigenvectors") {}
};

/// Single-input positive system with its structural and spectral data.
class SystemSI {
public:
    SystemSI(NonnegMatrix a, NonnegVector b, Tolerances tol = {})
        : a_(std::move(a)), b_(std::move(b)), tol_(tol), ahat_(NonnegMatrix::identity(1)) {
        validate_positive_system(a_, b_);
        if (!is_irreducible(a_, tol_.zero)) detail::throw_reducible(a_, tol_.zero);
        auto [info, ahat] = cyclic_normal_form(a_, tol_.zero);
        structure_ = std::move(info);
        ahat_ = std::move(ahat);
        spectral_ = spectrum(a_, tol_);
        Matrix cm(dim(), dim());
        Vector col = b_.values();
        for (std::size_t j = 0; j < dim(); ++j) {
            cm.set_column(j, col);
            col = a_.matrix() * col;
        }
        rank_ = numerical_rank(cm, tol_.rank);
    }

    SystemSI(const Matrix& a, const Vector& b, Tolerances tol = {})
        : SystemSI(NonnegMatrix(a), NonnegVector(b), tol) {}

    std::size_t dim() const noexcept { return a_.dim(); }
    const NonnegMatrix& a() const noexcept { return a_; }
    const NonnegVector& b() const noexcept { return b_; }
    const StructureInfo& structure() const noexcept { return structure_; }
    const NonnegMatrix& normal_form() const noexcept { return ahat_; }
    const SpectralSummary& spectral() const noexcept { return spectral_; }
    const Tolerances& tol() const noexcept { return tol_; }
    std::size_t h() const noexcept { return structure_.cyclicity_h; }
    double rho() const noexcept { return spectral_.rho; }
    std::size_t conmat_rank() const noexcept { return rank_; }
    bool full_rank() const noexcept { return rank_ == dim(); }

private:
    NonnegMatrix a_;
    NonnegVector b_;
    Tolerances tol_;
    StructureInfo structure_;
    NonnegMatrix ahat_;
    SpectralSummary spectral_;
    std::size_t rank_ = 0;
};

inline std::string power_label(std::size_t j) {
    if (j == 0) return "b";
    if (j == 1) return "A b";
    return "A^" + std::to_string(j) + " b";
}

/// Raw columns b, A b, ..., A^(k-1) b.
inline Matrix conmat_matrix(const SystemSI& sys, std::size_t k) {
    Matrix m(sys.dim(), k);
    Vector col = sys.b().values();
    for (std::size_t j = 0; j < k; ++j) {
        m.set_column(j, col);
        if (j + 1 < k) col = sys.a().matrix() * col;
    }
    return m;
}

/// cone(b, A b, ..., A^(k-1) b) with power labels.
inline GeneratorCone conmat(const SystemSI& sys, std::size_t k) {
    if (k == 0) throw InputError("controllability.Horizon", "controllability matrix needs k >= 1");
    const Matrix m = conmat_matrix(sys, k);
    GeneratorCone c(sys.dim());
    for (std::size_t j = 0; j < k; ++j) c.add(m.column(j), power_label(j));
    return c;
}

struct LimitCone {
    std::vector<Matrix> a_f;  // P A^i, i = 0 .. h-1, with P = lim (A^h / rho^h)^k
    GeneratorCone c_lim;      // A_f,i b
    GeneratorCone v_f;        // nonnegative eigenvectors of A^h for rho^h, unit 1-norm
    std::size_t squarings = 0;
};

/**
 * Limit matrices by repeated squaring of A^h / rho^h until successive
 * iterates differ by at most tol.lim (relative), plus one confirming squaring.
 * The eigenvectors v_f come from the diagonal blocks of the h-th power of the
 * block-cyclic normal form, one per block.
 */
inline LimitCone limit_cone(const SystemSI& sys) {
    const std::size_t n = sys.dim(), h = sys.h();
    const Tolerances& tol = sys.tol();
    const double rho_h = std::pow(sys.rho(), static_cast<double>(h));
    Matrix p = (1.0 / rho_h) * matrix_power(sys.a().matrix(), h);
    constexpr std::size_t budget = 64;
    LimitCone out{{}, GeneratorCone(n), GeneratorCone(n), 0};
    for (;;) {
        if (out.squarings >= budget) throw ConvergenceFailure(budget);
        Matrix next = p * p;
        ++out.squarings;
        const double change = norm_inf(next - p);
        p = std::move(next);
        if (change <= tol.lim * std::max(1.0, norm_inf(p))) break;
    }
    p = p * p;
    ++out.squarings;

    Matrix ai = Matrix::identity(n);
    for (std::size_t i = 0; i < h; ++i) {
        out.a_f.push_back(p * ai);
        out.c_lim.add(out.a_f.back() * sys.b().values(), "A_f," + std::to_string(i) + " b");
        ai = ai * sys.a().matrix();
    }

    const Matrix lh = (1.0 / rho_h) * matrix_power(sys.normal_form().matrix(), h);
    const auto& perm = sys.structure().permutation;
    std::size_t offset = 0;
    for (std::size_t k = 0; k < h; ++k) {
        const std::size_t sz = sys.structure().block_sizes[k];
        Matrix blk(sz, sz);
        for (std::size_t i = 0; i < sz; ++i)
            for (std::size_t j = 0; j < sz; ++j) blk(i, j) = lh(offset + i, offset + j) - (i == j ? 1.0 : 0.0);
        Vector v = null_vector(blk);
        double sum = 0.0;
        for (double x : v) sum += x;
        if (sum < 0.0)
            for (double& x : v) x = -x;
        for (double& x : v) x = std::max(x, 0.0);
        sum = 0.0;
        for (double x : v) sum += x;
        Vector full(n, 0.0);
        for (std::size_t i = 0; i < sz; ++i) full[perm[offset + i]] = v[i] / sum;
        out.v_f.add(full, "v_f," + std::to_string(k));
        offset += sz;
    }
    return out;
}

/// Residuals |A A_f,i - A_f,i+1|_inf (i < h-1) followed by |A A_f,h-1 - rho^h A_f,0|_inf.
inline std::vector<double> limit_identity_residuals(const SystemSI& sys, const LimitCone& lc) {
    std::vector<double> r;
    const std::size_t h = lc.a_f.size();
    for (std::size_t i = 0; i + 1 < h; ++i) r.push_back(norm_inf(sys.a().matrix() * lc.a_f[i] - lc.a_f[i + 1]));
    const double rho_h = std::pow(sys.rho(), static_cast<double>(h));
    r.push_back(norm_inf(sys.a().matrix() * lc.a_f[h - 1] - rho_h * lc.a_f[0]));
    return r;
}

struct PolyhedralityVerdict {
    SplitMode mode = SplitMode::finite;
    bool polyhedral = false;  // spectral verdict, authoritative
    RecursionCertificate spectral_test;
    std::vector<Complex> a2_spectrum;
    bool direct_found = false;
    std::optional<std::size_t> k_vert;  // smallest k passing the direct test
    std::size_t k_searched = 0;
    bool agreement = true;  // spectral verdict matches the direct evidence
    std::optional<GeneratorCone> generators;
    // finite mode only
    bool simplicial = false;
    std::vector<double> char_poly;
    std::optional<bool> vf_contained;
};

class Disagreement : public NumericalError {
public:
    explicit Disagreement(PolyhedralityVerdict v)
        : NumericalError("controllability.Disagreement",
                         std::string("spectral test says the ") + (v.mode == SplitMode::finite ? "finite" : "infinite") +
                             " controllable subset is polyhedral but no vertex number was found up to k = " +
                             std::to_string(v.k_searched)),
          verdict_(std::move(v)) {}

    const PolyhedralityVerdict& verdict() const noexcept { return verdict_; }

private:
    PolyhedralityVerdict verdict_;
};

namespace detail {

inline Vector unit1(Vector v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    if (s > 0.0)
        for (double& x : v) x /= s;
    return v;
}

// Smallest k in 1..k_max with A^k b in cone(b, ..., A^(k-1) b). A double
// LP on unit 1-norm directions screens each k; candidate hits are confirmed in
// exact rational arithmetic, since the distance of A^k b from the cone can
// shrink like (mu / rho)^k, far below any floating tolerance.
inline std::optional<std::size_t> exact_vertex_search(const SystemSI& sys, std::size_t k_max) {
    const std::size_t n = sys.dim();
    const DenseMatrix<Rational> a = to_rational(sys.a().matrix());
    std::vector<DenseVector<Rational>> pw{to_rational(sys.b().values())};
    std::vector<Vector> dirs{unit1(sys.b().values())};
    for (std::size_t k = 1; k <= k_max; ++k) {
        pw.push_back(a * pw.back());
        dirs.push_back(unit1(sys.a().matrix() * dirs.back()));
        GeneratorCone screen(n);
        for (std::size_t j = 0; j < k; ++j) screen.add(dirs[j], power_label(j));
        if (!member(screen, dirs[k], sys.tol()).member) continue;
        DenseMatrix<Rational> m(n, k);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < n; ++i) m(i, j) = pw[j][i];
        if (feasible(m, pw[k]).feasible) return k;
    }
    return std::nullopt;
}

// Same search with the limit generators appended. Those are floating-point
// limits, so this one runs in double on unit 1-norm directions.
inline std::optional<std::size_t> limit_vertex_search(const SystemSI& sys, std::size_t k_max,
                                                      const GeneratorCone& extra) {
    const std::size_t n = sys.dim();
    std::vector<Vector> dirs{unit1(sys.b().values())};
    for (std::size_t k = 1; k <= k_max; ++k) {
        dirs.push_back(unit1(sys.a().matrix() * dirs.back()));
        GeneratorCone c(n);
        for (std::size_t j = 0; j < k; ++j) c.add(dirs[j], power_label(j));
        for (std::size_t j = 0; j < extra.size(); ++j) c.add(unit1(extra.generator(j)), extra.label(j));
        if (member(c, dirs[k], sys.tol()).member) return k;
    }
    return std::nullopt;
}

inline void require_full_rank(const SystemSI& sys) {
    if (!sys.full_rank()) throw RankDeficientSystem(sys.conmat_rank(), sys.dim());
}

}  // namespace detail

/**
 * Finite controllable subset. Spectral verdict: polyhedral iff the spectrum
 * without rho has no positive eigenvalue. Direct evidence: smallest k with
 * A^k b in cone(conmat_k). The simplicial flag is set when every
 * characteristic-polynomial coefficient after the leading one is <= 0 (up to
 * tol.coeff max(1, rho)^i). Throws Disagreement when the spectral verdict is
 * polyhedral but no k up to k_max passes.
 */
inline PolyhedralityVerdict polyhedral_fin(const SystemSI& sys, std::size_t k_max, const LimitCone* lc = nullptr) {
    detail::require_full_rank(sys);
    const Tolerances& tol = sys.tol();
    PolyhedralityVerdict v;
    v.mode = SplitMode::finite;
    const SpectralSummary s = pf_split(sys.a(), SplitMode::finite, tol);
    v.a2_spectrum = s.a2_spectrum;
    bool positive = false;
    for (const Complex& z : s.a2_spectrum) positive |= detail::is_positive_real(z, s.rho, tol);
    v.polyhedral = !positive;
    v.spectral_test.holds = !positive;
    v.spectral_test.vacuous = !positive;

    v.char_poly = characteristic_polynomial(sys.a().matrix());
    v.simplicial = true;
    for (std::size_t i = 1; i < v.char_poly.size(); ++i)
        if (v.char_poly[i] > tol.coeff * std::pow(std::max(1.0, s.rho), static_cast<double>(i))) v.simplicial = false;

    v.k_searched = k_max;
    v.k_vert = detail::exact_vertex_search(sys, k_max);
    v.direct_found = v.k_vert.has_value();
    v.agreement = v.polyhedral == v.direct_found;
    if (v.polyhedral && !v.direct_found) throw Disagreement(std::move(v));
    if (v.polyhedral) {
        v.generators = deduplicate(conmat(sys, *v.k_vert), tol);
        if (lc) v.vf_contained = includes(*v.generators, lc->v_f, tol);
    }
    return v;
}

/**
 * Closure of the finite controllable subset. Spectral verdict: the recursion
 * conditions on the non-dominant spectrum with cyclicity h. Direct evidence:
 * smallest k with A^k b in cone(conmat_k, C_lim). On a polyhedral verdict the
 * generators are conmat_k plus the limit generators.
 */
inline PolyhedralityVerdict polyhedral_inf(const SystemSI& sys, const LimitCone& lc, std::size_t k_max) {
    detail::require_full_rank(sys);
    const Tolerances& tol = sys.tol();
    PolyhedralityVerdict v;
    v.mode = SplitMode::infinite;
    const SpectralSummary s = pf_split(sys.a(), SplitMode::infinite, tol);
    v.a2_spectrum = s.a2_spectrum;
    v.spectral_test = roitman_conditions(s.a2_spectrum, sys.h(), tol);
    v.polyhedral = v.spectral_test.holds;

    v.k_searched = k_max;
    v.k_vert = detail::limit_vertex_search(sys, k_max, lc.c_lim);
    v.direct_found = v.k_vert.has_value();
    v.agreement = v.polyhedral == v.direct_found;
    if (v.polyhedral && !v.direct_found) throw Disagreement(std::move(v));
    if (v.polyhedral) v.generators = deduplicate(conmat(sys, *v.k_vert).joined(lc.c_lim), tol);
    return v;
}

/**
 * When b lies in cone(v_f) the finite controllable subset is exactly
 * cone(b, ..., A^(h-1) b), whatever the rank of conmat_n.
 */
inline std::optional<GeneratorCone> special_case(const SystemSI& sys, const LimitCone& lc) {
    if (!member(lc.v_f, sys.b().values(), sys.tol()).member) return std::nullopt;
    return deduplicate(conmat(sys, sys.h()), sys.tol());
}

enum class TargetStatus { controllable_finite, almost_controllable, not_controllable };

inline const char* to_string(TargetStatus s) {
    switch (s) {
        case TargetStatus::controllable_finite: return "controllable_finite";
        case TargetStatus::almost_controllable: return "almost_controllable";
        case TargetStatus::not_controllable: return "not_controllable";
    }
    return "?";
}

enum class TargetKind { cone, polytope };

inline const char* to_string(TargetKind k) { return k == TargetKind::cone ? "cone" : "polytope"; }

struct InputSequence {
    std::vector<double> u;  // u(0) .. u(N-1)
    Vector final_state;     // x(N) from x(0) = 0
};

/**
 * Inputs realising a conic combination of b, A b, ..., A^(N-1) b:
 * u(N-1-j) = c_j. Entries of `witness` past the first N belong to limit
 * generators; any positive one raises LimitGeneratorUsed.
 */
inline InputSequence reconstruct_inputs(const SystemSI& sys, const std::vector<double>& witness, std::size_t horizon) {
    if (witness.size() < horizon) throw InputError("controllability.Shape", "witness shorter than the horizon");
    for (std::size_t j = horizon; j < witness.size(); ++j)
        if (witness[j] > 0.0) throw LimitGeneratorUsed();
    InputSequence out;
    out.u.assign(horizon, 0.0);
    for (std::size_t j = 0; j < horizon; ++j) out.u[horizon - 1 - j] = witness[j];
    Vector x(sys.dim(), 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
        Vector next = sys.a().matrix() * x;
        for (std::size_t i = 0; i < x.size(); ++i) next[i] += sys.b()[i] * out.u[t];
        x = std::move(next);
    }
    out.final_state = std::move(x);
    return out;
}

struct TargetResult {
    Vector target;
    TargetStatus status = TargetStatus::not_controllable;
    std::size_t horizon = 0;
    Vector witness;  // over conmat_N columns, then v_f columns when almost controllable
    double objective = 0.0;
    double residual = 0.0;  // |M x - p|_inf
    std::optional<InputSequence> inputs;
    double replay_error = 0.0;
};

/**
 * Reachability of each target point with a minimum-total-input LP over
 * conmat_N; if that fails, over conmat_N together with v_f (reachable only
 * in the limit). Targets are vertices of a polytope or rays of a cone; both
 * kinds reduce to per-point checks.
 */
inline std::vector<TargetResult> check_target(const SystemSI& sys, const LimitCone& lc,
                                              const std::vector<Vector>& targets, std::size_t horizon) {
    if (horizon == 0) throw InputError("controllability.Horizon", "horizon must be >= 1");
    const Tolerances& tol = sys.tol();
    const std::size_t n = sys.dim();
    const Matrix mf = conmat_matrix(sys, horizon);
    Matrix minf(n, horizon + lc.v_f.size());
    for (std::size_t j = 0; j < horizon; ++j) minf.set_column(j, mf.column(j));
    for (std::size_t j = 0; j < lc.v_f.size(); ++j) minf.set_column(horizon + j, lc.v_f.generator(j));
    LPOptions opt;
    opt.tol = tol.lp;

    std::vector<TargetResult> out;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const Vector& p = targets[t];
        if (p.size() != n)
            throw InputError("controllability.Shape", "target " + std::to_string(t) + " has wrong dimension");
        NonnegVector(p, "target");
        TargetResult r;
        r.target = p;
        r.horizon = horizon;
        auto residual = [&](const Matrix& m, const Vector& x) {
            const Vector mx = m * x;
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(mx[i] - p[i]));
            return worst;
        };
        auto fin = solve(LPProblem<double>{Vector(horizon, 1.0), mf, p}, opt);
        if (fin.status == LPStatus::optimal) {
            r.status = TargetStatus::controllable_finite;
            r.witness = fin.x;
            r.objective = fin.objective_value;
            r.residual = residual(mf, fin.x);
            r.inputs = reconstruct_inputs(sys, r.witness, horizon);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(r.inputs->final_state[i] - p[i]));
            r.replay_error = err;
        } else {
            auto inf = solve(LPProblem<double>{Vector(minf.cols(), 1.0), minf, p}, opt);
            if (inf.status == LPStatus::optimal) {
                r.status = TargetStatus::almost_controllable;
                r.witness = inf.x;
                r.objective = inf.objective_value;
                r.residual = residual(minf, inf.x);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// Tolerance a replayed input sequence must meet for target p.
inline double replay_tolerance(const Tolerances& tol, const Vector& p) { return tol.sim * (1.0 + norm_inf(p)); }

struct AnalysisOptions {
    std::size_t k_max = 0;  // 0 selects default_k_max(n)
};

struct ControllabilityReport {
    std::size_t k_max = 0;
    LimitCone limit;
    std::optional<PolyhedralityVerdict> conset_f;
    std::optional<PolyhedralityVerdict> conset_inf;
    std::optional<GeneratorCone> special;
    std::vector<double> limit_residuals;
    bool c_lim_in_v_f = false;
};

/**
 * Structure, limit cone, both polyhedrality verdicts and the special case.
 * A rank-deficient conmat_n is accepted only when the special case applies;
 * verdicts are then omitted.
 */
inline ControllabilityReport analyze(const SystemSI& sys, const AnalysisOptions& opt = {}) {
    ControllabilityReport rep;
    rep.k_max = opt.k_max ? opt.k_max : default_k_max(sys.dim());
    rep.limit = limit_cone(sys);
    rep.limit_residuals = limit_identity_residuals(sys, rep.limit);
    rep.c_lim_in_v_f = includes(rep.limit.v_f, rep.limit.c_lim, sys.tol());
    rep.special = special_case(sys, rep.limit);
    if (!sys.full_rank()) {
        if (!rep.special) throw RankDeficientSystem(sys.conmat_rank(), sys.dim());
        return rep;
    }
    rep.conset_f = polyhedral_fin(sys, rep.k_max, &rep.limit);
    rep.conset_inf = polyhedral_inf(sys, rep.limit, rep.k_max);
    return rep;
}

/// Horizon for target checks: k_vert when the finite subset is polyhedral, else the fallback.
inline std::size_t target_horizon(const SystemSI& sys, const ControllabilityReport& rep, std::size_t fallback) {
    if (rep.conset_f && rep.conset_f->polyhedral && rep.conset_f->k_vert) return *rep.conset_f->k_vert;
    if (!rep.conset_f && rep.special) return sys.h();
    return fallback;
}

}  // namespace poscon
