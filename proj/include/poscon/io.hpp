#pragma once

// System description files (JSON, "schema": 1) and canonical JSON reports.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "controllability.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "spectral.hpp"
#include "tolerances.hpp"

namespace poscon::io {

using json = nlohmann::json;

inline constexpr const char* tool_version = "1.0.0";
inline constexpr int schema_version = 1;

class ParseError : public InputError {
public:
    explicit ParseError(const std::string& what) : InputError("cli.ParseError", what) {}
};

class SchemaError : public InputError {
public:
    explicit SchemaError(const std::string& what) : InputError("cli.Schema", what) {}
};

struct TargetSet {
    TargetKind kind = TargetKind::polytope;
    std::string name;
    std::vector<Vector> vertices;
};

struct SpecOptions {
    std::optional<std::size_t> k_max;
    std::optional<std::size_t> horizon;
};

struct SystemSpec {
    std::string name;
    Matrix a;
    Vector b;
    std::vector<TargetSet> targets;
    SpecOptions options;
    Tolerances tol;
};

// ---------------------------------------------------------------- reading

namespace detail {

inline double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(where + " must be finite");
    return v;
}

inline Vector vector_at(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw SchemaError(where + " must be a nonempty array of numbers");
    Vector v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number_at(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

inline Matrix matrix_at(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw SchemaError(where + " must be a nonempty array of rows");
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(vector_at(j[i], where + "[" + std::to_string(i) + "]"));
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw SchemaError(where + " is ragged");
        for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
    }
    return m;
}

inline std::size_t count_at(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 1) throw SchemaError(where + " must be a positive integer");
    return static_cast<std::size_t>(j.get<long long>());
}

inline void read_tolerances(const json& j, Tolerances& t) {
    if (!j.is_object()) throw SchemaError("options.tolerances must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const std::string where = "options.tolerances." + k;
        if (k == "zero") t.zero = number_at(*it, where);
        else if (k == "eig") t.eig = number_at(*it, where);
        else if (k == "angle") t.angle = number_at(*it, where);
        else if (k == "q_max") t.q_max = static_cast<int>(count_at(*it, where));
        else if (k == "cluster") t.cluster = number_at(*it, where);
        else if (k == "lp") t.lp = number_at(*it, where);
        else if (k == "lim") t.lim = number_at(*it, where);
        else if (k == "sim") t.sim = number_at(*it, where);
        else if (k == "rank") t.rank = number_at(*it, where);
        else if (k == "coeff") t.coeff = number_at(*it, where);
        else if (k == "recur") t.recur = number_at(*it, where);
        else if (k == "dedup") t.dedup = number_at(*it, where);
        else if (k == "cond_max") t.cond_max = number_at(*it, where);
        else if (k == "enum_cap") t.enum_cap = count_at(*it, where);
        else throw SchemaError("unknown tolerance '" + k + "'");
    }
}

}  // namespace detail

/**
 * Generator rays of the planar cone {x : a1 x1 + a2 x2 >= 0 for every row},
 * intersected with the nonnegative quadrant. Rows are [a1, a2, rhs] with
 * rhs = 0. Returns the extreme rays ordered by angle (one ray when the cone
 * is a half-line, none when it is the origin).
 */
inline std::vector<Vector> halfspace_rays(const std::vector<Vector>& rows, double tol = 1e-12) {
    std::vector<Vector> cand{{1, 0}, {0, 1}};
    for (const Vector& r : rows) {
        if (r.size() != 3) throw SchemaError("halfspace rows must be [a1, a2, rhs]");
        if (r[2] != 0.0) throw SchemaError("halfspace right-hand sides must be 0 (cones only)");
        if (r[0] == 0.0 && r[1] == 0.0) continue;
        cand.push_back({r[1], -r[0]});
        cand.push_back({-r[1], r[0]});
    }
    std::vector<std::pair<double, Vector>> ok;
    for (const Vector& c : cand) {
        if (c[0] < 0.0 || c[1] < 0.0) continue;
        const double scale = std::max(std::abs(c[0]), std::abs(c[1]));
        bool feasible = true;
        for (const Vector& r : rows)
            if (r[0] * c[0] + r[1] * c[1] < -tol * scale * std::max(std::abs(r[0]), std::abs(r[1])))
                feasible = false;
        if (feasible) ok.emplace_back(std::atan2(c[1], c[0]), c);
    }
    if (ok.empty()) return {};
    auto [lo, hi] = std::minmax_element(ok.begin(), ok.end(),
                                        [](const auto& x, const auto& y) { return x.first < y.first; });
    if (hi->first - lo->first <= 1e-15) return {lo->second};
    return {lo->second, hi->second};
}

namespace detail {

inline SystemSpec parse_spec_fields(const json& j) {
    if (!j.is_object()) throw SchemaError("top level must be an object");
    if (!j.contains("schema")) throw SchemaError("missing \"schema\" field");
    if (!j["schema"].is_number_integer() || j["schema"].get<int>() != schema_version)
        throw SchemaError("unsupported schema version (expected 1)");
    static const std::vector<std::string> known{"schema", "name", "A", "b", "targets", "halfspace", "options"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw SchemaError("unknown field '" + it.key() + "'");

    SystemSpec s;
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw SchemaError("name must be a string");
        s.name = j["name"].get<std::string>();
    }
    if (!j.contains("A")) throw SchemaError("missing matrix \"A\"");
    if (!j.contains("b")) throw SchemaError("missing vector \"b\"");
    s.a = detail::matrix_at(j["A"], "A");
    s.b = detail::vector_at(j["b"], "b");
    validate_positive_system(s.a, s.b);
    const std::size_t n = s.a.rows();

    if (j.contains("targets")) {
        if (!j["targets"].is_array()) throw SchemaError("targets must be an array");
        for (std::size_t t = 0; t < j["targets"].size(); ++t) {
            const json& tj = j["targets"][t];
            const std::string where = "targets[" + std::to_string(t) + "]";
            if (!tj.is_object()) throw SchemaError(where + " must be an object");
            TargetSet ts;
            const std::string kind = tj.value("kind", std::string("polytope"));
            if (kind == "cone") ts.kind = TargetKind::cone;
            else if (kind == "polytope") ts.kind = TargetKind::polytope;
            else throw SchemaError(where + ".kind must be \"cone\" or \"polytope\"");
            if (tj.contains("name")) ts.name = tj["name"].get<std::string>();
            if (!tj.contains("vertices") || !tj["vertices"].is_array())
                throw SchemaError(where + ".vertices must be an array");
            for (std::size_t v = 0; v < tj["vertices"].size(); ++v) {
                Vector p = detail::vector_at(tj["vertices"][v], where + ".vertices[" + std::to_string(v) + "]");
                if (p.size() != n) throw SchemaError(where + ".vertices[" + std::to_string(v) + "] has wrong dimension");
                NonnegVector(p, "target");
                ts.vertices.push_back(std::move(p));
            }
            s.targets.push_back(std::move(ts));
        }
    }
    if (j.contains("halfspace")) {
        if (n != 2) throw SchemaError("halfspace targets are supported for n = 2 only");
        const json& hj = j["halfspace"];
        if (!hj.is_object() || !hj.contains("inequalities") || !hj["inequalities"].is_array())
            throw SchemaError("halfspace.inequalities must be an array of [a1, a2, rhs] rows");
        std::vector<Vector> rows;
        for (std::size_t r = 0; r < hj["inequalities"].size(); ++r)
            rows.push_back(detail::vector_at(hj["inequalities"][r], "halfspace.inequalities[" + std::to_string(r) + "]"));
        TargetSet ts;
        ts.kind = TargetKind::cone;
        ts.name = "halfspace";
        ts.vertices = halfspace_rays(rows);
        s.targets.push_back(std::move(ts));
    }
    if (j.contains("options")) {
        const json& oj = j["options"];
        if (!oj.is_object()) throw SchemaError("options must be an object");
        for (auto it = oj.begin(); it != oj.end(); ++it) {
            if (it.key() == "k_max") s.options.k_max = detail::count_at(*it, "options.k_max");
            else if (it.key() == "horizon" || it.key() == "N") s.options.horizon = detail::count_at(*it, "options." + it.key());
            else if (it.key() == "q_max") s.tol.q_max = static_cast<int>(detail::count_at(*it, "options.q_max"));
            else if (it.key() == "tolerances") detail::read_tolerances(*it, s.tol);
            else throw SchemaError("unknown option '" + it.key() + "'");
        }
    }
    return s;
}

}  // namespace detail

inline SystemSpec parse_spec(const json& j) {
    try {
        return detail::parse_spec_fields(j);
    } catch (const json::exception& e) {
        throw SchemaError(e.what());
    }
}

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cli.FileNotFound", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline SystemSpec load_spec(const std::string& path) { return parse_spec(parse_json_text(read_file(path))); }

// ---------------------------------------------------------------- writing

/**
 * Deterministic serialisation: object keys sorted, two-space indent, every
 * floating value as %.17g (integers stay integers). Parsing the output and
 * dumping it again yields the same bytes.
 */
inline void canonical_dump(const json& j, std::string& out, int depth = 0) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close(static_cast<std::size_t>(depth) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            std::vector<std::string> keys;
            for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
            std::sort(keys.begin(), keys.end());
            out += "{\n";
            for (std::size_t i = 0; i < keys.size(); ++i) {
                out += pad + json(keys[i]).dump() + ": ";
                canonical_dump(j.at(keys[i]), out, depth + 1);
                out += i + 1 < keys.size() ? ",\n" : "\n";
            }
            out += close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            bool flat = true;
            for (const auto& e : j) flat &= !e.is_structured();
            if (flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    canonical_dump(j[i], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += pad;
                canonical_dump(j[i], out, depth + 1);
                out += i + 1 < j.size() ? ",\n" : "\n";
            }
            out += close + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

inline std::string canonical_dump(const json& j) {
    std::string out;
    canonical_dump(j, out);
    out += "\n";
    return out;
}

namespace detail {

inline json complex_list(const std::vector<Complex>& zs) {
    json a = json::array();
    for (const Complex& z : zs) a.push_back({z.real(), z.imag()});
    return a;
}

inline json matrix_rows(const Matrix& m) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        a.push_back(r);
    }
    return a;
}

inline json cone_json(const GeneratorCone& c) {
    json a = json::array();
    for (std::size_t j = 0; j < c.size(); ++j) a.push_back({{"label", c.label(j)}, {"vector", c.generator(j)}});
    return a;
}

inline json tolerances_json(const Tolerances& t) {
    return {{"zero", t.zero}, {"eig", t.eig},     {"angle", t.angle}, {"q_max", t.q_max},
            {"cluster", t.cluster}, {"lp", t.lp}, {"lim", t.lim},     {"sim", t.sim},
            {"rank", t.rank}, {"coeff", t.coeff}, {"recur", t.recur}, {"dedup", t.dedup},
            {"cond_max", t.cond_max}, {"enum_cap", t.enum_cap}};
}

inline json certificate_json(const RecursionCertificate& c) {
    json j = {{"holds", c.holds}, {"vacuous", c.vacuous}};
    j["failing_condition"] = c.failing_condition ? json(to_string(*c.failing_condition)) : json(nullptr);
    if (c.degree_nm) {
        j["degree_nm"] = c.degree_nm;
        j["coefficients"] = c.coefficients;
        j["residual"] = c.residual;
    }
    return j;
}

inline json verdict_json(const PolyhedralityVerdict& v) {
    json j = {{"polyhedral", v.polyhedral},
              {"split_mode", to_string(v.mode)},
              {"a2_spectrum", complex_list(v.a2_spectrum)},
              {"spectral_test", certificate_json(v.spectral_test)},
              {"direct_found", v.direct_found},
              {"k_searched", v.k_searched}};
    j["k_vert"] = v.k_vert ? json(*v.k_vert) : json(nullptr);
    j["generators"] = v.generators ? cone_json(*v.generators) : json(nullptr);
    if (v.mode == SplitMode::finite) {
        j["simplicial"] = v.simplicial;
        j["char_poly"] = v.char_poly;
        j["vf_contained"] = v.vf_contained ? json(*v.vf_contained) : json(nullptr);
    }
    return j;
}

inline json agreement_json(const PolyhedralityVerdict& v) {
    return {{"spectral", v.polyhedral}, {"direct", v.direct_found}, {"agree", v.agreement}, {"k_searched", v.k_searched}};
}

}  // namespace detail

/// Everything a CLI run produces; `status` drives the exit code.
struct RunResult {
    std::string status = "ok";  // "ok" or "disagreement"
    std::vector<std::string> messages;
    json report;
};

struct RunOptions {
    std::optional<std::size_t> k_max;
    std::optional<std::size_t> horizon;
    bool check_targets = false;
    std::string source;
};

/**
 * analyze (and optionally check) one system. A Disagreement is caught per
 * verdict, recorded in the report and reflected in `status`; every other error
 * propagates.
 */
inline RunResult run(const SystemSpec& spec, const RunOptions& ro) {
    RunResult out;
    SystemSI sys(spec.a, spec.b, spec.tol);
    const std::size_t n = sys.dim();
    const std::size_t k_max = ro.k_max.value_or(spec.options.k_max.value_or(default_k_max(n)));

    json& r = out.report;
    r["provenance"] = {{"tool", "poscon"},
                       {"version", tool_version},
                       {"schema", schema_version},
                       {"source", ro.source},
                       {"name", spec.name},
                       {"tolerances", detail::tolerances_json(spec.tol)},
                       {"k_max", k_max},
                       {"angle_test", "rational-angle test at resolution Q_max = " + std::to_string(spec.tol.q_max)}};
    r["system"] = {{"n", n}, {"A", detail::matrix_rows(spec.a)}, {"b", spec.b}};
    const StructureInfo& st = sys.structure();
    r["structure"] = {{"irreducible", st.irreducible},
                      {"cyclicity_h", st.cyclicity_h},
                      {"permutation", st.permutation},
                      {"block_sizes", st.block_sizes},
                      {"conmat_rank", sys.conmat_rank()}};
    const SpectralSummary& sp = sys.spectral();
    r["spectral"] = {{"eigenvalues", detail::complex_list(sp.eigenvalues)},
                     {"rho", sp.rho},
                     {"h", sp.h},
                     {"dominant", detail::complex_list(sp.dominant)},
                     {"nondominant", detail::complex_list(sp.nondominant)}};

    ControllabilityReport rep;
    rep.k_max = k_max;
    rep.limit = limit_cone(sys);
    rep.limit_residuals = limit_identity_residuals(sys, rep.limit);
    rep.c_lim_in_v_f = includes(rep.limit.v_f, rep.limit.c_lim, sys.tol());
    rep.special = special_case(sys, rep.limit);
    r["limit"] = {{"c_lim", detail::cone_json(rep.limit.c_lim)},
                  {"v_f", detail::cone_json(rep.limit.v_f)},
                  {"residuals", rep.limit_residuals},
                  {"c_lim_in_v_f", rep.c_lim_in_v_f},
                  {"squarings", rep.limit.squarings}};
    r["special_case"] = rep.special ? detail::cone_json(*rep.special) : json(nullptr);

    r["conset_f"] = nullptr;
    r["conset_inf"] = nullptr;
    r["method_agreement"] = json::object();
    r["recursion"] = nullptr;
    if (!sys.full_rank()) {
        if (!rep.special) throw RankDeficientSystem(sys.conmat_rank(), n);
        out.messages.push_back("controllability matrix is rank deficient; only the special-case cone is reported");
    } else {
        auto record = [&](const char* key, auto&& compute) {
            PolyhedralityVerdict v;
            bool thrown = false;
            try {
                v = compute();
            } catch (const Disagreement& d) {
                v = d.verdict();
                thrown = true;
                out.status = "disagreement";
                out.messages.push_back(d.code() + ": " + d.what());
            }
            if (!v.agreement && !thrown) {
                // direct membership found although the spectral test says no
                out.status = "disagreement";
                out.messages.push_back(std::string("controllability.Disagreement: ") + key +
                                       " direct iteration found a vertex number the spectral test rules out");
            }
            r[key] = detail::verdict_json(v);
            r["method_agreement"][key] = detail::agreement_json(v);
            return v;
        };
        PolyhedralityVerdict fin = record("conset_f", [&] { return polyhedral_fin(sys, k_max, &rep.limit); });
        record("conset_inf", [&] { return polyhedral_inf(sys, rep.limit, k_max); });
        if (fin.polyhedral && fin.direct_found) {
            rep.conset_f = fin;
            try {
                r["recursion"] = detail::certificate_json(nonneg_recursion_coeffs(sys.a(), k_max, sys.tol()));
            } catch (const BudgetExceeded& e) {
                out.messages.push_back(e.code() + ": " + e.what());
            }
        }
    }

    if (ro.check_targets) {
        const std::size_t horizon =
            ro.horizon.value_or(spec.options.horizon.value_or(target_horizon(sys, rep, 10 * n)));
        r["horizon"] = horizon;
        json targets = json::array();
        for (const TargetSet& ts : spec.targets) {
            json tj = {{"kind", to_string(ts.kind)}, {"name", ts.name}};
            json verts = json::array();
            for (const TargetResult& tr : check_target(sys, rep.limit, ts.vertices, horizon)) {
                json vj = {{"point", tr.target},
                           {"status", to_string(tr.status)},
                           {"horizon", tr.horizon},
                           {"witness", tr.witness},
                           {"objective", tr.objective},
                           {"residual", tr.residual}};
                if (tr.inputs) {
                    vj["inputs"] = tr.inputs->u;
                    vj["final_state"] = tr.inputs->final_state;
                    vj["replay_error"] = tr.replay_error;
                    vj["replay_ok"] = tr.replay_error <= replay_tolerance(sys.tol(), tr.target);
                } else {
                    vj["inputs"] = nullptr;
                }
                verts.push_back(vj);
            }
            tj["vertices"] = verts;
            targets.push_back(tj);
        }
        r["targets"] = targets;
    }
    r["status"] = out.status;
    return out;
}

}  // namespace poscon::io
