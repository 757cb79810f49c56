// poscon: polyhedrality and target controllability for single-input positive systems.
//
//   poscon analyze <file> [--k-max N] [--json out.json]
//   poscon check   <file> [--horizon N] [--json out.json]
//   poscon plot    <file> --k 3,8,19 --format csv|svg --out dir/
//
// Exit codes: 0 ok, 1 numerical failure, 2 input error, 3 disagreement between
// the spectral and the direct polyhedrality tests.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "poscon/io.hpp"
#include "poscon/plot.hpp"

namespace {

using poscon::io::json;

struct ToleranceFlags {
    std::optional<double> zero, eig, angle, cluster, lp, lim, sim, rank, coeff, recur, dedup, cond_max;
    std::optional<int> q_max;
    std::optional<std::size_t> enum_cap;

    void attach(CLI::App* app) {
        const poscon::Tolerances d;
        auto add = [&](const char* name, auto& slot, auto def, const char* help) {
            app->add_option(name, slot, std::string(help) + " (default " + std::to_string(def) + ")");
        };
        add("--tol-zero", zero, d.zero, "structural zero");
        add("--tol-eig", eig, d.eig, "eigenvalue equality");
        add("--tol-angle", angle, d.angle, "angle classification");
        add("--q-max", q_max, d.q_max, "rational-angle denominator cap");
        add("--tol-cluster", cluster, d.cluster, "eigenvalue clustering");
        add("--tol-lp", lp, d.lp, "LP feasibility");
        add("--tol-lim", lim, d.lim, "limit convergence");
        add("--tol-sim", sim, d.sim, "input replay");
        add("--tol-rank", rank, d.rank, "numerical rank");
        add("--tol-coeff", coeff, d.coeff, "characteristic polynomial signs");
        add("--tol-recur", recur, d.recur, "recursion residual");
        add("--tol-dedup", dedup, d.dedup, "generator deduplication");
        add("--cond-max", cond_max, d.cond_max, "enumeration conditioning cap");
        add("--enum-cap", enum_cap, d.enum_cap, "enumeration subset cap");
    }

    void apply(poscon::Tolerances& t) const {
        if (zero) t.zero = *zero;
        if (eig) t.eig = *eig;
        if (angle) t.angle = *angle;
        if (q_max) t.q_max = *q_max;
        if (cluster) t.cluster = *cluster;
        if (lp) t.lp = *lp;
        if (lim) t.lim = *lim;
        if (sim) t.sim = *sim;
        if (rank) t.rank = *rank;
        if (coeff) t.coeff = *coeff;
        if (recur) t.recur = *recur;
        if (dedup) t.dedup = *dedup;
        if (cond_max) t.cond_max = *cond_max;
        if (enum_cap) t.enum_cap = *enum_cap;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string complex_text(const json& z) {
    const double re = z[0].get<double>(), im = z[1].get<double>();
    if (std::abs(im) <= 1e-12 * std::max(1.0, std::abs(re))) return fmt(re);
    return fmt(re) + (im < 0 ? " - " : " + ") + fmt(std::abs(im)) + "i";
}

void print_verdict(std::ostream& os, const char* title, const json& v) {
    if (v.is_null()) return;
    os << title << ": " << (v["polyhedral"].get<bool>() ? "polyhedral" : "not polyhedral");
    if (!v["k_vert"].is_null()) os << ", k_vert = " << v["k_vert"].get<std::size_t>();
    const json& st = v["spectral_test"];
    if (!st["failing_condition"].is_null()) os << ", fails " << st["failing_condition"].get<std::string>();
    if (v.contains("simplicial") && v["polyhedral"].get<bool>() && v["simplicial"].get<bool>()) os << ", simplicial";
    os << "\n";
    if (!v["generators"].is_null())
        for (const json& g : v["generators"]) {
            os << "  " << g["label"].get<std::string>() << " = (";
            for (std::size_t i = 0; i < g["vector"].size(); ++i) os << (i ? ", " : "") << fmt(g["vector"][i].get<double>());
            os << ")\n";
        }
}

void print_summary(std::ostream& os, const poscon::io::RunResult& res) {
    const json& r = res.report;
    os << "n = " << r["system"]["n"].get<std::size_t>() << ", h = " << r["structure"]["cyclicity_h"].get<std::size_t>()
       << ", rho = " << fmt(r["spectral"]["rho"].get<double>()) << "\n";
    os << "spectrum:";
    for (const json& z : r["spectral"]["eigenvalues"]) os << "  " << complex_text(z);
    os << "\n";
    print_verdict(os, "Conset_f", r["conset_f"]);
    print_verdict(os, "Conset_inf", r["conset_inf"]);
    if (!r["special_case"].is_null()) os << "special case: closure is cone(v_f)\n";
    if (r.contains("targets")) {
        os << "targets (N = " << r["horizon"].get<std::size_t>() << "):\n";
        for (const json& t : r["targets"]) {
            for (std::size_t v = 0; v < t["vertices"].size(); ++v) {
                const json& tv = t["vertices"][v];
                os << "  " << t["kind"].get<std::string>() << (t["name"].get<std::string>().empty() ? "" : " " + t["name"].get<std::string>())
                   << " #" << v << ": " << tv["status"].get<std::string>();
                if (tv["status"] != "not_controllable") os << ", total input " << fmt(tv["objective"].get<double>());
                os << "\n";
            }
        }
    }
    for (const std::string& m : res.messages) os << "note: " << m << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw poscon::InputError("cli.Write", "cannot write " + path);
    out << text;
}

int exit_code(const std::string& status) { return status == "disagreement" ? 3 : 0; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polyhedrality of controllable sets of positive linear systems"};
    app.require_subcommand(1);

    std::string file, json_out, out_dir, format = "csv";
    std::optional<std::size_t> k_max, horizon;
    std::vector<std::size_t> ks;
    ToleranceFlags tf;

    auto* analyze = app.add_subcommand("analyze", "structure, spectrum and polyhedrality verdicts");
    analyze->add_option("file", file, "system description (JSON, schema 1)")->required();
    analyze->add_option("--k-max", k_max, "degree budget for power searches");
    analyze->add_option("--json", json_out, "write the report here");
    tf.attach(analyze);

    auto* check = app.add_subcommand("check", "analyze, then check every declared target");
    check->add_option("file", file, "system description (JSON, schema 1)")->required();
    check->add_option("--horizon,-N", horizon, "number of steps");
    check->add_option("--k-max", k_max, "degree budget for power searches");
    check->add_option("--json", json_out, "write the report here");
    tf.attach(check);

    auto* plot = app.add_subcommand("plot", "simplex projections of conmat_k");
    plot->add_option("file", file, "system description (JSON, schema 1)")->required();
    plot->add_option("--k", ks, "comma-separated k values")->delimiter(',')->required();
    plot->add_option("--format", format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
    plot->add_option("--out", out_dir, "output directory")->required();
    tf.attach(plot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        poscon::io::SystemSpec spec = poscon::io::load_spec(file);
        tf.apply(spec.tol);

        if (plot->parsed()) {
            poscon::SystemSI sys(spec.a, spec.b, spec.tol);
            const auto data = poscon::plot::collect(sys, poscon::limit_cone(sys), ks);
            const std::string text = format == "svg" ? poscon::plot::to_svg(data) : poscon::plot::to_csv(data);
            std::filesystem::create_directories(out_dir);
            const auto path = std::filesystem::path(out_dir) / (std::filesystem::path(file).stem().string() + "." + format);
            write_text(path.string(), text);
            std::cout << path.string() << "\n";
            return 0;
        }

        poscon::io::RunOptions ro;
        ro.k_max = k_max;
        ro.horizon = horizon;
        ro.check_targets = check->parsed();
        ro.source = std::filesystem::path(file).filename().string();
        const auto res = poscon::io::run(spec, ro);
        print_summary(std::cout, res);
        if (!json_out.empty()) write_text(json_out, poscon::io::canonical_dump(res.report));
        if (res.status == "disagreement") std::cerr << "controllability.Disagreement: spectral and direct tests disagree\n";
        return exit_code(res.status);
    } catch (const poscon::InputError& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 2;
    } catch (const poscon::Error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "cli.Internal: " << e.what() << "\n";
        return 1;
    }
}
