#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
namespace ts = testing_support;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("poscon_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run_cli(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    const std::string cmd = std::string(POSCON_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

}  // namespace

TEST_CASE("analyze succeeds on the shipped systems") {
    for (const char* f : {"ex0.json", "ex1.json", "ex2.json", "ex3.json", "ex4.json"}) {
        auto r = run_cli("analyze " + ts::data_file(f));
        CHECK(r.code == 0);
        CHECK(r.err.empty());
    }
    auto r = run_cli("analyze " + ts::data_file("ex3.json"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("Conset_f: polyhedral, k_vert = 6"));
}

TEST_CASE("json report is canonical") {
    const fs::path out = scratch() / "ex3.report.json";
    REQUIRE(run_cli("analyze " + ts::data_file("ex3.json") + " --k-max 12 --json " + out.string()).code == 0);
    const std::string text = slurp(out);
    auto j = nlohmann::json::parse(text);
    CHECK(j["provenance"]["k_max"] == 12);
    CHECK(j["conset_f"]["k_vert"] == 6);
    CHECK(j["provenance"]["tolerances"].contains("lp"));
}

TEST_CASE("tolerance flags reach the report") {
    const fs::path out = scratch() / "tol.json";
    REQUIRE(run_cli("analyze " + ts::data_file("ex1.json") + " --tol-lp 1e-8 --q-max 30 --json " + out.string()).code == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["provenance"]["tolerances"]["lp"].get<double>() == 1e-8);
    CHECK(j["provenance"]["tolerances"]["q_max"] == 30);
}

TEST_CASE("check reports target status") {
    auto r = run_cli("check " + ts::data_file("ex4.json"));
    CHECK(r.code == 0);
    std::size_t hits = 0;
    for (std::size_t p = r.out.find("controllable_finite"); p != std::string::npos; p = r.out.find("controllable_finite", p + 1))
        ++hits;
    CHECK(hits == 4);
    r = run_cli("check " + ts::data_file("ex0.json") + " --horizon 2");
    CHECK(r.code == 0);
}

TEST_CASE("input errors exit with 2 and a qualified code") {
    auto r = run_cli("analyze " + write("broken.json", "{\"schema\": 1, \"A\": [[1, 2],\n").string());
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::StartsWith("cli.ParseError"));
    CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("line 2"));

    r = run_cli("analyze " + write("neg.json", R"({"schema": 1, "A": [[0, -1], [1, 0]], "b": [1, 0]})").string());
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::StartsWith("posmat.NegativeEntry"));

    r = run_cli("check " + write("negt.json", R"({"schema": 1, "A": [[0, 1], [1, 0]], "b": [1, 0],
        "targets": [{"kind": "cone", "vertices": [[1, -1]]}]})").string());
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::StartsWith("posmat.NegativeEntry"));

    r = run_cli("analyze " + write("red.json", R"({"schema": 1, "A": [[1, 1], [0, 1]], "b": [1, 0]})").string());
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::StartsWith("posmat.Reducible"));

    r = run_cli("analyze " + (scratch() / "missing.json").string());
    CHECK(r.code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("analyze").code == 2);
}

TEST_CASE("plot writes csv and svg") {
    const fs::path dir = scratch() / "plots";
    auto r = run_cli("plot " + ts::data_file("ex1.json") + " --k 3,8,19 --format svg --out " + dir.string());
    CHECK(r.code == 0);
    CHECK_THAT(slurp(dir / "ex1.svg"), Catch::Matchers::ContainsSubstring("<svg"));
    r = run_cli("plot " + ts::data_file("ex3.json") + " --k 1,2 --format csv --out " + dir.string());
    CHECK(r.code == 0);
    CHECK_THAT(slurp(dir / "ex3.csv"), Catch::Matchers::StartsWith("k,generator_index,coord_1,coord_2,coord_3,coord_4,label"));
    r = run_cli("plot " + ts::data_file("ex3.json") + " --k 3 --format svg --out " + dir.string());
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::StartsWith("cli.SvgUnsupportedDim"));
    CHECK(run_cli("plot " + ts::data_file("ex1.json") + " --k 3 --format png --out " + dir.string()).code == 2);
}

TEST_CASE("a direct search cut short disagrees with the spectral test") {
    const fs::path out = scratch() / "short.json";
    auto r = run_cli("analyze " + ts::data_file("ex3.json") + " --k-max 3 --json " + out.string());
    CHECK(r.code == 3);
    CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("controllability.Disagreement"));
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["status"] == "disagreement");
    CHECK(j["method_agreement"]["conset_f"]["agree"] == false);
}
