#include "haarlaw/io.hpp"

#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using namespace haarlaw;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::filesystem::path scratch_dir() {
    static const auto dir = [] {
        auto p = std::filesystem::temp_directory_path() /
                 ("haarlaw_cli_" + std::to_string(::getpid()));
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    static int n = 0;
    const std::string outfile = (scratch_dir() / ("out" + std::to_string(n++))).string();
    const std::string cmd =
        std::string(HAARLAW_CLI_PATH) + " " + args + " > " + outfile + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(outfile);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, size_t cols) {
    std::vector<std::vector<double>> out(cols);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        for (size_t c = 0; c < cols; ++c) {
            std::getline(ls, cell, ',');
            out[c].push_back(std::stod(cell));
        }
    }
    return out;
}

} // namespace

TEST_CASE("cli: density of the rank-1 projector matches the beta law") {
    const auto r = run_cli("density --generate projector --rank 1 --dim 8");
    REQUIRE(r.exit_code == 0);
    const auto cols = parse_csv(r.out, 2);
    REQUIRE(cols[0].size() == 1001);
    for (size_t i = 0; i < cols[0].size(); i += 37) {
        const double x = cols[0][i];
        CHECK(cols[1][i] == Approx(7.0 * std::pow(1.0 - x, 6.0)).epsilon(1e-10));
    }
}

TEST_CASE("cli: moments of the number operator") {
    const auto r = run_cli("moments --generate number-operator --dim 3 --nmax 2");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["routes"]["compact"]["moments"][0] == 2.0);
    CHECK(j["routes"]["permutation"]["moments"][0] == 2.0);
    CHECK(j["routes"].contains("quadrature"));
    CHECK(j["dimension"] == 3);
}

TEST_CASE("cli: identities on degenerate input exit 2") {
    const auto r = run_cli("identities --generate projector --rank 1 --dim 6");
    CHECK(r.exit_code == 2);
    const std::string path = (scratch_dir() / "degenerate.json").string();
    write_spectrum_file(path, generate(SpectrumKind::projector(2), 7));
    CHECK(run_cli("identities --spectrum " + path).exit_code == 2);
    const auto ok = run_cli("identities --generate number-operator --dim 6");
    REQUIRE(ok.exit_code == 0);
    const json j = json::parse(ok.out);
    CHECK(j["max_abs_deviation"].get<double>() < 1e-9);
}

TEST_CASE("cli: byte-identical output for identical argv") {
    const std::string args = "cdf --generate log --dim 9 --grid 0.1:2.0:101";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli: sample then kstest round trip") {
    const std::string csv = (scratch_dir() / "draws.csv").string();
    const auto s = run_cli("sample --generate projector --rank 1 --dim 4 --samples 20000 "
                           "--seed 12345 --out " + csv);
    REQUIRE(s.exit_code == 0);
    REQUIRE(std::filesystem::exists(csv));
    REQUIRE(std::filesystem::exists(csv + ".json"));
    const auto k = run_cli("kstest --input " + csv);
    REQUIRE(k.exit_code == 0);
    const json j = json::parse(k.out);
    CHECK(j["N"] == 20000);
    CHECK(j["accepts_1pct"] == true);
    CHECK(j["scaled_statistic"].get<double>() < kKsCritical1Percent);
}

TEST_CASE("cli: kstest with inline generation") {
    const auto k = run_cli("kstest --generate number-operator --dim 5 --samples 10000 "
                           "--seed 77");
    REQUIRE(k.exit_code == 0);
    CHECK(json::parse(k.out)["accepts_1pct"] == true);
}

TEST_CASE("cli: levy report on projector and number operator") {
    const auto r = run_cli("levy --generate projector --rank 1 --dim 32");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["eta"] == 2.0);
    CHECK(j["dominance_violations"].empty());
    const auto n = run_cli("levy --generate number-operator --dim 50 --grid 1:10:19");
    REQUIRE(n.exit_code == 0);
    const json nj = json::parse(n.out);
    CHECK(nj.contains("fitted_C"));
    CHECK(nj["reference_C"] == 0.25);
}

TEST_CASE("cli: fig1 and fig2 emit plot-ready grids") {
    const auto f1 = run_cli("fig1 --dims 3,5");
    REQUIRE(f1.exit_code == 0);
    CHECK(f1.out.rfind("d,x,density\n", 0) == 0);
    const auto cols = parse_csv(f1.out, 3);
    CHECK(cols[0].size() == 2 * 1001);
    for (double p : cols[2]) CHECK(p >= 0.0);

    const auto f2 = run_cli("fig2 --dims 4,8 --grid-points 41");
    REQUIRE(f2.exit_code == 0);
    CHECK(f2.out.rfind("kind,d,z,pz,normal\n", 0) == 0);
}

TEST_CASE("cli: clt json report") {
    const auto r = run_cli("clt --kind log --dims 8,16,32 --grid-points 0 --format json");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["kind"] == "log");
    CHECK(j["points"].size() == 3);
    CHECK(j.contains("kappa3z_slope"));
}

TEST_CASE("cli: charfn modulus stays inside the unit disk") {
    const auto r = run_cli("charfn --generate number-operator --dim 6 --grid -10:10:201");
    REQUIRE(r.exit_code == 0);
    const auto cols = parse_csv(r.out, 3);
    for (size_t i = 0; i < cols[0].size(); ++i)
        CHECK(std::hypot(cols[1][i], cols[2][i]) <= 1.0 + 1e-12);
}

TEST_CASE("cli: spectrum files feed every subcommand") {
    const std::string path = (scratch_dir() / "spectrum.json").string();
    write_spectrum_file(path, build_spectrum({0.0, 0.5, 2.0}));
    const auto r = run_cli("density --spectrum " + path + " --grid 0:2:11");
    REQUIRE(r.exit_code == 0);
    CHECK(parse_csv(r.out, 2)[0].size() == 11);
}

TEST_CASE("cli: invalid input exits 2") {
    CHECK(run_cli("density").exit_code == 2);                       // no spectrum source
    CHECK(run_cli("nonsense").exit_code == 2);                      // unknown subcommand
    CHECK(run_cli("density --generate warp --dim 4").exit_code == 2);
    CHECK(run_cli("density --generate log --dim 4 --grid bad").exit_code == 2);
    CHECK(run_cli("density --spectrum /nonexistent.json").exit_code == 2);
    CHECK(run_cli("sample --generate log --dim 4 --samples 10 --seed 1").exit_code == 2);
    CHECK(run_cli("density --generate log --dim 4 --out /nonexistent-dir/x.csv").exit_code ==
          2);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli: pinned precision that cannot deliver exits 3") {
    const auto r =
        run_cli("density --generate projector --rank 1 --dim 50 --precision fast");
    CHECK(r.exit_code == 3);
    const auto ok =
        run_cli("density --generate projector --rank 1 --dim 50 --precision high:2048");
    CHECK(ok.exit_code == 0);
}
