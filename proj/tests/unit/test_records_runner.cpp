#include "carlab/errors.hpp"
#include "carlab/records.hpp"
#include "carlab/runner.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <sys/wait.h>

using namespace carlab;
namespace fs = std::filesystem;

namespace {

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("carlab-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

RunConfig config(const std::string& cmd, const fs::path& dir) {
    RunConfig c;
    c.command = cmd;
    c.output_dir = dir.string();
    return c;
}

}  // namespace

TEST_SUITE("records") {

TEST_CASE("exponent fractions") {
    CHECK(exponent_fraction(R(3, 4)) == std::pair<std::int64_t, std::int64_t>{4, 3});
    CHECK(exponent_fraction(R(0)) == std::pair<std::int64_t, std::int64_t>{1, 0});
    CHECK(reciprocal_of(1, 0) == R(0));
    CHECK(reciprocal_of(4, 3) == R(3, 4));
}

TEST_CASE("sweep CSV round trip") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> num(0, 12);
    std::uniform_real_distribution<double> u(1e-6, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SweepRecord> rows;
        for (int i = 0; i < 1 + trial % 7; ++i) {
            SweepRecord r;
            r.family = trial % 2 ? "knapp-laplace" : "radial-focus";
            r.symbol = "imag-part";
            r.d = 2 + trial % 2;
            const int a = num(rng);
            r.point = {R(a + 1, 13), R(a % 5, 13)};
            r.eps = std::exp2(-(3 + i));
            r.ratio = u(rng);
            r.predicted_exp = u(rng) - 5.0;
            r.grid = "64x64 half-widths 12.5x3.1";
            rows.push_back(r);
        }
        std::stringstream ss;
        write_sweep_csv(ss, rows);
        CHECK(ss.str().rfind("# schema=1\nfamily,symbol,d,p_num,p_den,q_num,q_den,eps,ratio,predicted_exp,grid\n", 0) == 0);
        const auto back = read_sweep_csv(ss);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(back[i].family == rows[i].family);
            CHECK(back[i].d == rows[i].d);
            CHECK(back[i].point == rows[i].point);
            CHECK(back[i].eps == rows[i].eps);
            CHECK(back[i].ratio == rows[i].ratio);
            CHECK(back[i].predicted_exp == rows[i].predicted_exp);
            CHECK(back[i].grid == rows[i].grid);
        }
    }
}

TEST_CASE("malformed CSV is rejected") {
    std::stringstream no_schema("family,symbol\nx,y\n");
    CHECK_THROWS_AS(read_sweep_csv(no_schema), IoError);
    std::stringstream short_row(
        "# schema=1\nfamily,symbol,d,p_num,p_den,q_num,q_den,eps,ratio,predicted_exp,grid\nknapp,imag,2,4\n");
    CHECK_THROWS_AS(read_sweep_csv(short_row), IoError);
    std::stringstream bad_number(
        "# schema=1\nfamily,symbol,d,p_num,p_den,q_num,q_den,eps,ratio,predicted_exp,grid\nk,s,2,4,3,4,1,abc,1,0,g\n");
    CHECK_THROWS_AS(read_sweep_csv(bad_number), IoError);
}

TEST_CASE("operator CSV and generic tables round trip") {
    OperatorReport r;
    r.symbol = "dyadic-piece";
    r.d = 3;
    r.eps = 0.125;
    r.k = 2;
    r.p = 4.0 / 3;
    r.q = kInfinity;
    r.in_norm = 0.1 + 0.2;
    r.out_norm = 1e-300;
    r.ratio = r.out_norm / r.in_norm;
    r.grid = "g";
    std::stringstream ss;
    write_operator_csv(ss, {r});
    const auto back = read_operator_csv(ss);
    REQUIRE(back.size() == 1);
    CHECK(back[0].p == r.p);
    CHECK(back[0].q == kInfinity);
    CHECK(back[0].in_norm == r.in_norm);
    CHECK(back[0].out_norm == r.out_norm);

    Table t{{"a", "b"}, {{"1", "x"}, {"2", "y"}}};
    std::stringstream ts;
    write_table(ts, t);
    const Table tb = read_table(ts);
    CHECK(tb.header == t.header);
    CHECK(tb.rows == t.rows);
}

TEST_CASE("slope and ranges JSON") {
    std::vector<SweepRecord> rows(4);
    for (int i = 0; i < 4; ++i) {
        rows[i].family = "knapp-laplace";
        rows[i].symbol = "imag-part";
        rows[i].d = 2;
        rows[i].point = {R(3, 4), R(1, 4)};
        rows[i].eps = std::exp2(-(3 + i));
        rows[i].ratio = 1.0;
    }
    const nlohmann::json j = slope_json(rows, fit_slope(rows), 0.15);
    CHECK(j["schema"] == 1);
    CHECK(j["pass"] == true);
    const nlohmann::json g = ranges_json(3);
    CHECK(g["schema"] == 1);
    bool found = false;
    for (const auto& v : g["vertices"])
        if (v["label"] == "S") {
            found = true;
            CHECK(v["x"] == "11/20");
            CHECK(v["y"] == "3/20");
        }
    CHECK(found);
    CHECK(!g["segments"].empty());
}

}

TEST_SUITE("runner") {

TEST_CASE("eps ladders") {
    const auto l = parse_eps_ladder("2^-3..2^-8");
    REQUIRE(l.size() == 6);
    CHECK(l.front() == 0.125);
    CHECK(l.back() == std::exp2(-8));
    const auto m = parse_eps_ladder("0.25,2^-4,0.03125");
    CHECK(m == std::vector<double>{0.25, 0.0625, 0.03125});
    CHECK_THROWS_AS(parse_eps_ladder("2^-3..x"), ContractViolation);
    CHECK_THROWS_AS(parse_eps_ladder(""), ContractViolation);
}

TEST_CASE("validation names the offending field") {
    RunConfig c = config("sweep-laplace", fs::temp_directory_path());
    c.d = 7;
    try {
        validate(c);
        FAIL("expected a contract violation");
    } catch (const ContractViolation& e) {
        CHECK(std::string(e.what()).find("d") != std::string::npos);
    }
    c.d = 2;
    c.eps = {0.5, 0.25};
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("eps"), ContractViolation);
    c.eps = {0.5, 0.25, 0.125, 1.0 / 1024};
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("eps"), ContractViolation);
    c.eps.clear();
    c.family = "radial";
    c.d = 3;
    c.delta = 0.5;
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("delta"), ContractViolation);
    RunConfig bad = config("frobnicate", fs::temp_directory_path());
    CHECK_THROWS_AS(validate(bad), ContractViolation);
}

TEST_CASE("config JSON round trip") {
    RunConfig c = config("sweep-heat", "/tmp/x");
    c.d = 1;
    c.eps = {0.125, 0.0625, 0.03125, 0.015625};
    c.point = ExponentPoint{R(1, 2), R(0)};
    c.seed = 99;
    c.grids = {512, 1024};
    const RunConfig back = config_from_json(to_json(c));
    CHECK(back.command == c.command);
    CHECK(back.eps == c.eps);
    CHECK(back.point == c.point);
    CHECK(back.seed == 99);
    CHECK(back.grids == c.grids);
    CHECK(to_json(back) == to_json(c));
}

TEST_CASE("ranges command") {
    const fs::path dir = fresh_dir("ranges");
    RunConfig c = config("ranges", dir);
    c.d = 3;
    c.theorem = "carleman-laplace";
    c.point = ExponentPoint{R(5, 6), R(1, 6)};
    std::stringstream log;
    const RunResult r = run(c, log);
    CHECK(r.exit_code == kExitPass);
    CHECK(log.str().find("admissible: true") != std::string::npos);
    CHECK(fs::exists(dir / "ranges-d3.json"));
    const auto j = nlohmann::json::parse(slurp(dir / "ranges-d3.json"));
    CHECK(j["schema"] == 1);
}

TEST_CASE("sweep command is deterministic and gated") {
    const fs::path a = fresh_dir("sweep-a"), b = fresh_dir("sweep-b");
    std::stringstream log;
    RunConfig c = config("sweep-laplace", a);
    c.d = 2;
    c.jobs = 2;
    const RunResult r1 = run(c, log);
    c.output_dir = b.string();
    c.jobs = 1;
    const RunResult r2 = run(c, log);
    CHECK(r1.exit_code == kExitPass);
    CHECK(r2.exit_code == kExitPass);
    const std::string csv = "sweep-laplace-knapp-d2.csv";
    CHECK(slurp(a / csv) == slurp(b / csv));
    std::ifstream is(a / csv);
    CHECK(read_sweep_csv(is).size() == 6);
    const auto j = nlohmann::json::parse(slurp(a / "sweep-laplace-knapp-d2.json"));
    CHECK(std::abs(j["slope"].get<double>()) <= kSlopeTolerance);
    CHECK(j["profile"].size() == 6);

    const nlohmann::json rep = emit_report(a.string());
    CHECK(rep["entries"].size() == 1);
    CHECK(rep["pass"] == true);
}

TEST_CASE("delta-limit and extension-kernel commands") {
    const fs::path dir = fresh_dir("misc");
    std::stringstream log;
    CHECK(run(config("delta-limit", dir), log).exit_code == kExitPass);
    RunConfig e = config("extension-kernel", dir);
    e.sphere_dim = 2;
    CHECK(run(e, log).exit_code == kExitPass);
    CHECK(fs::exists(dir / "delta-limit.csv"));
    CHECK(fs::exists(dir / "extension-kernel-m2.csv"));
    const nlohmann::json rep = emit_report(dir.string());
    CHECK(rep["entries"].size() == 2);
}

TEST_CASE("report errors") {
    const fs::path empty = fresh_dir("empty");
    CHECK_THROWS_AS(emit_report(empty.string()), IoError);
    std::ofstream(empty / "broken.json") << "{ not json";
    CHECK_THROWS_AS(emit_report(empty.string()), IoError);
    std::stringstream err;
    CHECK(report_error(IoError("x"), err) == kExitUsage);
    CHECK(report_error(ContractViolation("x"), err) == kExitUsage);
    CHECK(report_error(ResolutionError("x"), err) == kExitFail);
    CHECK(err.str().find("error: io") != std::string::npos);
}

TEST_CASE("output directory resolution") {
    RunConfig c;
    c.output_dir = "/a";
    CHECK(resolve_output_dir(c) == "/a");
    c.output_dir.clear();
    setenv("CARLAB_OUTPUT_DIR", "/b", 1);
    CHECK(resolve_output_dir(c) == "/b");
    unsetenv("CARLAB_OUTPUT_DIR");
    CHECK(resolve_output_dir(c) == ".");
}

TEST_CASE("CLI exit codes") {
    const fs::path dir = fresh_dir("cli");
    const std::string cli = CARLAB_CLI_PATH;
    auto code = [&](const std::string& args) {
        const int status = std::system((cli + " --out " + dir.string() + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(code("ranges --d 3 --theorem carleman-laplace --point 5/6,1/6") == 0);
    CHECK(code("sweep-laplace --d 7") == 2);
    CHECK(code("ranges --theorem nope") == 2);
    CHECK(code("no-such-command") == 2);
    CHECK(code("report --dir " + (dir / "missing").string()) == 2);
}

}
