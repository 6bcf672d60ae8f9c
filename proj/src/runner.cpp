#include "carlab/runner.hpp"

#include "carlab/errors.hpp"
#include "carlab/kelvin.hpp"
#include "carlab/operators.hpp"
#include "carlab/records.hpp"
#include "carlab/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace carlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kCommands{"ranges",      "sweep-laplace",    "sweep-heat", "sweep-dirac",
                                      "check-kelvin", "extension-kernel", "delta-limit", "report"};

double parse_eps_item(const std::string& s) {
    if (s.rfind("2^", 0) == 0) {
        std::size_t used = 0;
        const int e = std::stoi(s.substr(2), &used);
        if (used != s.size() - 2) throw ContractViolation("eps: bad power '" + s + "'");
        return std::ldexp(1.0, e);
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ContractViolation("eps: bad value '" + s + "'");
    return v;
}

int power_of(const std::string& s) {
    if (s.rfind("2^", 0) != 0) throw ContractViolation("eps: ranges must use powers of two, got '" + s + "'");
    return std::stoi(s.substr(2));
}

bool is_pow2(std::size_t n) { return n >= 4 && (n & (n - 1)) == 0; }

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ContractViolation("invalid " + field + ": " + why);
}

int default_dim(const RunConfig& c) {
    if (c.d != 0) return c.d;
    if (c.command == "sweep-heat") return 1;
    if (c.command == "sweep-laplace") return c.family == "radial" ? 3 : 2;
    if (c.command == "sweep-dirac") return 2;
    return 3;
}

std::vector<double> ladder(int from, int to) {
    std::vector<double> out;
    for (int k = from; k <= to; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
}

std::vector<double> default_ladder(const RunConfig& c) {
    if (!c.eps.empty()) return c.eps;
    // The radial law is asymptotic; its ladder starts at the default eps_0 = 2^-5.
    if (c.family == "radial") return ladder(5, 8);
    return ladder(3, 8);
}

ExponentPoint default_point(const RunConfig& c, int d) {
    if (c.point) return *c.point;
    if (c.command == "sweep-laplace" && d == 3) return critical_points(3).Q;
    return {Rational(3, 4), Rational(1, 4)};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << j.dump(2) << '\n';
    if (!os) throw IoError("write failed: " + path.string());
}

template <typename Writer>
void write_file(const fs::path& path, Writer w) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    w(os);
    if (!os) throw IoError("write failed: " + path.string());
}

fs::path prepare_dir(const RunConfig& c) {
    const fs::path dir = resolve_output_dir(c);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

struct SweepOutcome {
    Measurement m;
    std::optional<double> profile;
};

SweepOutcome sweep_one(const RunConfig& c, int d, double eps, const ExponentPoint& p) {
    KnappOptions ko;
    if (c.samples) ko.samples = *c.samples;
    if (c.box) ko.alpha = *c.box;
    std::optional<TestFamily> fam;
    if (c.command == "sweep-laplace")
        fam = c.family == "radial" ? build_radial(static_cast<std::size_t>(d), c.delta, eps) : build_knapp(static_cast<std::size_t>(d), eps, ko);
    else if (c.command == "sweep-heat")
        fam = c.family == "radial" ? build_radial_heat(c.delta, eps) : build_knapp_heat(eps, ko);
    else
        fam = build_knapp_dirac(eps, c.angle, ko);
    const bool laplace = c.command == "sweep-laplace";
    SweepOutcome out{measure(*fam, fam->symbol, p, laplace), std::nullopt};
    if (laplace) {
        const double scale = std::pow(eps, 0.5 * (d - 2));
        if (c.family == "radial") {
            if (auto s = radial_shell_minimum(*fam, *out.m.output)) out.profile = *s / scale;
        } else {
            out.profile = knapp_box_minimum(*fam, *out.m.output) / scale;
        }
        out.m.output.reset();
    }
    return out;
}

RunResult run_sweep(const RunConfig& c, std::ostream& log) {
    const int d = default_dim(c);
    const auto eps = default_ladder(c);
    const ExponentPoint p = default_point(c, d);
    std::vector<SweepOutcome> results;
    if (c.jobs <= 1) {
        for (double e : eps) results.push_back(sweep_one(c, d, e, p));
    } else {
        for (std::size_t i = 0; i < eps.size(); i += c.jobs) {
            std::vector<std::future<SweepOutcome>> batch;
            for (std::size_t k = i; k < std::min(eps.size(), i + c.jobs); ++k)
                batch.push_back(std::async(std::launch::async, sweep_one, std::cref(c), d, eps[k], std::cref(p)));
            for (auto& f : batch) results.push_back(f.get());
        }
    }
    std::vector<SweepRecord> rows;
    json profile = json::array();
    for (const auto& r : results) {
        rows.push_back(r.m.record);
        json entry = {{"eps", r.m.record.eps}, {"ratio", r.m.record.ratio}};
        if (r.profile) entry["scaled_minimum"] = *r.profile;
        profile.push_back(entry);
    }
    const SlopeFit fit = fit_slope(rows);
    json summary = slope_json(rows, fit, kSlopeTolerance);
    summary["kind"] = c.command;
    summary["profile"] = profile;
    summary["config"] = to_json(c);

    const fs::path dir = prepare_dir(c);
    const std::string stem = c.command + "-" + c.family + "-d" + std::to_string(d);
    write_file(dir / (stem + ".csv"), [&](std::ostream& os) { write_sweep_csv(os, rows); });
    write_json(dir / (stem + ".json"), summary);
    for (const auto& r : rows)
        log << "eps=" << format_double(r.eps) << " ratio=" << format_double(r.ratio) << '\n';
    log << "slope=" << fit.slope << " predicted=" << rows.front().predicted_exp
        << " pass=" << (summary["pass"].get<bool>() ? "true" : "false") << '\n';
    return {summary["pass"].get<bool>() ? kExitPass : kExitFail, {(dir / (stem + ".csv")).string(), (dir / (stem + ".json")).string()}};
}

RunResult run_ranges(const RunConfig& c, std::ostream& log) {
    const int d = default_dim(c);
    json out = ranges_json(d);
    out["kind"] = "ranges";
    bool pass = true;

    const auto cp = critical_points(d);
    json crit = json::object();
    for (const auto& [name, pt] : {std::pair<const char*, ExponentPoint>{"G", cp.G}, {"Q", cp.Q}, {"S", cp.S},
                                   {"G'", cp.Gd}, {"Q'", cp.Qd}, {"S'", cp.Sd}}) {
        crit[name] = to_string(pt);
        pass = pass && dual(dual(pt)) == pt;
    }
    for (const auto& pt : {cp.G, cp.Q, cp.S}) pass = pass && pt.y == Rational(d - 2, d) * (1 - pt.x);
    out["critical_points"] = crit;

    std::vector<Theorem> theorems = c.theorem ? std::vector<Theorem>{parse_theorem(*c.theorem)} : all_theorems();
    json verdicts = json::array();
    for (Theorem t : theorems) {
        json v = {{"theorem", theorem_name(t)}};
        const bool on_line = t == Theorem::carleman_laplace || t == Theorem::uniform_sobolev ||
                             t == Theorem::nonelliptic || t == Theorem::heat_carleman || t == Theorem::dirac_2d;
        if (on_line) {
            v["gap"] = to_string(line_gap(t, d));
            v["interval"] = admissible_interval(t, d).describe();
        }
        if (c.point) {
            const auto r = check_range(t, d, *c.point);
            v["point"] = to_string(*c.point);
            v["admissible"] = r.admissible;
            v["boundary"] = r.boundary;
            v["failed_conditions"] = r.failed_conditions;
            if (c.theorem) log << "admissible: " << (r.admissible ? "true" : "false") << '\n';
            else log << theorem_name(t) << " admissible: " << (r.admissible ? "true" : "false") << '\n';
            for (const auto& f : r.failed_conditions) log << "  failed: " << f << '\n';
        }
        verdicts.push_back(v);
    }
    out["verdicts"] = verdicts;
    if (d >= 3) {
        json diff = json::array();
        for (const auto& iv : interval_difference(admissible_interval(Theorem::carleman_laplace, d),
                                                  admissible_interval(Theorem::uniform_sobolev, d)))
            diff.push_back(iv.describe());
        out["carleman_minus_sobolev"] = diff;
    }
    out["pass"] = pass;
    out["config"] = to_json(c);
    const fs::path dir = prepare_dir(c);
    const fs::path path = dir / ("ranges-d" + std::to_string(d) + ".json");
    write_json(path, out);
    return {pass ? kExitPass : kExitFail, {path.string()}};
}

Field constant_spinor(std::size_t n) {
    const GridSpec g = GridSpec::uniform(2, 2.5, n);
    return Field(g, Side::physical, std::vector<std::vector<cplx>>(2, std::vector<cplx>(g.size(), cplx{1.0, 0.0})));
}

RunResult run_kelvin(const RunConfig& c, std::ostream& log) {
    const std::vector<std::size_t> grids = c.grids.empty() ? std::vector<std::size_t>{512, 1024} : c.grids;
    const std::vector<int> signs = c.sign == 0 ? std::vector<int>{1, -1} : std::vector<int>{c.sign};
    Table t{{"u", "sign", "n", "identity_residual", "chain_residual"}, {}};
    double worst_identity = 0.0, worst_chain = 0.0;
    for (std::size_t n : grids) {
        const std::pair<std::string, Field> cases[] = {{"bump-upper", kelvin_test_bump(n, 2.5, 1.2, 0.4, 0.03, 0)},
                                                       {"bump-lower", kelvin_test_bump(n, 2.5, 1.2, 0.4, 0.03, 1)},
                                                       {"constant", constant_spinor(n)}};
        for (const auto& [name, u] : cases)
            for (int s : signs) {
                const double id = verify_kelvin_identity(u, s);
                const double ch = name == "constant" ? 0.0 : kelvin_chain_rule_residual(u, s);
                worst_identity = std::max(worst_identity, id);
                worst_chain = std::max(worst_chain, ch);
                t.rows.push_back({name, s > 0 ? "+" : "-", std::to_string(n), format_double(id), format_double(ch)});
                log << name << ' ' << (s > 0 ? '+' : '-') << ' ' << n << " identity=" << id << " chain=" << ch << '\n';
            }
    }
    const bool pass = worst_identity <= kKelvinTolerance && worst_chain <= 1e-6;
    const fs::path dir = prepare_dir(c);
    write_file(dir / "kelvin.csv", [&](std::ostream& os) { write_table(os, t); });
    write_json(dir / "kelvin.json", {{"schema", kSchemaVersion},
                                     {"kind", "check-kelvin"},
                                     {"max_identity_residual", worst_identity},
                                     {"max_chain_residual", worst_chain},
                                     {"tolerance", kKelvinTolerance},
                                     {"pass", pass},
                                     {"config", to_json(c)}});
    return {pass ? kExitPass : kExitFail, {(dir / "kelvin.csv").string(), (dir / "kelvin.json").string()}};
}

RunResult run_extension(const RunConfig& c, std::ostream& log) {
    const int m = c.sphere_dim;
    Table t{{"m", "r", "re", "im", "abs"}, {}};
    bool pass = true;
    const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
    for (std::size_t i = 0; i < c.count; ++i) {
        const double r = c.radius_max * static_cast<double>(i) / static_cast<double>(c.count - 1);
        std::vector<double> y(static_cast<std::size_t>(m + 1), 0.0);
        y[0] = r;
        const cplx v = sphere_extension(y, m);
        pass = pass && std::isfinite(v.real()) && std::isfinite(v.imag());
        if (i == 0) pass = pass && std::abs(v - area) <= 1e-12 * area;
        t.rows.push_back({std::to_string(m), format_double(r), format_double(v.real()), format_double(v.imag()),
                          format_double(std::abs(v))});
    }
    const fs::path dir = prepare_dir(c);
    const std::string stem = "extension-kernel-m" + std::to_string(m);
    write_file(dir / (stem + ".csv"), [&](std::ostream& os) { write_table(os, t); });
    write_json(dir / (stem + ".json"),
               {{"schema", kSchemaVersion}, {"kind", "extension-kernel"}, {"m", m}, {"surface_area", area}, {"pass", pass},
                {"config", to_json(c)}});
    log << t.rows.size() << " samples, pass=" << (pass ? "true" : "false") << '\n';
    return {pass ? kExitPass : kExitFail, {(dir / (stem + ".csv")).string(), (dir / (stem + ".json")).string()}};
}

RunResult run_delta_limit(const RunConfig& c, std::ostream& log) {
    auto lambdas = c.lambdas;
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    const auto phi = [](double t) { return std::exp(-t * t); };
    const double target = std::numbers::pi;
    Table t{{"a", "lambda", "value", "target", "abs_error"}, {}};
    bool pass = true;
    for (double a : c.a_values) {
        double prev = kInfinity;
        for (double l : lambdas) {
            const double v = approx_identity(a, l, phi);
            const double err = std::abs(v - target);
            pass = pass && err < prev;
            if (l <= 1e-3) pass = pass && err <= kDeltaLimitTolerance;
            prev = err;
            t.rows.push_back({format_double(a), format_double(l), format_double(v), format_double(target), format_double(err)});
            log << "a=" << a << " lambda=" << l << " error=" << err << '\n';
        }
    }
    const fs::path dir = prepare_dir(c);
    write_file(dir / "delta-limit.csv", [&](std::ostream& os) { write_table(os, t); });
    write_json(dir / "delta-limit.json", {{"schema", kSchemaVersion},
                                          {"kind", "delta-limit"},
                                          {"tolerance", kDeltaLimitTolerance},
                                          {"pass", pass},
                                          {"config", to_json(c)}});
    return {pass ? kExitPass : kExitFail, {(dir / "delta-limit.csv").string(), (dir / "delta-limit.json").string()}};
}

}  // namespace

std::vector<double> parse_eps_ladder(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) throw ContractViolation("eps: empty item");
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_eps_item(item));
            continue;
        }
        const int a = power_of(item.substr(0, dots)), b = power_of(item.substr(dots + 2));
        const int step = a <= b ? 1 : -1;
        for (int k = a;; k += step) {
            out.push_back(std::ldexp(1.0, k));
            if (k == b) break;
        }
    }
    if (out.empty()) throw ContractViolation("eps: empty ladder");
    return out;
}

json to_json(const RunConfig& c) {
    json j = {{"command", c.command},   {"d", c.d},
              {"family", c.family},     {"delta", c.delta},
              {"angle", c.angle},       {"grids", c.grids},
              {"sign", c.sign},         {"sphere_dim", c.sphere_dim},
              {"radius_max", c.radius_max}, {"count", c.count},
              {"a_values", c.a_values}, {"lambdas", c.lambdas},
              {"seed", c.seed},         {"jobs", c.jobs},
              {"eps", c.eps},           {"output_dir", c.output_dir},
              {"report_dir", c.report_dir}};
    j["theorem"] = c.theorem ? json(*c.theorem) : json(nullptr);
    j["point"] = c.point ? json(to_string(c.point->x) + "," + to_string(c.point->y)) : json(nullptr);
    j["samples"] = c.samples ? json(*c.samples) : json(nullptr);
    j["box"] = c.box ? json(*c.box) : json(nullptr);
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.command = j.at("command").get<std::string>();
        c.d = j.at("d").get<int>();
        c.family = j.at("family").get<std::string>();
        c.delta = j.at("delta").get<double>();
        c.angle = j.at("angle").get<double>();
        c.grids = j.at("grids").get<std::vector<std::size_t>>();
        c.sign = j.at("sign").get<int>();
        c.sphere_dim = j.at("sphere_dim").get<int>();
        c.radius_max = j.at("radius_max").get<double>();
        c.count = j.at("count").get<std::size_t>();
        c.a_values = j.at("a_values").get<std::vector<double>>();
        c.lambdas = j.at("lambdas").get<std::vector<double>>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.jobs = j.at("jobs").get<std::size_t>();
        c.eps = j.at("eps").get<std::vector<double>>();
        c.output_dir = j.at("output_dir").get<std::string>();
        c.report_dir = j.at("report_dir").get<std::string>();
        if (!j.at("theorem").is_null()) c.theorem = j.at("theorem").get<std::string>();
        if (!j.at("point").is_null()) c.point = parse_point(j.at("point").get<std::string>());
        if (!j.at("samples").is_null()) c.samples = j.at("samples").get<std::size_t>();
        if (!j.at("box").is_null()) c.box = j.at("box").get<double>();
    } catch (const json::exception& e) {
        throw IoError(std::string("config: ") + e.what());
    }
    return c;
}

void validate(const RunConfig& c) {
    require(kCommands.count(c.command) == 1, "command", "unknown subcommand '" + c.command + "'");
    require(c.jobs >= 1 && c.jobs <= 64, "jobs", "must lie in [1, 64]");
    if (c.point) {
        const auto& p = *c.point;
        require(p.x >= Rational(0) && p.x <= Rational(1) && p.y >= Rational(0) && p.y <= Rational(1), "point", "coordinates must lie in [0, 1]");
    }
    if (c.theorem) parse_theorem(*c.theorem);
    const int d = default_dim(c);
    if (c.command == "ranges") {
        require(d >= 2 && d <= 64, "d", "must lie in [2, 64]");
    } else if (c.command.rfind("sweep-", 0) == 0) {
        require(c.family == "knapp" || c.family == "radial", "family", "must be knapp or radial");
        if (c.command == "sweep-laplace")
            require(c.family == "radial" ? d == 3 : (d == 2 || d == 3), "d", "knapp needs d in {2, 3}, radial d = 3");
        if (c.command == "sweep-heat") require(d == 1, "d", "heat sweeps run in d = 1");
        if (c.command == "sweep-dirac") {
            require(d == 2, "d", "dirac sweeps run in d = 2");
            require(c.family == "knapp", "family", "dirac sweeps use the knapp family");
        }
        for (double e : c.eps)
            require(e <= 0.5 && e >= std::ldexp(1.0, -8), "eps", "each value must lie in [2^-8, 1/2]");
        if (!c.eps.empty()) {
            auto sorted = c.eps;
            std::sort(sorted.begin(), sorted.end());
            require(sorted.size() >= 4 && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "eps",
                    "need at least four distinct values");
        }
        require(c.delta >= 1.0 / 32.0 && c.delta <= 0.125, "delta", "must lie in [1/32, 1/8]");
        if (c.samples) require(is_pow2(*c.samples) && *c.samples >= 16, "samples", "must be a power of two >= 16");
        if (c.box) require(*c.box > 0.0 && std::isfinite(*c.box), "box", "must be positive");
        if (c.samples || c.box) {
            const double alpha = c.box.value_or(KnappOptions{}.alpha);
            const double n = static_cast<double>(c.samples.value_or(KnappOptions{}.samples));
            require(n >= 4.0 * alpha, "samples", "need samples >= 4 * box so the band fits in half the Nyquist range");
        }
    } else if (c.command == "check-kelvin") {
        for (auto n : c.grids) require(is_pow2(n) && n >= 64 && n <= 2048, "grid", "must be a power of two in [64, 2048]");
        require(c.sign >= -1 && c.sign <= 1, "sign", "must be +, - or both");
    } else if (c.command == "extension-kernel") {
        require(c.sphere_dim >= 0 && c.sphere_dim <= 8, "m", "must lie in [0, 8]");
        require(c.radius_max > 0.0 && std::isfinite(c.radius_max), "rmax", "must be positive");
        require(c.count >= 2 && c.count <= 100000, "count", "must lie in [2, 100000]");
    } else if (c.command == "delta-limit") {
        require(!c.a_values.empty() && !c.lambdas.empty(), "a/lambda", "need at least one value each");
        for (double a : c.a_values) require(a > 0.0 && std::isfinite(a), "a", "must be positive");
        for (double l : c.lambdas) require(l > 0.0 && l < 1.0, "lambda", "must lie in (0, 1)");
    }
}

std::string resolve_output_dir(const RunConfig& c) {
    if (!c.output_dir.empty()) return c.output_dir;
    if (const char* env = std::getenv("CARLAB_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

RunResult run(const RunConfig& c, std::ostream& log) {
    validate(c);
    if (c.command == "ranges") return run_ranges(c, log);
    if (c.command.rfind("sweep-", 0) == 0) return run_sweep(c, log);
    if (c.command == "check-kelvin") return run_kelvin(c, log);
    if (c.command == "extension-kernel") return run_extension(c, log);
    if (c.command == "delta-limit") return run_delta_limit(c, log);
    const std::string dir = c.report_dir.empty() ? resolve_output_dir(c) : c.report_dir;
    const json report = emit_report(dir);
    log << report.dump(2) << '\n';
    return {report.at("pass").get<bool>() ? kExitPass : kExitFail, {(fs::path(dir) / "report.json").string()}};
}

json emit_report(const std::string& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("report: no such directory " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "report.json")
            files.push_back(e.path());
    if (ec) throw IoError("report: cannot list " + dir);
    if (files.empty()) throw IoError("report: no artifacts in " + dir);
    std::sort(files.begin(), files.end());
    json entries = json::array();
    bool pass = true;
    for (const auto& f : files) {
        std::ifstream is(f);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw IoError("report: corrupt artifact " + f.filename().string() + ": " + e.what());
        }
        if (!j.is_object() || j.value("schema", 0) != kSchemaVersion || !j.contains("kind"))
            throw IoError("report: artifact " + f.filename().string() + " lacks schema=1 or kind");
        json entry = {{"file", f.filename().string()}, {"kind", j["kind"]}, {"pass", j.value("pass", true)}};
        for (const char* key : {"slope", "predicted", "abs_error", "tolerance", "max_identity_residual", "max_chain_residual"})
            if (j.contains(key)) entry[key] = j[key];
        pass = pass && entry["pass"].get<bool>();
        entries.push_back(entry);
    }
    json report = {{"schema", kSchemaVersion}, {"kind", "report"}, {"entries", entries}, {"pass", pass}};
    std::ofstream os(fs::path(dir) / "report.json");
    if (!os) throw IoError("report: cannot write report.json");
    os << report.dump(2) << '\n';
    return report;
}

int report_error(const std::exception& e, std::ostream& err) {
    if (const auto* ce = dynamic_cast<const Error*>(&e)) {
        err << "error: " << ce->code() << ": " << ce->what() << '\n';
        return ce->code() == "contract" || ce->code() == "io" ? kExitUsage : kExitFail;
    }
    err << "error: internal: " << e.what() << '\n';
    return kExitFail;
}

}  // namespace carlab
