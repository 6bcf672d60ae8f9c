#include "carlab/errors.hpp"
#include "carlab/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Flags {
    int d = 0;
    std::string theorem, point, eps, family = "knapp", sign = "both", report_dir, out;
    double delta = 0.125, angle = 0.0, box = 0.0, rmax = 40.0;
    std::size_t samples = 0, count = 81, jobs = 1;
    std::vector<std::size_t> grids;
    std::vector<double> a_values{1.0, 2.0}, lambdas{1e-1, 1e-2, 1e-3};
    int m = 1;
    std::uint64_t seed = 1;
};

carlab::RunConfig to_config(const std::string& command, const Flags& f) {
    carlab::RunConfig c;
    c.command = command;
    c.d = f.d;
    if (!f.theorem.empty()) c.theorem = f.theorem;
    if (!f.point.empty()) c.point = carlab::parse_point(f.point);
    if (!f.eps.empty()) c.eps = carlab::parse_eps_ladder(f.eps);
    c.family = f.family;
    c.delta = f.delta;
    c.angle = f.angle;
    if (f.samples) c.samples = f.samples;
    if (f.box > 0.0) c.box = f.box;
    c.grids = f.grids;
    if (f.sign == "+") c.sign = 1;
    else if (f.sign == "-") c.sign = -1;
    else if (f.sign == "both") c.sign = 0;
    else throw carlab::ContractViolation("invalid sign: expected +, - or both");
    c.sphere_dim = f.m;
    c.radius_max = f.rmax;
    c.count = f.count;
    c.a_values = f.a_values;
    c.lambdas = f.lambdas;
    c.seed = f.seed;
    c.jobs = f.jobs;
    c.output_dir = f.out;
    c.report_dir = f.report_dir;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carlab: numerical checks for sharp Carleman estimates"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--out", f.out, "Output directory (default $CARLAB_OUTPUT_DIR or .)");
    app.add_option("--seed", f.seed, "Random seed");
    app.add_option("--jobs", f.jobs, "Concurrent sweep jobs");

    auto* ranges = app.add_subcommand("ranges", "Admissibility verdicts and diagram geometry");
    ranges->add_option("--d", f.d, "Dimension");
    ranges->add_option("--theorem", f.theorem, "Theorem tag, all when omitted");
    ranges->add_option("--point", f.point, "Exponent point x,y with rational coordinates");

    for (const char* name : {"sweep-laplace", "sweep-heat", "sweep-dirac"}) {
        auto* s = app.add_subcommand(name, "Lower-bound sweep over an eps ladder");
        s->add_option("--d", f.d, "Dimension");
        s->add_option("--family", f.family, "knapp or radial");
        s->add_option("--point", f.point, "Exponent point x,y");
        s->add_option("--eps", f.eps, "Ladder, e.g. 2^-3..2^-8");
        s->add_option("--delta", f.delta, "Annulus half-width for the radial family");
        s->add_option("--angle", f.angle, "Rotation angle for the Dirac symbol");
        s->add_option("--samples", f.samples, "Samples per axis (Knapp)");
        s->add_option("--box", f.box, "Box half-width in units of pi over the band half-width (Knapp)");
    }

    auto* kelvin = app.add_subcommand("check-kelvin", "Residual table for the Kelvin identity");
    kelvin->add_option("--grid", f.grids, "Samples per axis (repeatable)");
    kelvin->add_option("--sign", f.sign, "+, - or both");

    auto* ext = app.add_subcommand("extension-kernel", "Samples of the sphere extension kernel");
    ext->add_option("--m", f.m, "Sphere dimension");
    ext->add_option("--rmax", f.rmax, "Largest radius");
    ext->add_option("--count", f.count, "Number of radii");

    auto* delta = app.add_subcommand("delta-limit", "Approximate-identity table");
    delta->add_option("--a", f.a_values, "Values of a")->expected(1, -1);
    delta->add_option("--lambda", f.lambdas, "Values of lambda")->expected(1, -1);

    auto* report = app.add_subcommand("report", "Aggregate JSON artifacts");
    report->add_option("--dir", f.report_dir, "Artifact directory (default output directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : carlab::kExitUsage;
    }

    try {
        const auto config = to_config(app.get_subcommands().front()->get_name(), f);
        const auto result = carlab::run(config, std::cout);
        for (const auto& a : result.artifacts) std::cerr << "wrote " << a << '\n';
        return result.exit_code;
    } catch (const std::exception& e) {
        return carlab::report_error(e, std::cerr);
    }
}
