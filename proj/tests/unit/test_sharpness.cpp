#include "carlab/cutoffs.hpp"
#include "carlab/errors.hpp"
#include "carlab/sharpness.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace carlab;

namespace {

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

const ExponentPoint kMid{R(3, 4), R(1, 4)};

double spectrum_outside(const Field& f, const std::function<bool(std::span<const double>)>& inside) {
    const Field hat = forward_transform(f);
    const GridSpec& g = f.spec();
    double out = 0.0, peak = 0.0;
    std::vector<std::size_t> idx(g.dim());
    std::vector<double> xi(g.dim());
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        g.unflatten(flat, idx);
        for (std::size_t a = 0; a < g.dim(); ++a) xi[a] = g.frequency(a, idx[a]);
        const double m = std::abs(hat.values()[flat]);
        peak = std::max(peak, m);
        if (!inside(xi)) out = std::max(out, m);
    }
    return out / peak;
}

// Integral after t = lambda^2 + a lambda tan(theta), by composite Simpson.
double approx_identity_oracle(double a, double lambda, const std::function<double(double)>& phi) {
    const int n = 200000;
    const double lo = -std::numbers::pi / 2, h = std::numbers::pi / n;
    double s = 0.0;
    for (int i = 1; i < n; ++i) {
        const double th = lo + i * h;
        s += (i % 2 ? 4.0 : 2.0) * phi(lambda * lambda + a * lambda * std::tan(th));
    }
    return s * h / 3.0;
}

}  // namespace

TEST_SUITE("sharpness") {

TEST_CASE("Knapp family support and scaling") {
    for (std::size_t d : {2u, 3u}) {
        const double eps = 1.0 / 16;
        const TestFamily fam = build_knapp(d, eps);
        const double tw = std::sqrt(eps) / (10.0 * d);
        const double leak = spectrum_outside(fam.f, [&](std::span<const double> xi) {
            for (std::size_t a = 0; a + 2 < d; ++a)
                if (std::abs(xi[a]) > tw) return false;
            if (std::abs(xi[d - 2] - 1.0) > eps) return false;
            return std::abs(xi[d - 1]) >= 0.5 && std::abs(xi[d - 1]) <= 2.0;
        });
        CHECK(leak < 1e-12);
    }
    // ||f||_p / eps^{d/2 - d/(2p)} is flat in eps
    const double p = 4.0 / 3;
    std::vector<double> scaled;
    for (int k = 3; k <= 6; ++k) {
        const double eps = std::exp2(-k);
        const TestFamily fam = build_knapp(3, eps);
        scaled.push_back(lebesgue_norm(fam.f, p) / std::pow(eps, 1.5 - 1.5 / p));
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    CHECK(*hi / *lo < 1.1);
    CHECK_THROWS_AS(build_knapp(4, 0.25), ContractViolation);
    CHECK_THROWS_AS(build_knapp(2, 1.0 / 1024), ResolutionError);
}

TEST_CASE("Knapp output is bounded below on the box") {
    for (std::size_t d : {2u, 3u}) {
        std::vector<double> norm;
        for (int k = 3; k <= 7; ++k) {
            const double eps = std::exp2(-k);
            const TestFamily fam = build_knapp(d, eps);
            const Measurement m = measure(fam, fam.symbol, kMid, true);
            const double lo = knapp_box_minimum(fam, *m.output);
            norm.push_back(lo / std::pow(eps, (static_cast<double>(d) - 2) / 2));
        }
        const auto [lo, hi] = std::minmax_element(norm.begin(), norm.end());
        CHECK(*lo > 0.0);
        CHECK(*hi / *lo < 2.0);
    }
}

TEST_CASE("Knapp sweep slopes and monotonicity") {
    std::vector<SweepRecord> d2, d3;
    const CriticalPoints c3 = critical_points(3);
    for (int k = 3; k <= 8; ++k) {
        const double eps = std::exp2(-k);
        d2.push_back(measure_lower_bound(build_knapp(2, eps), kMid));
        d3.push_back(measure_lower_bound(build_knapp(3, eps), c3.Q));
    }
    const SlopeFit f2 = fit_slope(d2);
    CHECK(std::abs(f2.slope - d2.front().predicted_exp) <= 0.15);
    const SlopeFit f3 = fit_slope(d3);
    CHECK(d3.front().predicted_exp == doctest::Approx(2.0 / 3));
    CHECK(std::abs(f3.slope - 2.0 / 3) <= 0.15);
    for (std::size_t i = 1; i < d3.size(); ++i) CHECK(d3[i].ratio <= 1.1 * d3[i - 1].ratio);
}

TEST_CASE("unit symbol measures the norm ratio") {
    const TestFamily fam = build_knapp(2, 0.125);
    const SweepRecord r = measure_lower_bound(fam, Symbol::constant(2, 1.0), kMid);
    CHECK(r.ratio == doctest::Approx(lebesgue_norm(fam.f, 4.0) / lebesgue_norm(fam.f, 4.0 / 3)).epsilon(1e-13));
}

TEST_CASE("scaling transfer is exact") {
    for (std::size_t d : {2u, 3u})
        for (int k : {3, 5}) CHECK(scaling_transfer_residual(build_knapp(d, std::exp2(-k)), kMid) < 1e-8);
}

TEST_CASE("radial family") {
    const double delta = 0.125, eps = 1.0 / 32;
    const TestFamily fam = build_radial(3, delta, eps);
    CHECK(fam.pairing == NormPairing::dual);
    const double leak = spectrum_outside(fam.f, [&](std::span<const double> xi) {
        return std::abs(std::hypot(xi[0], xi[1]) - 1.0) <= 2 * delta && std::abs(xi[2] - 1.0) <= 2 * delta;
    });
    CHECK(leak < 1e-12);
    const Measurement m = measure(fam, fam.symbol, critical_points(3).Q, true);
    CHECK(m.record.predicted_exp == doctest::Approx(2.0 / 3));
    const auto shell = radial_shell_minimum(fam, *m.output);
    REQUIRE(shell.has_value());
    CHECK(*shell > 0.0);
    CHECK_THROWS_AS(build_radial(3, 0.5, eps), ContractViolation);
    CHECK_THROWS_AS(build_radial(2, delta, eps), ContractViolation);
}

TEST_CASE("slope fitting") {
    std::vector<double> eps, exact, wobble, flat;
    for (int k = 3; k <= 8; ++k) {
        const double e = std::exp2(-k);
        eps.push_back(e);
        exact.push_back(3.0 * std::pow(e, 0.4));
        wobble.push_back(std::pow(e, 0.4) * (1 + 0.05 * std::sin(std::log(e))));
        flat.push_back(2.0);
    }
    CHECK(std::abs(fit_slope(eps, exact).slope - 0.4) < 1e-6);
    CHECK(fit_slope(eps, exact).residual_rms < 1e-12);
    CHECK(std::abs(fit_slope(eps, wobble).slope - 0.4) < 0.05);
    CHECK(std::abs(fit_slope(eps, flat).slope) < 1e-12);
    const std::vector<double> three(eps.begin(), eps.begin() + 3);
    CHECK_THROWS_AS(fit_slope(three, std::vector<double>(3, 1.0)), ContractViolation);
    const std::vector<double> dup{0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(fit_slope(dup, std::vector<double>(4, 1.0)), ContractViolation);
}

TEST_CASE("approximate identity") {
    auto gauss = [](double t) { return std::exp(-t * t); };
    CHECK(approx_identity(2.0, 1e-3, [](double) { return 0.0; }) == 0.0);
    CHECK(std::abs(approx_identity(2.0, 1e-3, gauss) - std::numbers::pi) < 1e-2);
    double prev = kInfinity;
    for (double lambda : {1e-1, 1e-2, 1e-3}) {
        const double v = approx_identity(1.0, lambda, gauss);
        CHECK(std::abs(v - approx_identity_oracle(1.0, lambda, gauss)) < 1e-8);
        const double err = std::abs(v - std::numbers::pi);
        CHECK(err < prev);
        prev = err;
    }
    CHECK_THROWS_AS(approx_identity(0.0, 1e-3, gauss), ContractViolation);
    CHECK_THROWS_AS(approx_identity(1.0, 2.0, gauss), ContractViolation);
}

TEST_CASE("heat families and kernel decay") {
    std::vector<SweepRecord> rows;
    for (int k = 3; k <= 8; ++k) rows.push_back(measure_lower_bound(build_knapp_heat(std::exp2(-k)), {R(1, 2), R(0)}));
    CHECK(std::abs(fit_slope(rows).slope - 0.0) <= 0.15);
    const double c0 = heat_kernel_constant(1, 0.0, 0);
    for (int j = 1; j <= 4; ++j) CHECK(heat_kernel_constant(1, 0.0, j) <= 2 * c0);
    CHECK(heat_kernel_constant(1, 1.0, 2) <= 2 * c0);
    CHECK_THROWS_AS(heat_kernel_constant(3, 0.0, 0), ContractViolation);
}

TEST_CASE("Dirac Knapp family") {
    std::vector<SweepRecord> rows;
    for (int k = 3; k <= 8; ++k) rows.push_back(measure_lower_bound(build_knapp_dirac(std::exp2(-k)), kMid));
    CHECK(std::abs(fit_slope(rows).slope - rows.front().predicted_exp) <= 0.15);
}

TEST_CASE("random ascent") {
    const GridSpec g = GridSpec::uniform(2, 4.0, 16);
    AscentOptions opt;
    opt.iterations = 20;
    const AscentResult c = random_ascent(Symbol::constant(2, 2.5), {R(1, 2), R(1, 2)}, g, opt);
    CHECK(c.best_ratio == doctest::Approx(2.5).epsilon(0.01));

    const TestFamily fam = build_knapp(2, 0.125);
    AscentOptions from;
    from.iterations = 15;
    from.start = fam.f;
    const AscentResult a = random_ascent(fam.symbol, kMid, fam.f.spec(), from);
    CHECK(a.best_ratio >= measure_lower_bound(fam, kMid).ratio);
    const AscentResult b = random_ascent(fam.symbol, kMid, fam.f.spec(), from);
    CHECK(a.best_ratio == b.best_ratio);
    for (std::size_t i = 0; i < a.best.values().size(); ++i) REQUIRE(a.best.values()[i] == b.best.values()[i]);
}

TEST_CASE("family names") {
    for (FamilyKind k : {FamilyKind::knapp_laplace, FamilyKind::radial_focus, FamilyKind::knapp_heat,
                         FamilyKind::radial_heat, FamilyKind::knapp_dirac})
        CHECK(parse_family(family_name(k)) == k);
    CHECK_THROWS_AS(parse_family("nope"), ContractViolation);
}

}
