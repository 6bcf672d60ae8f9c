#include "common.hpp"

#include "carlab/cutoffs.hpp"
#include "carlab/errors.hpp"
#include "carlab/operators.hpp"
#include "carlab/sharpness.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>

using namespace carlab;
using carlab::test::rel_l2;

namespace {

constexpr double kPi = std::numbers::pi;

Field gaussian(const GridSpec& g, double width, std::vector<double> centre = {}) {
    if (centre.empty()) centre.assign(g.dim(), 0.0);
    return Field::sample(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
        return cplx{std::exp(-0.5 * r2 / (width * width))};
    });
}

// 4 pi int_0^pi cos(r cos th) sin^2 th dth by composite Simpson.
double s3_extension(double r) {
    const int n = 4000;
    const double h = kPi / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double th = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::cos(r * std::cos(th)) * std::sin(th) * std::sin(th);
    }
    return 4.0 * kPi * s * h / 3.0;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("multipliers act as expected on simple inputs") {
    const GridSpec g = GridSpec::uniform(2, 6.0, 64);
    const Field f = gaussian(g, 0.8, {0.3, -0.5});
    const Field same = apply_multiplier(Symbol::constant(2, 1.0), f);
    CHECK(rel_l2(same.values(), f.values()) < 1e-14);

    const double k0 = 2 * kPi / 6.0, k1 = -3 * kPi / 6.0;
    const Field wave = Field::sample(g, [&](auto x) { return std::exp(cplx{0.0, k0 * x[0] + k1 * x[1]}); });
    const Field lw = apply_multiplier(Symbol::laplacian(2), wave);
    std::vector<cplx> expect(wave.values().begin(), wave.values().end());
    for (auto& z : expect) z *= k0 * k0 + k1 * k1;
    CHECK(rel_l2(lw.values(), expect) < 1e-12);

    // symbol route against repeated spectral derivatives
    const Field lap = negative_laplacian(f);
    const Field dxx = partial_derivative(partial_derivative(f, 0), 0);
    const Field dyy = partial_derivative(partial_derivative(f, 1), 1);
    std::vector<cplx> sum(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) sum[i] = -(dxx.values()[i] + dyy.values()[i]);
    CHECK(rel_l2(lap.values(), sum) < 1e-12);
}

TEST_CASE("resolution guard refuses aliased output") {
    const GridSpec g = GridSpec::uniform(1, 4.0, 32);
    const double k = 12 * kPi / 4.0;  // beyond half Nyquist
    const Field wave = Field::sample(g, [&](auto x) { return std::exp(cplx{0.0, k * x[0]}); });
    CHECK_THROWS_AS(apply_multiplier(Symbol::laplacian(1), wave), ResolutionError);
    CHECK_NOTHROW(apply_multiplier(Symbol::laplacian(1), wave, {.band_tolerance = -1.0}));
}

TEST_CASE("conjugated Laplacian: symbol route against the weighted route") {
    const GridSpec g = GridSpec::uniform(2, 8.0, 256);
    const Field u = gaussian(g, 0.25);
    const std::vector<double> zero{0.0, 0.0};
    const Field c0 = conjugated_laplacian(zero, u);
    CHECK(rel_l2(c0.values(), negative_laplacian(u).values()) < 1e-13);
    for (double s : {0.5, 1.0, 2.0, 4.0}) {
        const std::vector<double> v{0.6 * s, 0.8 * s};
        CHECK(conjugation_residual(v, u, 3.0) < 1e-6);
    }
    const Field wide = gaussian(GridSpec::uniform(2, 2.0, 32), 1.0);
    CHECK_THROWS_AS(conjugated_laplacian(zero, wide), SupportError);
}

TEST_CASE("Dirac operators") {
    const GridSpec g = GridSpec::uniform(2, 6.0, 64);
    const Field c = Field::sample(g, [](auto) { return cplx{1.0}; }).with_components(
        {std::vector<cplx>(g.size(), 1.0), std::vector<cplx>(g.size(), 2.0)});
    for (int s : {1, -1}) CHECK(carlab::test::max_abs(dirac_apply(s, c).values(1)) < 1e-12);

    const double a = 2 * kPi / 6.0, b = kPi / 6.0;
    const Field wave = Field::sample(g, [&](auto x) { return std::exp(cplx{0.0, a * x[0] + b * x[1]}); });
    const std::vector<cplx> e(wave.values().begin(), wave.values().end());
    const Field up = wave.with_components({e, std::vector<cplx>(g.size(), 0.0)});
    const Field dp = dirac_apply(1, up);
    std::vector<cplx> expect(e);
    for (auto& z : expect) z *= cplx{a, b};
    CHECK(carlab::test::max_abs(dp.values(0)) < 1e-12);
    CHECK(rel_l2(dp.values(1), expect) < 1e-12);

    const Field r = random_band_limited(g, 9, 4, 2);
    for (int s : {1, -1}) {
        const Field sq = dirac_apply(s, dirac_apply(s, r));
        for (std::size_t comp = 0; comp < 2; ++comp) {
            const std::vector<cplx> vals(r.values(comp).begin(), r.values(comp).end());
            const Field lap = negative_laplacian(Field(g, Side::physical, vals));
            CHECK(rel_l2(sq.values(comp), lap.values()) < 1e-10);
        }
    }
    CHECK_THROWS_AS(dirac_apply(2, r), ContractViolation);
    CHECK_THROWS_AS(dirac_apply(1, wave), ContractViolation);
}

TEST_CASE("Littlewood-Paley square function") {
    const GridSpec g = GridSpec({AxisSpec{4.0, 16, 0.0}, AxisSpec{16.0, 128, 0.0}}).with_half_cell_offset();
    const Field zero = Field::zeros(g, Side::physical);
    CHECK(carlab::test::max_abs(littlewood_paley_sf(zero).values()) == 0.0);
    const auto [lo, hi] = littlewood_paley_bounds(g);
    CHECK(lo >= 1.0);
    CHECK(hi <= 4.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Field f = random_band_limited(g, seed);
        const double n2 = std::pow(lebesgue_norm(f, 2.0), 2);
        const double s2 = std::pow(lebesgue_norm(littlewood_paley_sf(f), 2.0), 2);
        CHECK(s2 >= lo * n2 * (1 - 1e-10));
        CHECK(s2 <= hi * n2 * (1 + 1e-10));
    }
}

TEST_CASE("sphere extension kernels") {
    const double y0[1] = {0.0};
    CHECK(std::abs(sphere_extension(y0, 0) - cplx{2.0}) < 1e-15);
    const double y1[2] = {0.0, 0.0};
    CHECK(std::abs(sphere_extension(y1, 1) - cplx{2 * kPi}) < 1e-14);
    const double y2[3] = {0.0, 0.0, 0.0};
    CHECK(std::abs(sphere_extension(y2, 2) - cplx{4 * kPi}) < 1e-13);
    for (double r : {0.5, 1.0, 3.3, 7.0, 15.0}) {
        const double y[4] = {r * 0.6, 0.0, r * 0.8, 0.0};
        CHECK(std::abs(sphere_extension(y, 3) - cplx{s3_extension(r)}) < 1e-10);
    }
    const double big = 1000.0;
    const double yb[2] = {big, 0.0};
    const double asym = 2 * kPi * std::sqrt(2.0 / (kPi * big)) * std::cos(big - kPi / 4);
    CHECK(std::abs(sphere_extension(yb, 1).real() - asym) < 2 * kPi * std::pow(big, -1.5));
    CHECK_THROWS_AS(sphere_extension(y1, 2), ContractViolation);
}

TEST_CASE("restriction-extension of a separable input") {
    const double s = 2.0, w = 3.0, carrier = 1.25;
    const GridSpec g({AxisSpec{24.0, 64, 0.0}, AxisSpec{24.0, 64, 0.0}, AxisSpec{24.0, 64, carrier}});
    const Field f = Field::sample(g, [&](auto x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return std::exp(-0.5 * r2 / (s * s)) * std::exp(-0.5 * x[2] * x[2] / (w * w)) *
               std::exp(cplx{0.0, carrier * x[2]});
    });
    const Field out = restriction_extension(f);
    // g^(1) * 2 pi J0(|y|) * sum_k h^(tau_k) psi(tau_k) e^{i t tau_k} dtau
    const double ghat = 2 * kPi * s * s * std::exp(-0.5 * s * s);
    const double dtau = g.frequency_spacing(2);
    double worst = 0.0, peak = 0.0;
    std::vector<std::size_t> idx(3);
    for (std::size_t flat = 0; flat < g.size(); flat += 37) {
        g.unflatten(flat, idx);
        const double y1 = g.position(0, idx[0]), y2 = g.position(1, idx[1]), t = g.position(2, idx[2]);
        cplx tf = 0.0;
        for (std::size_t k = 0; k < 64; ++k) {
            const double tau = g.frequency(2, k);
            const double hh = std::sqrt(2 * kPi) * w * std::exp(-0.5 * w * w * (tau - carrier) * (tau - carrier));
            tf += hh * cutoffs::psi(tau) * std::exp(cplx{0.0, t * tau}) * dtau;
        }
        const cplx expect = ghat * 2 * kPi * std::cyl_bessel_j(0.0, std::hypot(y1, y2)) * tf;
        worst = std::max(worst, std::abs(out.values()[flat] - expect));
        peak = std::max(peak, std::abs(expect));
    }
    CHECK(worst < 1e-8 * peak);
    CHECK_THROWS_AS(restriction_extension(f, {.angular_nodes = 10}), QuadratureError);
}

TEST_CASE("operator report") {
    const GridSpec g = GridSpec::uniform(2, 6.0, 64);
    const Field f = gaussian(g, 1.0);
    const OperatorReport r = operator_report(Symbol::constant(2, 3.0), f, 2.0, 2.0);
    CHECK(r.ratio == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(r.symbol == "constant");
    CHECK_THROWS_AS(operator_report(Symbol::constant(2, 1.0), Field::zeros(g, Side::physical), 2.0, 2.0),
                    ContractViolation);
}

}
