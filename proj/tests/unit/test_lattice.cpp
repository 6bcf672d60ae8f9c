#include "common.hpp"

#include "carlab/errors.hpp"
#include "carlab/lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <sstream>

using namespace carlab;
using carlab::test::rel_l2;

namespace {

// Distribution function by direct counting.
double measure_above(std::span<const double> mags, double cell, double lambda) {
    double m = 0.0;
    for (double a : mags)
        if (a > lambda) m += cell;
    return m;
}

// Lorentz quasi-norms evaluated on a lambda grid that contains every sample
// magnitude; the distribution function is constant between nodes.
std::pair<double, double> brute_lorentz(std::span<const double> mags, double cell, double p) {
    std::vector<double> nodes(mags.begin(), mags.end());
    const double top = *std::max_element(nodes.begin(), nodes.end());
    for (int i = 0; i <= 10000; ++i) nodes.push_back(top * i / 10000.0);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double weak = 0.0, one = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
        const double mu = std::pow(measure_above(mags, cell, mid), 1.0 / p);
        one += (nodes[i + 1] - nodes[i]) * mu;
        // sup of lambda mu(lambda)^{1/p} on the open cell is approached at its right end.
        weak = std::max(weak, nodes[i + 1] * mu);
    }
    return {weak, one};
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("grid construction rejects bad axes") {
    CHECK_THROWS_AS(GridSpec({AxisSpec{1.0, 6, 0.0}}), ContractViolation);
    CHECK_THROWS_AS(GridSpec({AxisSpec{-1.0, 8, 0.0}}), ContractViolation);
    CHECK_THROWS_AS(GridSpec(std::vector<AxisSpec>{}), ContractViolation);
    const GridSpec g = GridSpec::uniform(2, 4.0, 16);
    CHECK(g.size() == 256);
    CHECK(g.spacing(0) == doctest::Approx(0.5));
    CHECK(g.frequency_spacing(1) == doctest::Approx(std::numbers::pi / 4));
    CHECK(g.nyquist(0) == doctest::Approx(16 * std::numbers::pi / 8));
    CHECK(g.position(0, 0) == -4.0);
}

TEST_CASE("constant transforms to a spike of the box volume") {
    const GridSpec g = GridSpec::uniform(2, 3.0, 16);
    const Field one = Field::sample(g, [](auto) { return cplx{1.0}; });
    const Field hat = forward_transform(one);
    auto v = hat.values();
    CHECK(std::abs(v[0] - cplx{36.0}) < 1e-12);
    double rest = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) rest = std::max(rest, std::abs(v[i]));
    CHECK(rest < 1e-12);
}

TEST_CASE("gaussian matches its closed-form transform") {
    const GridSpec g = GridSpec::uniform(1, 16.0, 256);
    const Field f = Field::sample(g, [](auto x) { return cplx{std::exp(-0.5 * x[0] * x[0])}; });
    const Field hat = forward_transform(f);
    auto v = hat.values();
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double xi = g.frequency(0, n);
        if (std::abs(xi) > 4.0) continue;
        const double exact = std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * xi * xi);
        CHECK(std::abs(v[n] - exact) < 1e-8 * std::max(exact, 1e-3));
    }
}

TEST_CASE("carrier lattice picks up a plane wave") {
    const double carrier = 1.25;
    const GridSpec g({AxisSpec{8.0, 32, carrier}});
    const double xi0 = carrier + 3 * std::numbers::pi / 8.0;
    const Field f = Field::sample(g, [&](auto x) { return std::exp(cplx{0.0, xi0 * x[0]}); });
    const Field hat = forward_transform(f);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double expect = GridSpec::wave_index(n, 32) == 3 ? 16.0 : 0.0;
        CHECK(std::abs(std::abs(hat.values()[n]) - expect) < 1e-11);
    }
}

TEST_CASE("round trip and Plancherel on random fields") {
    std::mt19937_64 rng(7);
    for (double carrier : {0.0, 0.7}) {
        const GridSpec g({AxisSpec{2.0, 16, carrier}, AxisSpec{5.0, 8, 0.0}, AxisSpec{1.0, 4, -carrier}});
        const Field f = carlab::test::random_physical(g, rng);
        const Field hat = forward_transform(f);
        const Field back = inverse_transform(hat);
        CHECK(rel_l2(back.values(), f.values()) < 1e-12);
        double lhs = 0.0;
        for (auto z : hat.values()) lhs += std::norm(z);
        lhs *= g.frequency_cell_volume() / std::pow(2.0 * std::numbers::pi, 3);
        const double rhs = std::pow(lebesgue_norm(f, 2.0), 2);
        CHECK(std::abs(lhs - rhs) < 1e-10 * rhs);
    }
}

TEST_CASE("wrong side is a contract violation") {
    const GridSpec g = GridSpec::uniform(1, 1.0, 8);
    const Field f = Field::zeros(g, Side::frequency);
    CHECK_THROWS_AS(forward_transform(f), ContractViolation);
    CHECK_THROWS_AS(inverse_transform(Field::zeros(g, Side::physical)), ContractViolation);
    CHECK_THROWS_AS(out_of_band_fraction(Field::zeros(g, Side::physical)), ContractViolation);
}

TEST_CASE("norms of indicators and two-level functions") {
    // cells of 1/8 on [-1, 1)
    const GridSpec g = GridSpec::uniform(1, 1.0, 16);
    std::vector<cplx> v(16, 0.0);
    v[3] = v[4] = 1.0;
    const Field ind(g, Side::physical, v);
    CHECK(lebesgue_norm(ind, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lorentz_norm(ind, 2.0, LorentzIndex::infinity) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lorentz_norm(ind, 2.0, LorentzIndex::one) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lebesgue_norm(ind, kInfinity) == 1.0);

    // 3 on measure 1, 1 on measure 8
    const GridSpec h = GridSpec::uniform(1, 8.0, 16);
    std::vector<cplx> w(16, 0.0);
    w[0] = 3.0;
    for (int i = 1; i <= 8; ++i) w[i] = 1.0;
    const Field two(h, Side::physical, w);
    CHECK(lebesgue_norm(two, 3.0) == doctest::Approx(std::cbrt(35.0)).epsilon(1e-14));
    // sup of lambda |{|f| > lambda}|^{1/3}: 3 as lambda -> 3, 9^{1/3} as lambda -> 1
    CHECK(lorentz_norm(two, 3.0, LorentzIndex::infinity) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(lorentz_norm(two, 3.0, LorentzIndex::one) == doctest::Approx(1.0 * std::cbrt(9.0) + 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(lebesgue_norm(two, 0.5), ContractViolation);
}

TEST_CASE("lorentz nesting and brute-force distribution function") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pu(1.05, 6.0);
    std::uniform_int_distribution<int> logn(2, 5);
    double worst_brute = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = std::size_t{1} << logn(rng);
        const GridSpec g = GridSpec::uniform(1, 0.5 + trial % 7, n);
        const Field f = carlab::test::random_physical(g, rng);
        const double p = pu(rng);
        const double weak = lorentz_norm(f, p, LorentzIndex::infinity);
        const double strong = lebesgue_norm(f, p);
        const double one = lorentz_norm(f, p, LorentzIndex::one);
        CHECK(weak <= strong * (1 + 1e-12));
        CHECK(strong <= one * (1 + 1e-12));
        const auto mags = f.magnitudes();
        const auto [bw, bo] = brute_lorentz(mags, g.cell_volume(), p);
        worst_brute = std::max({worst_brute, std::abs(bw - weak) / weak, std::abs(bo - one) / one});
    }
    CHECK(worst_brute < 1e-9);
}

TEST_CASE("mixed norm against the Lorentz norm") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const GridSpec g = GridSpec::uniform(2, 2.0, 16);
        const Field f = carlab::test::random_physical(g, rng);
        const double p = 1.5 + 0.05 * trial;
        CHECK(lorentz_norm(f, p, LorentzIndex::infinity) <= mixed_norm(f, p) * (1 + 1e-12));
        CHECK(mixed_norm(f, p, LorentzIndex::one) <= lorentz_norm(f, p, LorentzIndex::one) * (1 + 1e-12));
    }
    // product of indicators: |A| |B| factorizes
    const GridSpec g = GridSpec::uniform(2, 1.0, 8);
    const Field box = Field::sample(g, [](auto x) {
        return cplx{(x[0] >= 0 && x[0] < 0.5 && x[1] >= -0.5 && x[1] < 0.5) ? 1.0 : 0.0};
    });
    CHECK(mixed_norm(box, 2.0) == doctest::Approx(std::sqrt(0.5 * 1.0)).epsilon(1e-14));
}

TEST_CASE("fourier interpolation reproduces trigonometric sums") {
    const GridSpec g({AxisSpec{3.0, 32, 0.0}, AxisSpec{4.0, 16, 1.25}});
    // a few exact lattice modes
    const std::vector<std::array<int, 3>> modes{{1, 2, 0}, {-5, 0, 1}, {7, -3, 2}};
    const std::vector<cplx> amps{{1.0, 0.5}, {-0.3, 0.2}, {0.1, -0.9}};
    auto eval = [&](double x, double y) {
        cplx s = 0.0;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const double kx = modes[m][0] * std::numbers::pi / 3.0;
            const double ky = 1.25 + modes[m][1] * std::numbers::pi / 4.0;
            s += amps[m] * std::exp(cplx{0.0, kx * x + ky * y});
        }
        return s;
    };
    const Field f = Field::sample(g, [&](auto x) { return eval(x[0], x[1]); });
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), uy(-4.0, 4.0);
    std::vector<double> pts;
    for (int i = 0; i < 200; ++i) {
        pts.push_back(ux(rng));
        pts.push_back(uy(rng));
    }
    const auto out = fourier_interpolate(f, pts);
    double worst = 0.0;
    for (std::size_t i = 0; i < 200; ++i)
        worst = std::max(worst, std::abs(out[0][i] - eval(pts[2 * i], pts[2 * i + 1])));
    CHECK(worst < 1e-10);
}

TEST_CASE("band fraction flags energy beyond half Nyquist") {
    const GridSpec g = GridSpec::uniform(1, 4.0, 32);
    const Field low = Field::sample_frequency(g, [](auto xi) { return cplx{std::abs(xi[0]) < 1.0 ? 1.0 : 0.0}; });
    CHECK(out_of_band_fraction(low) == 0.0);
    const Field high = Field::sample_frequency(g, [&](auto xi) {
        return cplx{std::abs(xi[0]) > 0.75 * g.nyquist(0) ? 1.0 : 0.0};
    });
    CHECK(out_of_band_fraction(high) == doctest::Approx(1.0));
}

TEST_CASE("field serialization round trip") {
    std::mt19937_64 rng(1);
    const GridSpec g({AxisSpec{2.0, 8, 0.5}, AxisSpec{1.0, 4, 0.0}});
    const Field f = carlab::test::random_physical(g, rng);
    std::stringstream ss;
    write_field(ss, f);
    const Field back = read_field(ss);
    CHECK(back.spec() == g);
    CHECK(back.side() == Side::physical);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.values()[i] == f.values()[i]);
    std::stringstream bad("not a field");
    CHECK_THROWS_AS(read_field(bad), IoError);
}

}
