#include "carlab/sharpness.hpp"

#include "carlab/cutoffs.hpp"
#include "carlab/errors.hpp"
#include "carlab/operators.hpp"
#include "detail/walk.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace carlab {

namespace {

using detail::for_each_frequency;
using detail::for_each_position;

constexpr double kPi = std::numbers::pi;

double exponent_of(const Rational& r) {
    const double v = to_double(r);
    return v == 0.0 ? kInfinity : 1.0 / v;
}

std::size_t pow2_at_least(double n) {
    std::size_t p = 4;
    while (static_cast<double>(p) < n) p *= 2;
    return p;
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 0.5)) throw ContractViolation("eps must lie in (0, 1/2]");
    if (eps < std::ldexp(1.0, -8)) throw ResolutionError("eps below 2^-8 is not resolvable on the lattice");
}

AxisSpec knapp_axis(double freq_half_width, double carrier, const KnappOptions& o) {
    return {o.alpha * kPi / freq_half_width, o.samples, carrier};
}

Field knapp_profile(std::size_t d, double eps, const KnappOptions& o) {
    std::vector<AxisSpec> axes;
    const double transverse = std::sqrt(eps) / (10.0 * static_cast<double>(d));
    for (std::size_t j = 0; j + 2 < d; ++j) axes.push_back(knapp_axis(transverse, 0.0, o));
    axes.push_back(knapp_axis(eps, 1.0, o));
    axes.push_back(knapp_axis(0.75, 1.25, o));
    const GridSpec grid(std::move(axes));
    const Field spectrum = Field::sample_frequency(grid, [&](std::span<const double> xi) -> cplx {
        double v = cutoffs::psi(std::abs(xi[d - 1]));
        if (v == 0.0) return 0.0;
        v *= cutoffs::phi((xi[d - 2] - 1.0) / eps);
        for (std::size_t j = 0; j + 2 < d && v != 0.0; ++j) v *= cutoffs::phi(xi[j] / transverse);
        return v;
    });
    return inverse_transform(spectrum);
}

Field radial_profile(std::size_t y_dims, double delta, double eps, const RadialOptions& o) {
    if (!(delta >= 1.0 / 32.0 && delta <= 0.125)) throw ContractViolation("radial: delta must lie in [1/32, 1/8]");
    const double band = 1.0 + 2.0 * delta;
    const double target = std::max(o.min_half_width, o.eps_box / eps);
    const std::size_t n = pow2_at_least(4.0 * band * target / kPi);
    if (std::pow(static_cast<double>(n), static_cast<double>(y_dims)) * static_cast<double>(o.t_samples) > 6.0e7)
        throw ResolutionError("radial: grid for eps = " + std::to_string(eps) + " exceeds the memory budget");
    const double L = static_cast<double>(n) * kPi / (4.0 * band);
    std::vector<AxisSpec> axes(y_dims, AxisSpec{L, n, 0.0});
    // Nyquist 4 delta on the time axis, twice the support half-width.
    const double lt = static_cast<double>(o.t_samples) * kPi / (8.0 * delta);
    axes.push_back({lt, o.t_samples, 1.0});
    const GridSpec grid(std::move(axes));
    const Field spectrum = Field::sample_frequency(grid, [&](std::span<const double> xi) -> cplx {
        const double ct = cutoffs::chi0(xi[y_dims], delta);
        if (ct == 0.0) return 0.0;
        double r2 = 0.0;
        for (std::size_t a = 0; a < y_dims; ++a) r2 += xi[a] * xi[a];
        return ct * cutoffs::chi0(std::sqrt(r2), delta);
    });
    return inverse_transform(spectrum);
}

double ratio_of(const Symbol& s, const Field& f, const ExponentPoint& p, double* in = nullptr,
                double* out = nullptr, Field* keep = nullptr) {
    const double pin = exponent_of(p.x), qout = exponent_of(p.y);
    const double a = lebesgue_norm(f, pin);
    if (!(a > 0.0)) throw ContractViolation("ratio: input field has zero norm");
    Field g = apply_multiplier(s, f);
    const double b = lebesgue_norm(g, qout);
    if (in) *in = a;
    if (out) *out = b;
    if (keep) *keep = std::move(g);
    double r = b / a;
    if (is_rescaled(s)) r *= std::pow(s.params().eps, to_double(p.x - p.y));
    return r;
}

Field add_scaled(const Field& f, const Field& g, double t) {
    std::vector<std::vector<cplx>> comps;
    for (std::size_t c = 0; c < f.components(); ++c) {
        auto a = f.values(c);
        auto b = g.values(c);
        std::vector<cplx> v(a.begin(), a.end());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += t * b[i];
        comps.push_back(std::move(v));
    }
    return f.with_components(std::move(comps));
}

double l2_norm(const Field& f) { return lebesgue_norm(f, 2.0); }

}  // namespace

std::string family_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::knapp_laplace: return "knapp-laplace";
        case FamilyKind::radial_focus: return "radial-focus";
        case FamilyKind::knapp_heat: return "knapp-heat";
        case FamilyKind::radial_heat: return "radial-heat";
        case FamilyKind::knapp_dirac: return "knapp-dirac";
    }
    return "unknown";
}

FamilyKind parse_family(const std::string& name) {
    for (auto k : {FamilyKind::knapp_laplace, FamilyKind::radial_focus, FamilyKind::knapp_heat,
                   FamilyKind::radial_heat, FamilyKind::knapp_dirac})
        if (family_name(k) == name) return k;
    throw ContractViolation("unknown family: " + name);
}

TestFamily build_knapp(std::size_t d, double eps, const KnappOptions& options) {
    if (d != 2 && d != 3) throw ContractViolation("knapp: d must be 2 or 3");
    check_eps(eps);
    return {FamilyKind::knapp_laplace, d, eps, 0.0, knapp_profile(d, eps, options), Symbol::imag_part(d, eps),
            NormPairing::direct, Regime::laplace};
}

TestFamily build_knapp_heat(double eps, const KnappOptions& options) {
    check_eps(eps);
    return {FamilyKind::knapp_heat, 1, eps, 0.0, knapp_profile(2, eps, options), Symbol::heat_imag(1, eps),
            NormPairing::direct, Regime::heat};
}

TestFamily build_knapp_dirac(double eps, double angle, const KnappOptions& options) {
    check_eps(eps);
    const Field scalar = knapp_profile(2, eps, options);
    // sigma.(1, i) annihilates the upper slot, so the profile goes in the lower one.
    auto v = scalar.values(0);
    std::vector<std::vector<cplx>> comps{std::vector<cplx>(v.size(), cplx{}), std::vector<cplx>(v.begin(), v.end())};
    return {FamilyKind::knapp_dirac, 2, eps, 0.0, scalar.with_components(std::move(comps)),
            Symbol::dirac_piece(angle, eps), NormPairing::direct, Regime::laplace};
}

TestFamily build_radial(std::size_t d, double delta, double eps, const RadialOptions& options) {
    if (d != 3) throw ContractViolation("radial: only d = 3 is supported");
    check_eps(eps);
    return {FamilyKind::radial_focus, d, eps, delta, radial_profile(d - 1, delta, eps, options),
            Symbol::imag_part(d, eps), NormPairing::dual, Regime::laplace};
}

TestFamily build_radial_heat(double delta, double eps, const RadialOptions& options) {
    check_eps(eps);
    return {FamilyKind::radial_heat, 1, eps, delta, radial_profile(1, delta, eps, options),
            Symbol::heat_imag(1, eps), NormPairing::dual, Regime::heat};
}

bool is_rescaled(const Symbol& s) {
    switch (s.kind()) {
        case SymbolKind::rescaled_piece:
        case SymbolKind::shell_piece:
        case SymbolKind::imag_part:
        case SymbolKind::dirac_piece:
        case SymbolKind::heat_imag: return true;
        default: return false;
    }
}

Measurement measure(const TestFamily& family, const Symbol& s, const ExponentPoint& p, bool keep_output) {
    if (s.dim() != family.f.spec().dim()) throw ContractViolation("measure: symbol and grid dimensions differ");
    const ExponentPoint np = family.pairing == NormPairing::dual ? dual(p) : p;
    Measurement m;
    Field out = Field::zeros(GridSpec::uniform(1, 1.0, 4), Side::physical);
    m.record.ratio = ratio_of(s, family.f, np, &m.in_norm, &m.out_norm, keep_output ? &out : nullptr);
    if (keep_output) m.output = std::move(out);
    m.record.family = family_name(family.kind);
    m.record.symbol = s.name();
    m.record.d = family.d;
    m.record.point = p;
    m.record.eps = family.eps;
    const auto e = predicted_exponents(family.regime, static_cast<int>(family.d), p);
    m.record.predicted_exp = to_double(family.pairing == NormPairing::dual ? e.e2 : e.e1);
    m.record.grid = family.f.spec().describe();
    return m;
}

SweepRecord measure_lower_bound(const TestFamily& family, const Symbol& s, const ExponentPoint& p) {
    return measure(family, s, p).record;
}

SweepRecord measure_lower_bound(const TestFamily& family, const ExponentPoint& p) {
    return measure(family, family.symbol, p).record;
}

double knapp_box_minimum(const TestFamily& family, const Field& output, double c) {
    const GridSpec& g = output.spec();
    const std::size_t n = g.dim();
    std::vector<double> bound(n, c / std::sqrt(family.eps));
    bound[n - 2] = c / family.eps;
    bound[n - 1] = c;
    const auto mags = output.magnitudes();
    double lo = kInfinity;
    for_each_position(g, [&](std::size_t i, std::span<const double> x) {
        for (std::size_t a = 0; a < n; ++a)
            if (std::abs(x[a]) > bound[a]) return;
        lo = std::min(lo, mags[i]);
    });
    return lo;
}

std::optional<double> radial_shell_minimum(const TestFamily& family, const Field& output, double c) {
    const GridSpec& g = output.spec();
    const std::size_t n = g.dim();
    const double sphere_dim = static_cast<double>(n) - 2.0;
    const double offset = sphere_dim * kPi / 4.0;
    const auto mags = output.magnitudes();
    double lo = kInfinity;
    bool any = false;
    for_each_position(g, [&](std::size_t i, std::span<const double> x) {
        if (std::abs(x[n - 1]) > c) return;
        double r2 = 0.0;
        for (std::size_t a = 0; a + 1 < n; ++a) r2 += x[a] * x[a];
        const double s = std::sqrt(r2) - offset;
        if (s < c / family.eps || s > 2.0 * c / family.eps) return;
        const double phase = s - 2.0 * kPi * std::round(s / (2.0 * kPi));
        if (std::abs(phase) > family.delta) return;
        any = true;
        lo = std::min(lo, mags[i]);
    });
    if (!any) return std::nullopt;
    return lo;
}

SlopeFit fit_slope(std::span<const double> eps, std::span<const double> values) {
    if (eps.size() != values.size() || eps.size() < 4) throw ContractViolation("fit_slope: need at least four matching samples");
    const std::size_t n = eps.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(eps[i] > 0.0) || !(values[i] > 0.0)) throw ContractViolation("fit_slope: samples must be positive");
        lx[i] = std::log(eps[i]);
        ly[i] = std::log(values[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double nn = static_cast<double>(n);
    const double den = nn * sxx - sx * sx;
    if (!(std::abs(den) > 1e-300)) throw ContractViolation("fit_slope: eps values must be distinct");
    SlopeFit fit;
    fit.slope = (nn * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / nn;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - fit.intercept - fit.slope * lx[i];
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / nn);
    fit.points = n;
    return fit;
}

SlopeFit fit_slope(const std::vector<SweepRecord>& records) {
    std::vector<double> e, v;
    for (const auto& r : records) {
        e.push_back(r.eps);
        v.push_back(r.ratio);
    }
    return fit_slope(e, v);
}

double approx_identity(double a, double lambda, const std::function<double(double)>& phi) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ContractViolation("approx_identity: a must be positive");
    if (!(lambda > 0.0 && lambda < 1.0)) throw ContractViolation("approx_identity: lambda must lie in (0, 1)");
    const double c = lambda * lambda, w = a * lambda;
    auto g = [&](double t) {
        const double u = t - c;
        return w / (u * u + w * w) * phi(t);
    };
    using boost::math::quadrature::gauss_kronrod;
    const double cuts[] = {-kInfinity, c - 256.0 * w, c - w, c, c + w, c + 256.0 * w, kInfinity};
    double total = 0.0, err_total = 0.0, l1_total = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) {
        double err = 0.0, l1 = 0.0;
        total += gauss_kronrod<double, 31>::integrate(g, cuts[i], cuts[i + 1], 20, 1e-12, &err, &l1);
        err_total += err;
        l1_total += l1;
    }
    if (!std::isfinite(total) || err_total > 1e-8 * std::max(l1_total, 1e-300))
        throw QuadratureError("approx_identity: quadrature did not converge");
    return total;
}

double scaling_transfer_residual(const TestFamily& family, const ExponentPoint& p) {
    if (family.kind != FamilyKind::knapp_laplace) throw ContractViolation("scaling transfer needs a Laplace Knapp family");
    const double eps = family.eps;
    const GridSpec& g = family.f.spec();
    std::vector<AxisSpec> axes(g.axes().begin(), g.axes().end());
    axes.back().half_width /= eps;
    axes.back().carrier *= eps;
    const GridSpec stretched(std::move(axes));
    std::vector<std::vector<cplx>> comps;
    for (std::size_t c = 0; c < family.f.components(); ++c) {
        auto v = family.f.values(c);
        comps.emplace_back(v.begin(), v.end());
    }
    const Field f2(stretched, Side::physical, std::move(comps));
    const double r_rescaled = ratio_of(Symbol::rescaled_piece(family.d, eps), family.f, p);
    const double r_direct = ratio_of(Symbol::dyadic_piece(family.d, eps), f2, p);
    return std::abs(r_direct - r_rescaled) / r_rescaled;
}

double heat_kernel_constant(std::size_t d_space, double sigma, int j, const HeatKernelOptions& options) {
    if (d_space < 1 || d_space > 2) throw ContractViolation("heat kernel: d must be 1 or 2");
    if (j < 0 || j > 8) throw ContractViolation("heat kernel: j must lie in [0, 8]");
    if (sigma != 0.0 && sigma != 1.0) throw ContractViolation("heat kernel: sigma must be 0 or 1");
    const double xs = std::pow(2.0, -0.5 * j);
    const double ts = std::ldexp(1.0, -j);
    const std::size_t n = options.samples;
    std::vector<AxisSpec> axes(d_space, AxisSpec{options.box * xs, n, 0.0});
    axes.push_back({options.box * ts, 2 * n, 0.0});
    const GridSpec grid(std::move(axes));
    const Symbol s = Symbol::heat_dyadic(d_space, sigma, j);
    const Field spectrum = Field::sample_frequency(grid, [&](std::span<const double> xi) { return s.eval(xi); });
    if (out_of_band_fraction(spectrum) > kDefaultBandTolerance)
        throw ResolutionError("heat kernel: symbol exceeds the half band");
    const Field k = inverse_transform(spectrum);
    const auto v = k.values(0);
    const double half_x = 0.5 * options.box * xs, half_t = 0.5 * options.box * ts;
    const double norm = std::pow(2.0, 0.5 * static_cast<double>(d_space) * j);
    double best = 0.0;
    for_each_position(grid, [&](std::size_t i, std::span<const double> x) {
        double ax = 0.0;
        for (std::size_t a = 0; a < d_space; ++a) {
            if (std::abs(x[a]) > half_x) return;
            ax += x[a] * x[a];
        }
        if (std::abs(x[d_space]) > half_t) return;
        const double w = 1.0 + std::sqrt(ax) / xs + std::abs(x[d_space]) / ts;
        best = std::max(best, std::abs(v[i]) * w * w * w / norm);
    });
    return best;
}

Field random_band_limited(const GridSpec& grid, std::uint64_t seed, std::size_t packets) {
    return random_band_limited(grid, seed, packets, 1);
}

Field random_band_limited(const GridSpec& grid, std::uint64_t seed, std::size_t packets, std::size_t components) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> gauss;
    const std::size_t d = grid.dim();
    std::vector<std::vector<cplx>> comps;
    for (std::size_t c = 0; c < components; ++c) {
        std::vector<cplx> spec(grid.size());
        for (std::size_t k = 0; k < packets; ++k) {
            std::vector<double> centre(d), width(d);
            for (std::size_t a = 0; a < d; ++a) {
                centre[a] = grid.axis(a).carrier + 0.25 * grid.nyquist(a) * uni(rng);
                width[a] = grid.nyquist(a) / 16.0;
            }
            const cplx amp{gauss(rng), gauss(rng)};
            for_each_frequency(grid, [&](std::size_t i, std::span<const double> xi) {
                double e = 0.0;
                for (std::size_t a = 0; a < d; ++a) {
                    const double off = xi[a] - grid.axis(a).carrier;
                    if (std::abs(off) > 0.5 * grid.nyquist(a)) return;
                    const double u = (xi[a] - centre[a]) / width[a];
                    e += u * u;
                }
                spec[i] += amp * std::exp(-0.5 * e);
            });
        }
        comps.push_back(std::move(spec));
    }
    return inverse_transform(Field(grid, Side::frequency, std::move(comps)));
}

Field random_shell_input(const GridSpec& grid, std::uint64_t seed, std::size_t packets) {
    if (grid.dim() != 3) throw ContractViolation("random_shell_input: d must be 3");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss;
    std::vector<cplx> spec(grid.size());
    const double width = 0.1;
    for (std::size_t k = 0; k < packets; ++k) {
        const double r = 0.85 + 0.3 * uni(rng), th = 2.0 * kPi * uni(rng);
        const double centre[3] = {r * std::cos(th), r * std::sin(th), 0.7 + 1.1 * uni(rng)};
        const cplx amp{gauss(rng), gauss(rng)};
        for_each_frequency(grid, [&](std::size_t i, std::span<const double> xi) {
            double e = 0.0;
            for (std::size_t a = 0; a < 3; ++a) {
                if (std::abs(xi[a] - grid.axis(a).carrier) > 0.5 * grid.nyquist(a)) return;
                const double u = (xi[a] - centre[a]) / width;
                e += u * u;
            }
            if (e < 800.0) spec[i] += amp * std::exp(-0.5 * e);
        });
    }
    return inverse_transform(Field(grid, Side::frequency, std::move(spec)));
}

AscentResult random_ascent(const Symbol& s, const ExponentPoint& p, const GridSpec& grid, const AscentOptions& options) {
    if (s.dim() != grid.dim()) throw ContractViolation("random_ascent: symbol and grid dimensions differ");
    const std::size_t comps = s.is_matrix() ? 2 : 1;
    std::mt19937_64 rng(options.seed);
    Field f = options.start ? *options.start : random_band_limited(grid, rng(), 4, comps);
    if (!(f.spec() == grid) || f.components() != comps || f.side() != Side::physical)
        throw ContractViolation("random_ascent: start field does not match the grid");
    double best = ratio_of(s, f, p);
    double step = options.step;
    for (std::size_t it = 0; it < options.iterations; ++it) {
        const Field pert = random_band_limited(grid, rng(), 2, comps);
        const double scale = step * l2_norm(f) / l2_norm(pert);
        const Field g = add_scaled(f, pert, scale);
        double r = 0.0;
        try {
            r = ratio_of(s, g, p);
        } catch (const ContractViolation&) {
            r = 0.0;
        }
        if (r > best) {
            best = r;
            f = g;
            step = std::min(step * 1.5, 2.0);
        } else {
            step = std::max(step * 0.6, 1e-4);
        }
    }
    return {best, f};
}

}  // namespace carlab
