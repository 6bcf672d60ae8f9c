#include "carlab/operators.hpp"

#include "carlab/cutoffs.hpp"
#include "carlab/errors.hpp"
#include "detail/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace carlab {

namespace {

using detail::for_each_frequency;
using detail::for_each_position;

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// Multiplies every component of a spectrum by a scalar function of xi.
template <typename Fn>
Field scale_spectrum(const Field& spectrum, Fn fn) {
    std::vector<std::vector<cplx>> out;
    for (std::size_t c = 0; c < spectrum.components(); ++c) {
        auto v = spectrum.values(c);
        out.emplace_back(v.begin(), v.end());
    }
    for_each_frequency(spectrum.spec(), [&](std::size_t i, std::span<const double> xi) {
        const cplx m = fn(xi);
        for (auto& comp : out) comp[i] *= m;
    });
    return spectrum.with_components(std::move(out));
}

double l2(const std::vector<cplx>& a, double cell) {
    long double s = 0.0L;
    for (const auto& z : a) s += std::norm(z);
    return std::sqrt(static_cast<double>(s * cell));
}

}  // namespace

Field multiply_spectrum(const Symbol& s, const Field& spectrum) {
    if (spectrum.side() != Side::frequency) throw ContractViolation("multiply_spectrum expects a spectrum");
    if (s.dim() != spectrum.spec().dim()) throw ContractViolation("symbol and grid dimensions differ");
    if (!s.is_matrix()) return scale_spectrum(spectrum, [&](std::span<const double> xi) { return s.eval(xi); });
    if (spectrum.components() != 2) throw ContractViolation("matrix symbol needs a two-component field");
    auto u0 = spectrum.values(0);
    auto u1 = spectrum.values(1);
    std::vector<cplx> o0(u0.size()), o1(u1.size());
    for_each_frequency(spectrum.spec(), [&](std::size_t i, std::span<const double> xi) {
        const Mat2 m = s.eval_matrix(xi);
        o0[i] = m(0, 0) * u0[i] + m(0, 1) * u1[i];
        o1[i] = m(1, 0) * u0[i] + m(1, 1) * u1[i];
    });
    return spectrum.with_components({std::move(o0), std::move(o1)});
}

Field apply_multiplier(const Symbol& s, const Field& f, const ApplyOptions& options) {
    const Field out = multiply_spectrum(s, forward_transform(f));
    if (options.band_tolerance >= 0.0) {
        const double frac = out_of_band_fraction(out);
        if (frac > options.band_tolerance)
            throw ResolutionError(s.name() + ": output spectrum has energy fraction " + std::to_string(frac) +
                                  " beyond half Nyquist on " + f.spec().describe());
    }
    return inverse_transform(out);
}

Field partial_derivative(const Field& f, std::size_t axis) {
    if (axis >= f.spec().dim()) throw ContractViolation("partial_derivative: axis out of range");
    const Field g = scale_spectrum(forward_transform(f),
                                   [&](std::span<const double> xi) { return kI * xi[axis]; });
    return inverse_transform(g);
}

Field negative_laplacian(const Field& f) {
    return apply_multiplier(Symbol::laplacian(f.spec().dim()), f, {.band_tolerance = -1.0});
}

Field conjugated_laplacian(std::span<const double> v, const Field& u) {
    const auto& spec = u.spec();
    if (v.size() != spec.dim()) throw ContractViolation("conjugated_laplacian: v has the wrong dimension");
    // Support margin: the outer tenth of the box on every axis must be empty.
    const auto mag = u.magnitudes();
    const double peak = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
    double edge = 0.0;
    for_each_position(spec, [&](std::size_t i, std::span<const double> x) {
        for (std::size_t a = 0; a < spec.dim(); ++a)
            if (std::abs(x[a]) > 0.9 * spec.axis(a).half_width) {
                edge = std::max(edge, mag[i]);
                break;
            }
    });
    if (edge > 1e-10 * peak) throw SupportError("conjugated_laplacian: field reaches the box boundary");
    return apply_multiplier(Symbol::conjugated_laplacian(std::vector<double>(v.begin(), v.end())), u);
}

double conjugation_residual(std::span<const double> v, const Field& u, double window) {
    const Field direct = conjugated_laplacian(v, u);
    const auto& spec = u.spec();
    auto weight = [&](std::span<const double> x, double sgn) -> double {
        double r2 = 0.0, vx = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            r2 += x[a] * x[a];
            vx += v[a] * x[a];
        }
        return r2 <= window * window ? std::exp(sgn * vx) : 0.0;
    };
    auto in = u.values();
    std::vector<cplx> w(in.size());
    for_each_position(spec, [&](std::size_t i, std::span<const double> x) { w[i] = weight(x, -1.0) * in[i]; });
    const Field lap = negative_laplacian(Field(spec, Side::physical, std::move(w)));
    auto lv = lap.values();
    auto dv = direct.values();
    std::vector<cplx> diff(in.size());
    for_each_position(spec, [&](std::size_t i, std::span<const double> x) {
        diff[i] = dv[i] - weight(x, 1.0) * lv[i];
    });
    const double cell = spec.cell_volume();
    return l2(diff, cell) / lebesgue_norm(u, 2.0);
}

Field dirac_apply(int sign, const Field& u) {
    if (u.spec().dim() != 2) throw ContractViolation("dirac_apply requires d = 2");
    if (u.components() != 2) throw ContractViolation("dirac_apply requires a two-component field");
    if (sign != 1 && sign != -1) throw ContractViolation("dirac_apply: sign must be +1 or -1");
    const Field spec_u = forward_transform(u);
    auto a = spec_u.values(0);
    auto b = spec_u.values(1);
    std::vector<cplx> o0(a.size()), o1(a.size());
    const double s = sign;
    for_each_frequency(u.spec(), [&](std::size_t i, std::span<const double> xi) {
        o0[i] = cplx{xi[0], -s * xi[1]} * b[i];
        o1[i] = cplx{xi[0], s * xi[1]} * a[i];
    });
    return inverse_transform(spec_u.with_components({std::move(o0), std::move(o1)}));
}

// ---------------------------------------------------------------------------
// Littlewood-Paley

std::pair<int, int> littlewood_paley_bands(const GridSpec& spec) {
    const std::size_t t = spec.dim() - 1;
    double lo = kInfinity, hi = 0.0;
    for (std::size_t n = 0; n < spec.axis(t).samples; ++n) {
        const double tau = std::abs(spec.frequency(t, n));
        if (tau == 0.0) continue;
        lo = std::min(lo, tau);
        hi = std::max(hi, tau);
    }
    if (!(hi > 0.0)) return {0, -1};
    return {static_cast<int>(std::floor(std::log2(lo))) - 2, static_cast<int>(std::ceil(std::log2(hi))) + 2};
}

std::pair<double, double> littlewood_paley_bounds(const GridSpec& spec) {
    const std::size_t t = spec.dim() - 1;
    const auto [j0, j1] = littlewood_paley_bands(spec);
    double lo = kInfinity, hi = 0.0;
    for (std::size_t n = 0; n < spec.axis(t).samples; ++n) {
        const double tau = spec.frequency(t, n);
        if (tau == 0.0) continue;
        double s = 0.0;
        for (int j = j0; j <= j1; ++j) {
            const double b = cutoffs::psi_bar(std::ldexp(tau, -j));
            s += b * b;
        }
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {lo, hi};
}

Field littlewood_paley_sf(const Field& f) {
    const auto& spec = f.spec();
    const std::size_t t = spec.dim() - 1;
    const Field fh = forward_transform(f);
    const auto [j0, j1] = littlewood_paley_bands(spec);
    std::vector<double> acc(spec.size(), 0.0);
    for (int j = j0; j <= j1; ++j) {
        const Field band = scale_spectrum(fh, [&](std::span<const double> xi) {
            return cplx{cutoffs::psi_bar(std::ldexp(xi[t], -j)), 0.0};
        });
        const auto mag = inverse_transform(band).magnitudes();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += mag[i] * mag[i];
    }
    std::vector<cplx> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = std::sqrt(acc[i]);
    return Field(spec, Side::physical, std::move(out));
}

// ---------------------------------------------------------------------------
// Sphere extension

cplx sphere_extension(std::span<const double> y, int m) {
    if (m < 0) throw ContractViolation("sphere_extension: m must be >= 0");
    if (y.size() != static_cast<std::size_t>(m) + 1) throw ContractViolation("sphere_extension: y must lie in R^{m+1}");
    double r2 = 0.0;
    for (double c : y) r2 += c * c;
    const double r = std::sqrt(r2);
    switch (m) {
        case 0: return 2.0 * std::cos(y[0]);
        case 1: return 2.0 * kPi * std::cyl_bessel_j(0.0, r);
        case 2: return r == 0.0 ? 4.0 * kPi : 4.0 * kPi * std::sin(r) / r;
        default: break;
    }
    const double half = 0.5 * (m + 1);
    if (r == 0.0) return 2.0 * std::pow(kPi, half) / std::tgamma(half);
    const double nu = 0.5 * (m - 1);
    return std::pow(2.0 * kPi, half) * std::pow(r, -nu) * std::cyl_bessel_j(nu, r);
}

// ---------------------------------------------------------------------------
// Restriction-extension, d = 3

std::size_t restriction_min_order(const GridSpec& spec) {
    const double radius = std::hypot(spec.axis(0).half_width, spec.axis(1).half_width);
    return static_cast<std::size_t>(std::ceil(2.0 * radius)) + 16;
}

Field restriction_extension(const Field& f, const RestrictionOptions& options) {
    const auto& spec = f.spec();
    if (spec.dim() != 3) throw ContractViolation("restriction_extension requires d = 3");
    if (f.side() != Side::physical || f.components() != 1)
        throw ContractViolation("restriction_extension expects a scalar physical field");
    const std::size_t min_order = restriction_min_order(spec);
    std::size_t order = options.angular_nodes == 0 ? min_order : options.angular_nodes;
    if (order < min_order)
        throw QuadratureError("restriction_extension: " + std::to_string(order) + " angular nodes, need at least " +
                              std::to_string(min_order));

    const std::size_t n1 = spec.axis(0).samples, n2 = spec.axis(1).samples, nt = spec.axis(2).samples;
    const GridSpec tspec({spec.axis(2)});
    const double ycell = spec.spacing(0) * spec.spacing(1);

    // Transform in t only: ft[(i1*n2 + i2)*nt + k].
    std::vector<cplx> ft(spec.size());
    auto in = f.values();
    for (std::size_t row = 0; row < n1 * n2; ++row) {
        std::vector<cplx> line(in.begin() + static_cast<std::ptrdiff_t>(row * nt),
                               in.begin() + static_cast<std::ptrdiff_t>((row + 1) * nt));
        const Field th = forward_transform(Field(tspec, Side::physical, std::move(line)));
        std::copy(th.values().begin(), th.values().end(), ft.begin() + static_cast<std::ptrdiff_t>(row * nt));
    }

    std::vector<double> y1(n1), y2(n2);
    for (std::size_t i = 0; i < n1; ++i) y1[i] = spec.position(0, i);
    for (std::size_t i = 0; i < n2; ++i) y2[i] = spec.position(1, i);

    std::vector<cplx> gt(spec.size(), cplx{0.0, 0.0});
    std::vector<cplx> e1(n1), e2(n2), slice(n1 * n2), h(n1 * n2);
    const double wq = 2.0 * kPi / static_cast<double>(order);
    for (std::size_t k = 0; k < nt; ++k) {
        const double tau = tspec.frequency(0, k);
        const double cut = cutoffs::psi(tau);
        if (cut == 0.0) continue;
        for (std::size_t row = 0; row < n1 * n2; ++row) slice[row] = ft[row * nt + k];
        std::fill(h.begin(), h.end(), cplx{0.0, 0.0});
        for (std::size_t m = 0; m < order; ++m) {
            const double th = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(order);
            const double c = std::cos(th), s = std::sin(th);
            for (std::size_t i = 0; i < n1; ++i) e1[i] = std::polar(1.0, -y1[i] * c);
            for (std::size_t i = 0; i < n2; ++i) e2[i] = std::polar(1.0, -y2[i] * s);
            // f^(phi_m, tau_k) by direct Riemann sum in y.
            cplx fhat{0.0, 0.0};
            for (std::size_t i = 0; i < n1; ++i) {
                cplx inner{0.0, 0.0};
                const cplx* row = slice.data() + i * n2;
                for (std::size_t j = 0; j < n2; ++j) inner += e2[j] * row[j];
                fhat += e1[i] * inner;
            }
            fhat *= ycell * wq;
            for (std::size_t i = 0; i < n1; ++i) {
                const cplx a = fhat * std::conj(e1[i]);
                cplx* out = h.data() + i * n2;
                for (std::size_t j = 0; j < n2; ++j) out[j] += a * std::conj(e2[j]);
            }
        }
        for (std::size_t row = 0; row < n1 * n2; ++row) gt[row * nt + k] = cut * h[row];
    }

    // int ... e^{i t tau} dtau = 2 pi F_t^{-1}.
    std::vector<cplx> out(spec.size());
    for (std::size_t row = 0; row < n1 * n2; ++row) {
        std::vector<cplx> line(gt.begin() + static_cast<std::ptrdiff_t>(row * nt),
                               gt.begin() + static_cast<std::ptrdiff_t>((row + 1) * nt));
        const Field tx = inverse_transform(Field(tspec, Side::frequency, std::move(line)));
        auto v = tx.values();
        for (std::size_t k = 0; k < nt; ++k) out[row * nt + k] = 2.0 * kPi * v[k];
    }
    return Field(spec, Side::physical, std::move(out));
}

OperatorReport operator_report(const Symbol& s, const Field& f, double p, double q, const ApplyOptions& options) {
    OperatorReport r;
    r.symbol = s.name();
    r.d = s.dim();
    r.eps = s.params().eps;
    r.k = s.params().k;
    r.p = p;
    r.q = q;
    r.in_norm = lebesgue_norm(f, p);
    if (!(r.in_norm > 0.0)) throw ContractViolation("operator_report: zero input norm");
    r.out_norm = lebesgue_norm(apply_multiplier(s, f, options), q);
    r.ratio = r.out_norm / r.in_norm;
    r.grid = f.spec().describe();
    return r;
}

}  // namespace carlab
