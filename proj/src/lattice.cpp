#include "carlab/lattice.hpp"

#include "carlab/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace carlab {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// In-place unnormalized multidimensional DFT. sign = FFTW_FORWARD or FFTW_BACKWARD.
void fft_inplace(std::span<cplx> data, std::span<const std::size_t> dims, int sign) {
    std::vector<int> n(dims.begin(), dims.end());
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), ptr, ptr, sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw Error("fft", "FFTW failed to create a plan");
    fftw_execute_dft(plan, ptr, ptr);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Calls fn(flat, factor) where factor is the product over axes of the
// per-axis table entries for the element's multi-index.
template <typename Fn>
void for_each_separable(const GridSpec& spec, const std::vector<std::vector<cplx>>& tables, Fn fn) {
    const std::size_t d = spec.dim();
    std::vector<std::size_t> idx(d, 0);
    std::vector<cplx> partial(d + 1, cplx{1.0, 0.0});
    for (std::size_t a = 0; a < d; ++a) partial[a + 1] = partial[a] * tables[a][0];
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        fn(flat, partial[d]);
        // Advance the multi-index, last axis fastest.
        std::size_t a = d;
        while (a > 0) {
            --a;
            if (++idx[a] < spec.axis(a).samples) break;
            idx[a] = 0;
        }
        for (std::size_t b = a; b < d; ++b) partial[b + 1] = partial[b] * tables[b][idx[b]];
    }
}

std::vector<std::size_t> dims_of(const GridSpec& spec) {
    std::vector<std::size_t> dims;
    for (const auto& ax : spec.axes()) dims.push_back(ax.samples);
    return dims;
}

}  // namespace

// ---------------------------------------------------------------------------
// GridSpec

GridSpec::GridSpec(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw ContractViolation("GridSpec needs at least one axis");
    for (const auto& ax : axes_) {
        if (ax.samples < 4 || !is_power_of_two(ax.samples))
            throw ContractViolation("GridSpec: samples per axis must be a power of two >= 4");
        if (!(ax.half_width > 0.0) || !std::isfinite(ax.half_width))
            throw ContractViolation("GridSpec: half width must be positive and finite");
        if (!std::isfinite(ax.carrier)) throw ContractViolation("GridSpec: carrier must be finite");
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t a = axes_.size() - 1; a > 0; --a) strides_[a - 1] = strides_[a] * axes_[a].samples;
    size_ = strides_[0] * axes_[0].samples;
}

GridSpec GridSpec::uniform(std::size_t dim, double half_width, std::size_t samples) {
    return GridSpec(std::vector<AxisSpec>(dim, AxisSpec{half_width, samples, 0.0}));
}

double GridSpec::spacing(std::size_t a) const {
    const auto& ax = axis(a);
    return 2.0 * ax.half_width / static_cast<double>(ax.samples);
}

double GridSpec::frequency_spacing(std::size_t a) const { return kPi / axis(a).half_width; }

double GridSpec::nyquist(std::size_t a) const {
    return static_cast<double>(axis(a).samples) * kPi / (2.0 * axis(a).half_width);
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < dim(); ++a) v *= spacing(a);
    return v;
}

double GridSpec::frequency_cell_volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < dim(); ++a) v *= frequency_spacing(a);
    return v;
}

double GridSpec::position(std::size_t a, std::size_t n) const {
    return -axis(a).half_width + static_cast<double>(n) * spacing(a);
}

long long GridSpec::wave_index(std::size_t n, std::size_t samples) {
    const auto k = static_cast<long long>(n);
    const auto half = static_cast<long long>(samples / 2);
    return k < half ? k : k - static_cast<long long>(samples);
}

double GridSpec::frequency(std::size_t a, std::size_t n) const {
    const auto& ax = axis(a);
    return ax.carrier + static_cast<double>(wave_index(n, ax.samples)) * frequency_spacing(a);
}

GridSpec GridSpec::with_half_cell_offset() const {
    auto axes = axes_;
    for (std::size_t a = 0; a < axes.size(); ++a) axes[a].carrier += 0.5 * frequency_spacing(a);
    return GridSpec(std::move(axes));
}

void GridSpec::unflatten(std::size_t flat, std::span<std::size_t> out) const {
    for (std::size_t a = 0; a < dim(); ++a) {
        out[a] = flat / strides_[a];
        flat -= out[a] * strides_[a];
    }
}

std::string GridSpec::describe() const {
    std::ostringstream os;
    for (std::size_t a = 0; a < dim(); ++a) {
        if (a) os << 'x';
        os << axes_[a].samples << '@' << axes_[a].half_width;
        if (axes_[a].carrier != 0.0) os << '+' << axes_[a].carrier;
    }
    return os.str();
}

bool GridSpec::operator==(const GridSpec& other) const {
    if (dim() != other.dim()) return false;
    for (std::size_t a = 0; a < dim(); ++a) {
        const auto& x = axes_[a];
        const auto& y = other.axes_[a];
        if (x.samples != y.samples || x.half_width != y.half_width || x.carrier != y.carrier) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Field

Field::Field(GridSpec spec, Side side, std::vector<cplx> values)
    : Field(std::move(spec), side, std::vector<std::vector<cplx>>{std::move(values)}) {}

Field::Field(GridSpec spec, Side side, std::vector<std::vector<cplx>> components)
    : spec_(std::move(spec)), side_(side), components_(std::move(components)) {
    if (components_.empty() || components_.size() > 2)
        throw ContractViolation("Field: expected one or two components");
    for (const auto& c : components_)
        if (c.size() != spec_.size()) throw ContractViolation("Field: value count does not match grid");
}

Field Field::zeros(const GridSpec& spec, Side side, std::size_t components) {
    return Field(spec, side, std::vector<std::vector<cplx>>(components, std::vector<cplx>(spec.size())));
}

Field Field::sample(const GridSpec& spec, const std::function<cplx(std::span<const double>)>& fn) {
    std::vector<cplx> values(spec.size());
    std::vector<std::size_t> idx(spec.dim());
    std::vector<double> x(spec.dim());
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        spec.unflatten(flat, idx);
        for (std::size_t a = 0; a < spec.dim(); ++a) x[a] = spec.position(a, idx[a]);
        values[flat] = fn(x);
    }
    return Field(spec, Side::physical, std::move(values));
}

Field Field::sample_frequency(const GridSpec& spec,
                              const std::function<cplx(std::span<const double>)>& fn) {
    std::vector<cplx> values(spec.size());
    std::vector<std::size_t> idx(spec.dim());
    std::vector<double> xi(spec.dim());
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        spec.unflatten(flat, idx);
        for (std::size_t a = 0; a < spec.dim(); ++a) xi[a] = spec.frequency(a, idx[a]);
        values[flat] = fn(xi);
    }
    return Field(spec, Side::frequency, std::move(values));
}

std::span<const cplx> Field::values(std::size_t component) const { return components_.at(component); }

std::vector<double> Field::magnitudes() const {
    std::vector<double> mag(spec_.size(), 0.0);
    if (components_.size() == 1) {
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(components_[0][i]);
        return mag;
    }
    for (std::size_t i = 0; i < mag.size(); ++i) {
        double s = 0.0;
        for (const auto& c : components_) s += std::norm(c[i]);
        mag[i] = std::sqrt(s);
    }
    return mag;
}

Field Field::with_components(std::vector<std::vector<cplx>> components) const {
    return Field(spec_, side_, std::move(components));
}

// ---------------------------------------------------------------------------
// Transforms

Field forward_transform(const Field& f) {
    if (f.side() != Side::physical) throw ContractViolation("forward_transform expects a physical-side field");
    const auto& spec = f.spec();
    const std::size_t d = spec.dim();
    std::vector<std::vector<cplx>> pre(d), post(d);
    for (std::size_t a = 0; a < d; ++a) {
        const auto& ax = spec.axis(a);
        const double dx = spec.spacing(a);
        pre[a].resize(ax.samples);
        post[a].resize(ax.samples);
        const cplx edge = std::polar(1.0, ax.half_width * ax.carrier);
        for (std::size_t n = 0; n < ax.samples; ++n) {
            pre[a][n] = std::polar(1.0, -static_cast<double>(n) * dx * ax.carrier);
            post[a][n] = (n % 2 == 0 ? 1.0 : -1.0) * edge;
        }
    }
    const double vol = spec.cell_volume();
    const auto dims = dims_of(spec);
    std::vector<std::vector<cplx>> out;
    for (std::size_t c = 0; c < f.components(); ++c) {
        auto in = f.values(c);
        std::vector<cplx> buf(in.begin(), in.end());
        for_each_separable(spec, pre, [&](std::size_t i, cplx w) { buf[i] *= w; });
        fft_inplace(buf, dims, FFTW_FORWARD);
        for_each_separable(spec, post, [&](std::size_t i, cplx w) { buf[i] *= vol * w; });
        out.push_back(std::move(buf));
    }
    return Field(spec, Side::frequency, std::move(out));
}

Field inverse_transform(const Field& f) {
    if (f.side() != Side::frequency) throw ContractViolation("inverse_transform expects a frequency-side field");
    const auto& spec = f.spec();
    const std::size_t d = spec.dim();
    std::vector<std::vector<cplx>> pre(d), post(d);
    for (std::size_t a = 0; a < d; ++a) {
        const auto& ax = spec.axis(a);
        const double dx = spec.spacing(a);
        pre[a].resize(ax.samples);
        post[a].resize(ax.samples);
        const cplx edge = std::polar(1.0, -ax.half_width * ax.carrier);
        for (std::size_t n = 0; n < ax.samples; ++n) {
            pre[a][n] = (n % 2 == 0 ? 1.0 : -1.0) * edge;
            post[a][n] = std::polar(1.0, static_cast<double>(n) * dx * ax.carrier);
        }
    }
    const double scale = spec.frequency_cell_volume() / std::pow(2.0 * kPi, static_cast<double>(d));
    const auto dims = dims_of(spec);
    std::vector<std::vector<cplx>> out;
    for (std::size_t c = 0; c < f.components(); ++c) {
        auto in = f.values(c);
        std::vector<cplx> buf(in.begin(), in.end());
        for_each_separable(spec, pre, [&](std::size_t i, cplx w) { buf[i] *= w; });
        fft_inplace(buf, dims, FFTW_BACKWARD);
        for_each_separable(spec, post, [&](std::size_t i, cplx w) { buf[i] *= scale * w; });
        out.push_back(std::move(buf));
    }
    return Field(spec, Side::physical, std::move(out));
}

// ---------------------------------------------------------------------------
// Norms

namespace {

double weight_for(const Field& f) {
    return f.side() == Side::physical ? f.spec().cell_volume() : f.spec().frequency_cell_volume();
}

double power_sum_norm(std::span<const double> mag, double weight, double p) {
    if (std::isinf(p)) return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
    long double acc = 0.0L;
    if (p == 2.0) {
        for (double m : mag) acc += static_cast<long double>(m) * m;
    } else if (p == 1.0) {
        for (double m : mag) acc += m;
    } else {
        for (double m : mag) acc += std::pow(static_cast<long double>(m), static_cast<long double>(p));
    }
    return std::pow(static_cast<double>(acc * weight), 1.0 / p);
}

}  // namespace

double lebesgue_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw ContractViolation("lebesgue_norm requires p >= 1");
    const auto mag = f.magnitudes();
    return power_sum_norm(mag, weight_for(f), p);
}

double lorentz_norm(std::span<const double> magnitudes, double cell_volume, double p, LorentzIndex r) {
    if (!(p > 1.0) || std::isinf(p)) throw ContractViolation("lorentz_norm requires 1 < p < infinity");
    std::vector<double> a(magnitudes.begin(), magnitudes.end());
    std::sort(a.begin(), a.end(), std::greater<>());
    const double inv_p = 1.0 / p;
    if (r == LorentzIndex::infinity) {
        // sup over lambda in [a_{k+1}, a_k) of lambda * (k w)^{1/p}, approached at a_k.
        double best = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k] == 0.0) break;
            best = std::max(best, a[k] * std::pow(static_cast<double>(k + 1) * cell_volume, inv_p));
        }
        return best;
    }
    // int_0^inf mu(lambda)^{1/p} dlambda, mu = k w on [a_{k+1}, a_k).
    long double acc = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double next = k + 1 < a.size() ? a[k + 1] : 0.0;
        const double drop = a[k] - next;
        if (drop > 0.0) acc += static_cast<long double>(drop) * std::pow(static_cast<double>(k + 1) * cell_volume, inv_p);
    }
    return static_cast<double>(acc);
}

double lorentz_norm(const Field& f, double p, LorentzIndex r) {
    const auto mag = f.magnitudes();
    return lorentz_norm(mag, weight_for(f), p, r);
}

double mixed_norm(const Field& f, double p, LorentzIndex r) {
    const auto& spec = f.spec();
    const std::size_t d = spec.dim();
    if (d < 2) throw ContractViolation("mixed_norm requires dimension >= 2");
    if (f.side() != Side::physical) throw ContractViolation("mixed_norm expects a physical-side field");
    const auto mag = f.magnitudes();
    const std::size_t nt = spec.axis(d - 1).samples;
    const std::size_t ny = spec.size() / nt;
    double y_cell = 1.0;
    for (std::size_t a = 0; a + 1 < d; ++a) y_cell *= spec.spacing(a);
    const double dt = spec.spacing(d - 1);
    std::vector<double> slice(ny);
    long double acc = 0.0L;
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t j = 0; j < ny; ++j) slice[j] = mag[j * nt + t];
        const double s = lorentz_norm(slice, y_cell, p, r);
        acc += std::pow(static_cast<long double>(s), static_cast<long double>(p));
    }
    return std::pow(static_cast<double>(acc * dt), 1.0 / p);
}

double out_of_band_fraction(const Field& spectrum) {
    if (spectrum.side() != Side::frequency) throw ContractViolation("out_of_band_fraction expects a spectrum");
    const auto& spec = spectrum.spec();
    const auto mag = spectrum.magnitudes();
    std::vector<std::size_t> idx(spec.dim());
    long double total = 0.0L, outside = 0.0L;
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        const long double e = static_cast<long double>(mag[flat]) * mag[flat];
        total += e;
        spec.unflatten(flat, idx);
        for (std::size_t a = 0; a < spec.dim(); ++a) {
            const auto n = spec.axis(a).samples;
            if (std::llabs(GridSpec::wave_index(idx[a], n)) > static_cast<long long>(n / 4)) {
                outside += e;
                break;
            }
        }
    }
    return total > 0.0L ? static_cast<double>(outside / total) : 0.0;
}

// ---------------------------------------------------------------------------
// Fourier interpolation (type-2 NUFFT, Gaussian gridding)

std::vector<std::vector<cplx>> fourier_interpolate(const Field& f, std::span<const double> points) {
    if (f.side() != Side::physical) throw ContractViolation("fourier_interpolate expects a physical field");
    const auto& spec = f.spec();
    const std::size_t d = spec.dim();
    if (points.size() % d != 0) throw ContractViolation("fourier_interpolate: point array not a multiple of dim");
    const std::size_t npts = points.size() / d;

    constexpr int kSpread = 12;      // half-width of the spreading window, in fine cells
    constexpr double kOversample = 2.0;

    std::vector<std::size_t> coarse(d), fine(d);
    std::vector<double> tau(d);
    for (std::size_t a = 0; a < d; ++a) {
        coarse[a] = spec.axis(a).samples;
        fine[a] = static_cast<std::size_t>(kOversample) * coarse[a];
        const double n = static_cast<double>(coarse[a]);
        tau[a] = kPi * kSpread / (n * n * kOversample * (kOversample - 0.5));
    }
    GridSpec fine_spec([&] {
        std::vector<AxisSpec> axes;
        for (std::size_t a = 0; a < d; ++a) axes.push_back({1.0, fine[a], 0.0});
        return axes;
    }());

    std::vector<std::vector<cplx>> result;
    for (std::size_t c = 0; c < f.components(); ++c) {
        // Baseband samples b_n = f_n exp(-i carrier x_n); B_k = DFT(b)/N.
        std::vector<std::vector<cplx>> demod(d);
        for (std::size_t a = 0; a < d; ++a) {
            demod[a].resize(coarse[a]);
            for (std::size_t n = 0; n < coarse[a]; ++n)
                demod[a][n] = std::polar(1.0, -spec.axis(a).carrier * spec.position(a, n));
        }
        auto in = f.values(c);
        std::vector<cplx> coef(in.begin(), in.end());
        for_each_separable(spec, demod, [&](std::size_t i, cplx w) { coef[i] *= w; });
        fft_inplace(coef, dims_of(spec), FFTW_FORWARD);

        // Deconvolve by the Gaussian's Fourier coefficients and zero-pad.
        std::vector<std::vector<cplx>> deconv(d);
        for (std::size_t a = 0; a < d; ++a) {
            deconv[a].resize(coarse[a]);
            for (std::size_t n = 0; n < coarse[a]; ++n) {
                const double k = static_cast<double>(GridSpec::wave_index(n, coarse[a]));
                deconv[a][n] = std::sqrt(kPi / tau[a]) * std::exp(k * k * tau[a]) / static_cast<double>(coarse[a]);
            }
        }
        std::vector<cplx> padded(fine_spec.size());
        std::vector<std::size_t> idx(d);
        for_each_separable(spec, deconv, [&](std::size_t i, cplx w) {
            spec.unflatten(i, idx);
            std::size_t target = 0;
            for (std::size_t a = 0; a < d; ++a) {
                const long long k = GridSpec::wave_index(idx[a], coarse[a]);
                const auto slot = static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long long>(fine[a]));
                target += slot * fine_spec.stride(a);
            }
            padded[target] = coef[i] * w;
        });
        fft_inplace(padded, dims_of(fine_spec), FFTW_BACKWARD);

        std::vector<cplx> out(npts);
        const int width = 2 * kSpread;
        std::vector<std::vector<double>> weights(d, std::vector<double>(width));
        std::vector<std::vector<std::size_t>> slots(d, std::vector<std::size_t>(width));
        for (std::size_t pi = 0; pi < npts; ++pi) {
            const double* x = points.data() + pi * d;
            double carrier_phase = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                const double L = spec.axis(a).half_width;
                carrier_phase += spec.axis(a).carrier * x[a];
                double s = kPi * (x[a] + L) / L;
                s -= 2.0 * kPi * std::floor(s / (2.0 * kPi));
                const double h = 2.0 * kPi / static_cast<double>(fine[a]);
                const auto m0 = static_cast<long long>(std::floor(s / h));
                for (int j = 0; j < width; ++j) {
                    const long long m = m0 - kSpread + 1 + j;
                    const double ds = s - static_cast<double>(m) * h;
                    weights[a][j] = std::exp(-ds * ds / (4.0 * tau[a])) / static_cast<double>(fine[a]);
                    const long long wrapped = ((m % static_cast<long long>(fine[a])) + static_cast<long long>(fine[a])) %
                                              static_cast<long long>(fine[a]);
                    slots[a][j] = static_cast<std::size_t>(wrapped);
                }
            }
            // Tensor-product sum over the window.
            cplx acc{0.0, 0.0};
            std::vector<int> j(d, 0);
            while (true) {
                double w = 1.0;
                std::size_t target = 0;
                for (std::size_t a = 0; a < d; ++a) {
                    w *= weights[a][j[a]];
                    target += slots[a][j[a]] * fine_spec.stride(a);
                }
                acc += w * padded[target];
                std::size_t a = d;
                while (a > 0) {
                    --a;
                    if (++j[a] < width) break;
                    j[a] = 0;
                }
                if (a == 0 && j[0] == 0) break;
            }
            out[pi] = acc * std::polar(1.0, carrier_phase);
        }
        result.push_back(std::move(out));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Serialization: magic, version, dim, components, side, then per axis
// (samples:u64, half_width:f64, carrier:f64), then row-major complex doubles
// for each component in turn. Little-endian host layout.

namespace {

constexpr char kMagic[4] = {'C', 'L', 'F', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated field stream");
    return v;
}

}  // namespace

void write_field(std::ostream& os, const Field& f) {
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.spec().dim()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.components()));
    put<std::uint8_t>(os, f.side() == Side::physical ? 0 : 1);
    for (const auto& ax : f.spec().axes()) {
        put<std::uint64_t>(os, ax.samples);
        put<double>(os, ax.half_width);
        put<double>(os, ax.carrier);
    }
    for (std::size_t c = 0; c < f.components(); ++c) {
        auto v = f.values(c);
        os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
    }
    if (!os) throw IoError("failed writing field");
}

Field read_field(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || !std::equal(magic, magic + 4, kMagic)) throw IoError("not a field stream");
    if (get<std::uint32_t>(is) != kVersion) throw IoError("unsupported field stream version");
    const auto dim = get<std::uint32_t>(is);
    const auto comps = get<std::uint32_t>(is);
    const auto side = get<std::uint8_t>(is);
    if (dim == 0 || dim > 8 || comps == 0 || comps > 2 || side > 1) throw IoError("corrupt field header");
    std::vector<AxisSpec> axes;
    for (std::uint32_t a = 0; a < dim; ++a) {
        AxisSpec ax;
        ax.samples = get<std::uint64_t>(is);
        ax.half_width = get<double>(is);
        ax.carrier = get<double>(is);
        axes.push_back(ax);
    }
    GridSpec spec(std::move(axes));
    std::vector<std::vector<cplx>> components(comps, std::vector<cplx>(spec.size()));
    for (auto& c : components) {
        is.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(cplx)));
        if (!is) throw IoError("truncated field payload");
    }
    return Field(std::move(spec), side == 0 ? Side::physical : Side::frequency, std::move(components));
}

}  // namespace carlab
