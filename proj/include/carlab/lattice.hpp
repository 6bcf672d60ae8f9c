#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace carlab {

using cplx = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One periodic axis: samples x_n = -L + n*2L/N for n in [0, N), frequencies
/// xi_k = carrier + k*pi/L for k in [-N/2, N/2) stored in FFT order.
///
/// A nonzero carrier heterodynes the axis: the samples are still the true
/// values f(x_n), but the frequency lattice is centred on the carrier so a
/// narrow band far from the origin needs only a few samples. A carrier of
/// half a frequency cell keeps every lattice point off xi = 0.
struct AxisSpec {
    double half_width = 1.0;
    std::size_t samples = 4;
    double carrier = 0.0;
};

class GridSpec {
public:
    explicit GridSpec(std::vector<AxisSpec> axes);

    static GridSpec uniform(std::size_t dim, double half_width, std::size_t samples);

    std::size_t dim() const noexcept { return axes_.size(); }
    const AxisSpec& axis(std::size_t a) const { return axes_.at(a); }
    std::span<const AxisSpec> axes() const noexcept { return axes_; }

    std::size_t size() const noexcept { return size_; }
    std::size_t stride(std::size_t a) const { return strides_.at(a); }

    double spacing(std::size_t a) const;
    double frequency_spacing(std::size_t a) const;
    /// Largest representable |xi - carrier| on axis a.
    double nyquist(std::size_t a) const;
    double cell_volume() const;
    double frequency_cell_volume() const;

    double position(std::size_t a, std::size_t n) const;
    /// Signed lattice index for storage slot n (FFT order).
    static long long wave_index(std::size_t n, std::size_t samples);
    double frequency(std::size_t a, std::size_t n) const;

    /// Same grid with every carrier moved by half a frequency cell.
    GridSpec with_half_cell_offset() const;

    /// Splits a flat row-major index into per-axis indices.
    void unflatten(std::size_t flat, std::span<std::size_t> out) const;

    std::string describe() const;

    bool operator==(const GridSpec& other) const;

private:
    std::vector<AxisSpec> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

enum class Side { physical, frequency };

/// A sampled complex function (or two-component spinor) on a GridSpec.
/// Immutable once built; every operation returns a new Field.
class Field {
public:
    Field(GridSpec spec, Side side, std::vector<cplx> values);
    Field(GridSpec spec, Side side, std::vector<std::vector<cplx>> components);

    static Field zeros(const GridSpec& spec, Side side, std::size_t components = 1);
    /// Samples fn at the physical grid points.
    static Field sample(const GridSpec& spec, const std::function<cplx(std::span<const double>)>& fn);
    /// Samples fn at the frequency lattice points.
    static Field sample_frequency(const GridSpec& spec,
                                  const std::function<cplx(std::span<const double>)>& fn);

    const GridSpec& spec() const noexcept { return spec_; }
    Side side() const noexcept { return side_; }
    std::size_t components() const noexcept { return components_.size(); }
    std::span<const cplx> values(std::size_t component = 0) const;

    /// Pointwise Euclidean magnitude across components.
    std::vector<double> magnitudes() const;

    Field with_components(std::vector<std::vector<cplx>> components) const;

private:
    GridSpec spec_;
    Side side_;
    std::vector<std::vector<cplx>> components_;
};

/// Riemann-sum Fourier transform, hat f(xi) = int e^{-i x.xi} f(x) dx.
Field forward_transform(const Field& f);
/// Inverse with the (2 pi)^{-d} normalization; exact inverse of forward_transform.
Field inverse_transform(const Field& f);

double lebesgue_norm(const Field& f, double p);

enum class LorentzIndex { one, infinity };

/// L^{p,1} or L^{p,infinity} quasi-norm from the distribution function
/// |{|f| > lambda}|, evaluated exactly over the sorted samples.
double lorentz_norm(const Field& f, double p, LorentzIndex r);

/// Same, from raw magnitudes with a common cell weight.
double lorentz_norm(std::span<const double> magnitudes, double cell_volume, double p,
                    LorentzIndex r);

/// L^p_t L^{p,r}_y with t the last axis.
double mixed_norm(const Field& f, double p, LorentzIndex r = LorentzIndex::infinity);

/// Evaluates the trigonometric interpolant of a physical field at arbitrary
/// points (rows of `points`, each of length dim). Gaussian-gridding
/// non-uniform FFT; relative accuracy about 1e-12.
std::vector<std::vector<cplx>> fourier_interpolate(const Field& f,
                                                   std::span<const double> points);

/// Fraction of spectral energy outside [carrier - nyquist/2, carrier + nyquist/2]
/// on any axis. Input must be frequency-side.
double out_of_band_fraction(const Field& spectrum);

void write_field(std::ostream& os, const Field& f);
Field read_field(std::istream& is);

}  // namespace carlab
