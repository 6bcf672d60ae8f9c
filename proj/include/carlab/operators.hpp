#pragma once

#include "carlab/lattice.hpp"
#include "carlab/symbols.hpp"

#include <string>
#include <utility>
#include <vector>

namespace carlab {

/// Energy fraction allowed outside the half-Nyquist band before a spectral
/// operation is refused.
inline constexpr double kDefaultBandTolerance = 1e-14;

struct ApplyOptions {
    /// Negative disables the resolution guard.
    double band_tolerance = kDefaultBandTolerance;
};

/// F^{-1}(s * F f). Matrix symbols act on two-component fields.
Field apply_multiplier(const Symbol& s, const Field& f, const ApplyOptions& options = {});

/// Multiplies a spectrum pointwise by a symbol (no transforms, no guard).
Field multiply_spectrum(const Symbol& s, const Field& spectrum);

/// Spectral partial derivative d/dx_axis.
Field partial_derivative(const Field& f, std::size_t axis);

/// -Laplacian, spectrally.
Field negative_laplacian(const Field& f);

/// e^{v.x} (-Delta) e^{-v.x} u through its symbol |xi|^2 + 2i v.xi - |v|^2.
/// Requires u to vanish (relative to its peak) near the box boundary.
Field conjugated_laplacian(std::span<const double> v, const Field& u);

/// Relative L2 difference between the symbol route and the weighted route
/// e^{v.x} (-Delta)(e^{-v.x} u), the weights applied on the ball of radius
/// `window` only.
double conjugation_residual(std::span<const double> v, const Field& u, double window);

/// D_sign = -i(sigma1 d_x + sign * sigma2 d_y) on a two-component field in d = 2.
Field dirac_apply(int sign, const Field& u);

/// (sum_j |psi_bar(D_last / 2^j) f|^2)^{1/2}, j over bands meeting the grid.
Field littlewood_paley_sf(const Field& f);
/// Band index range used for the grid's last axis.
std::pair<int, int> littlewood_paley_bands(const GridSpec& spec);
/// min and max of sum_j psi_bar^2(tau / 2^j) over the grid's nonzero tau values.
std::pair<double, double> littlewood_paley_bounds(const GridSpec& spec);

/// int_{S^m} e^{i y.phi} dphi for y in R^{m+1}.
cplx sphere_extension(std::span<const double> y, int m);

struct RestrictionOptions {
    /// Angular trapezoid nodes; 0 picks the smallest safe order.
    std::size_t angular_nodes = 0;
};

/// Smallest angular order the restriction-extension quadrature accepts on this grid.
std::size_t restriction_min_order(const GridSpec& spec);

/// d = 3: int int_{S^1} f^(phi, tau) e^{i(y.phi + t tau)} dphi psi(tau) dtau.
Field restriction_extension(const Field& f, const RestrictionOptions& options = {});

/// ||m(D) f||_q / ||f||_p with grid metadata.
struct OperatorReport {
    std::string symbol;
    std::size_t d = 0;
    double eps = 0.0;
    int k = 0;
    double p = 0.0;
    double q = 0.0;
    double in_norm = 0.0;
    double out_norm = 0.0;
    double ratio = 0.0;
    std::string grid;
};
OperatorReport operator_report(const Symbol& s, const Field& f, double p, double q,
                               const ApplyOptions& options = {});

}  // namespace carlab
