#pragma once

#include "carlab/exponents.hpp"
#include "carlab/lattice.hpp"
#include "carlab/symbols.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carlab {

enum class FamilyKind { knapp_laplace, radial_focus, knapp_heat, radial_heat, knapp_dirac };

std::string family_name(FamilyKind kind);
FamilyKind parse_family(const std::string& name);

/// Which exponent pair the norms are taken at. The radial families use the
/// dual pair, which turns the focusing bound into the e2 lower bound.
enum class NormPairing { direct, dual };

struct TestFamily {
    FamilyKind kind = FamilyKind::knapp_laplace;
    /// Dimension in the theorem's sense (spatial dimension for heat).
    std::size_t d = 0;
    double eps = 0.0;
    double delta = 0.0;
    Field f;
    Symbol symbol;
    NormPairing pairing = NormPairing::direct;
    Regime regime = Regime::laplace;
};

struct KnappOptions {
    /// Box half-width in units of pi / (frequency half-width).
    double alpha = 16.0;
    std::size_t samples = 64;
};

/// f^(eta, tau) = psi(tau) phi((eta_{d-1} - 1)/eps) prod_j phi(10 d eta_j / sqrt(eps)),
/// measured against rho_eps. The shift of eta_{d-1} by 1 is carried by the grid.
TestFamily build_knapp(std::size_t d, double eps, const KnappOptions& options = {});
/// Same profile in d = 1 + time, measured against -Im mu_eps(xi, eps tau).
TestFamily build_knapp_heat(double eps, const KnappOptions& options = {});
/// d = 2 Knapp profile in the lower spinor slot against the rescaled Dirac piece.
TestFamily build_knapp_dirac(double eps, double angle = 0.0, const KnappOptions& options = {});

struct RadialOptions {
    /// Lower bound on the y half-width, and on eps times it.
    double min_half_width = 128.0;
    double eps_box = 4.0;
    std::size_t t_samples = 8;
};

/// f^(eta, tau) = chi0(|eta|) chi0(tau) for d = 3, measured against rho_eps.
TestFamily build_radial(std::size_t d, double delta, double eps, const RadialOptions& options = {});
/// The d = 1 heat analogue (S^0 in place of the sphere).
TestFamily build_radial_heat(double delta, double eps, const RadialOptions& options = {});

struct SweepRecord {
    std::string family;
    std::string symbol;
    std::size_t d = 0;
    ExponentPoint point;
    double eps = 0.0;
    double ratio = 0.0;
    double predicted_exp = 0.0;
    std::string grid;
};

struct Measurement {
    SweepRecord record;
    double in_norm = 0.0;
    double out_norm = 0.0;
    std::optional<Field> output;
};

/// True for symbols already rescaled in tau, whose ratio picks up eps^{1/p-1/q}.
bool is_rescaled(const Symbol& s);

Measurement measure(const TestFamily& family, const Symbol& s, const ExponentPoint& p, bool keep_output = false);
SweepRecord measure_lower_bound(const TestFamily& family, const Symbol& s, const ExponentPoint& p);
SweepRecord measure_lower_bound(const TestFamily& family, const ExponentPoint& p);

/// min |rho~(D) f| over A = {|x_j| <= c eps^-1/2, |x_{d-1}| <= c/eps, |x_d| <= c}.
double knapp_box_minimum(const TestFamily& family, const Field& output, double c = 0.125);
/// min |output| over lattice points with |y| - (d-2) pi/4 in [c/eps, 2c/eps],
/// within delta of 2 pi Z, and |t| <= c. Empty probe set gives nullopt.
std::optional<double> radial_shell_minimum(const TestFamily& family, const Field& output, double c = 0.125);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t points = 0;
};
/// Least squares of log value against log eps; needs at least four distinct eps.
SlopeFit fit_slope(std::span<const double> eps, std::span<const double> values);
SlopeFit fit_slope(const std::vector<SweepRecord>& records);

/// int a lambda / ((t - lambda^2)^2 + a^2 lambda^2) phi(t) dt by adaptive quadrature.
double approx_identity(double a, double lambda, const std::function<double(double)>& phi);

/// ratio(m_eps on G') against eps^{1/p-1/q} ratio(m~_eps on G) for the same
/// samples, G' the grid with the time axis stretched by 1/eps. Returns the
/// relative difference.
double scaling_transfer_residual(const TestFamily& family, const ExponentPoint& p);

struct HeatKernelOptions {
    std::size_t samples = 128;
    /// Box half-width in units of the kernel's natural scale.
    double box = 64.0;
};
/// max over the inner half of the box of
/// |F^{-1}(psi(2^-j ||(xi,tau)||) / (i tau + |xi|^2 + sigma))| (1 + 2^{j/2}|x| + 2^j |t|)^3 / 2^{d j / 2}.
double heat_kernel_constant(std::size_t d_space, double sigma, int j, const HeatKernelOptions& options = {});

struct AscentOptions {
    std::size_t iterations = 200;
    std::uint64_t seed = 1;
    double step = 0.3;
    /// Starting field; random band-limited start when empty.
    std::optional<Field> start;
};
struct AscentResult {
    double best_ratio = 0.0;
    Field best;
};
/// Perturbative ascent on ||s(D) f||_q / ||f||_p over band-limited fields.
AscentResult random_ascent(const Symbol& s, const ExponentPoint& p, const GridSpec& grid, const AscentOptions& options);

/// Random band-limited field: Gaussian packets in frequency, cut to the half band.
Field random_band_limited(const GridSpec& grid, std::uint64_t seed, std::size_t packets = 4);
Field random_band_limited(const GridSpec& grid, std::uint64_t seed, std::size_t packets, std::size_t components);

/// d = 3 input for the restriction-extension witness: random Gaussian packets
/// in frequency centred near |eta| = 1 with tau in (1/2, 2), cut to the half band.
Field random_shell_input(const GridSpec& grid, std::uint64_t seed, std::size_t packets = 6);

}  // namespace carlab
