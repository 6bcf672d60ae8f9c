#pragma once

#include "carlab/lattice.hpp"
#include "carlab/mat2.hpp"

#include <span>
#include <string>
#include <vector>

namespace carlab {

enum class SymbolKind {
    constant,
    laplacian,
    conjugated_laplacian,  // |xi|^2 + 2i v.xi - |v|^2
    laplace_carleman,      // 1 / (|xi|^2 + 2i v.xi - |v|^2)
    laplace_local,         // m_Delta
    dyadic_piece,          // m_eps
    rescaled_piece,        // m~_eps(eta, tau) = m_eps(eta, eps tau)
    shell_piece,           // psi_k((|eta|^2 - 1)/eps) m~_eps
    imag_part,             // rho_eps
    dirac,                 // chi sigma.(R(xi + i e2)) / (|xi|^2 + 2i xi_2 - 1), d = 2
    dirac_piece,           // dirac symbol cut to |xi_2| ~ eps and rescaled in xi_2
    nonelliptic,           // 1 / (Q(xi) + 2i v^T M xi - Q(v))
    heat,                  // 1 / (i tau + |xi|^2 + sigma)
    heat_dyadic,           // psi(2^-j ||(xi,tau)||) / (i tau + |xi|^2 + sigma)
    heat_local,            // mu_eps
    heat_imag,             // -Im mu_eps(xi, eps tau)
};

struct SymbolParams {
    std::size_t d = 0;  // total number of frequency variables, tau last
    double eps = 1.0;
    int k = 0;
    int j = 0;
    int l = 1;
    double sigma = 0.0;
    double angle = 0.0;
    cplx value{1.0, 0.0};
    std::vector<double> v;
};

/// Closed-form multiplier. Scalar symbols evaluate with eval(); the Dirac
/// kinds are 2x2 matrices and evaluate with eval_matrix().
class Symbol {
public:
    static Symbol constant(std::size_t d, cplx value);
    static Symbol laplacian(std::size_t d);
    static Symbol conjugated_laplacian(std::vector<double> v);
    static Symbol laplace_carleman(std::vector<double> v);
    static Symbol laplace_local(std::size_t d);
    static Symbol dyadic_piece(std::size_t d, double eps);
    static Symbol rescaled_piece(std::size_t d, double eps);
    static Symbol shell_piece(std::size_t d, double eps, int k);
    static Symbol imag_part(std::size_t d, double eps);
    static Symbol dirac(double angle);
    static Symbol dirac_piece(double angle, double eps);
    static Symbol nonelliptic(int l, std::vector<double> v);
    /// d_space spatial variables plus tau.
    static Symbol heat(std::size_t d_space, double sigma);
    static Symbol heat_dyadic(std::size_t d_space, double sigma, int j);
    static Symbol heat_local(std::size_t d_space, double eps);
    static Symbol heat_imag(std::size_t d_space, double eps);

    /// Builds from the CLI kind string (e.g. "dyadic-piece").
    static Symbol from_name(const std::string& name, const SymbolParams& params);

    SymbolKind kind() const noexcept { return kind_; }
    const SymbolParams& params() const noexcept { return p_; }
    std::size_t dim() const noexcept { return p_.d; }
    bool is_matrix() const noexcept;
    std::string name() const;

    cplx eval(std::span<const double> xi) const;
    Mat2 eval_matrix(std::span<const double> xi) const;

private:
    Symbol(SymbolKind kind, SymbolParams p);
    SymbolKind kind_;
    SymbolParams p_;
};

std::string symbol_kind_name(SymbolKind kind);
SymbolKind parse_symbol_kind(const std::string& name);

/// Proper rotation R (row-major d x d) with R v/|v| = e_d, and scale |v|, so
/// that m_v(xi) = |v|^-2 m_{e_d}(R xi / |v|).
struct AxisReduction {
    std::vector<double> rotation;
    double scale = 0.0;
    std::vector<double> apply(std::span<const double> xi) const;
};
AxisReduction rotate_to_axis(std::span<const double> v);

/// Hyperbolic rotation in the (xi_l, xi_{l+1}) plane.
struct BoostResult {
    double theta = 0.0;
    int sign = 1;
    double scale = 1.0;            // sqrt(Q(v)), divided out before boosting
    std::array<double, 2> vbar{};  // normalized (v_l, v_{l+1}) after the block rotations
};
/// v has signature (l minus signs, d - l plus signs); requires Q(v) > 0.
BoostResult lorentz_boost_normalize(std::span<const double> v, int l);
/// R_theta = [[cosh, sinh], [sinh, cosh]] applied to xibar.
std::array<double, 2> boost(double theta, std::array<double, 2> xibar);
/// Q~(xibar) = -xibar_1^2 + xibar_2^2.
double q_tilde(std::array<double, 2> xibar);
/// Q(xi) = -xi_1^2 - ... - xi_l^2 + xi_{l+1}^2 + ... + xi_d^2.
double quadratic_form(std::span<const double> xi, int l);

struct HeatReduction {
    int sigma = 0;
    double scale = 0.0;
};
HeatReduction heat_reduce(std::span<const double> v, double gamma);

double parabolic_norm(std::span<const double> xi, double tau);

}  // namespace carlab
