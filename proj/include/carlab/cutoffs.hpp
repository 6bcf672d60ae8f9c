#pragma once

#include <span>

namespace carlab::cutoffs {

// Defaults for the two "sufficiently small" constants.
inline constexpr double kDefaultDelta = 1.0 / 16.0;
inline constexpr double kDefaultEps0 = 1.0 / 32.0;

/// C^infinity step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u);

/// 1 on (-inf, 1], 0 on [2, inf), smooth decreasing in log2 t between.
double plateau(double t);

/// Dyadic bump supported in (1/2, 2); sum_j psi(t/2^j) telescopes to 1 for t > 0.
double psi(double t);
/// sum_{j <= 0} psi(2^{-j}|tau|), with psi0(0) = 1.
double psi0(double tau);
/// psi(2^{-k}|tau|) for k >= 1; psi0 for k = 0.
double psi_k(int k, double tau);

/// Radial profile of chi: 1 on [0, 3/2], 0 on [2, inf).
double chi_radial(double r);
/// chi(xi) = chi_radial(|xi|).
double chi(std::span<const double> xi);

/// 1 on |rho - 1| <= delta, 0 on |rho - 1| >= 2 delta.
double chi0(double rho, double delta = kDefaultDelta);

/// Even bump, phi(0) = 1, support [-1, 1].
double phi(double u);

/// 1 on [-2, 2], supported in (-4, 4).
double psi_tilde(double t);

/// 1 on 1/2 <= |t| <= 2, supported in 1/4 < |t| < 4.
double psi_bar(double t);

/// Parabolic cutoff as a function of the parabolic norm: 1 for n <= 2, 0 for n >= 4.
double chi_tilde(double parabolic_norm);

}  // namespace carlab::cutoffs
