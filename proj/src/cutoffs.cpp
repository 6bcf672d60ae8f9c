#include "carlab/cutoffs.hpp"

#include <cmath>

namespace carlab::cutoffs {

namespace {

double glue(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

}  // namespace

double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = glue(u);
    return a / (a + glue(1.0 - u));
}

double plateau(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    return 1.0 - smooth_step(std::log2(t));
}

double psi(double t) {
    if (!(t > 0.5) || !(t < 2.0)) return 0.0;
    return plateau(t) - plateau(2.0 * t);
}

double psi0(double tau) { return plateau(std::abs(tau)); }

double psi_k(int k, double tau) {
    if (k == 0) return psi0(tau);
    return psi(std::ldexp(std::abs(tau), -k));
}

double chi_radial(double r) { return 1.0 - smooth_step(2.0 * (r - 1.5)); }

double chi(std::span<const double> xi) {
    double s = 0.0;
    for (double c : xi) s += c * c;
    return chi_radial(std::sqrt(s));
}

double chi0(double rho, double delta) {
    return 1.0 - smooth_step((std::abs(rho - 1.0) - delta) / delta);
}

double phi(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double psi_tilde(double t) { return plateau(std::abs(t) / 2.0); }

double psi_bar(double t) {
    const double a = std::abs(t);
    return plateau(a / 2.0) - plateau(4.0 * a);
}

double chi_tilde(double parabolic_norm) { return plateau(parabolic_norm / 2.0); }

}  // namespace carlab::cutoffs
