#pragma once

#include "carlab/lattice.hpp"
#include "carlab/mat2.hpp"

#include <array>

namespace carlab {

struct PauliPair {
    Mat2 sigma1;
    Mat2 sigma2;
};
PauliPair pauli_pair();

/// Psi(x, y) = (x, y) / (x^2 + y^2).
std::array<double, 2> kelvin_map(double x, double y);

/// Partial derivatives of Psi = (X, Y).
struct KelvinJacobian {
    double xx = 0.0;  // X'_x
    double xy = 0.0;  // X'_y
    double yx = 0.0;  // Y'_x
    double yy = 0.0;  // Y'_y
};
KelvinJacobian kelvin_jacobian(double x, double y);

/// M_sign(x, y) = (x^2 + y^2)^-2 diag((ix + sign y)^2, (ix - sign y)^2).
Mat2 m_matrix(int sign, double x, double y);

/// u o Psi on the annulus 1/2 < |x| < 2, zero elsewhere, by Fourier
/// interpolation. A constant field is returned unchanged.
Field kelvin_pullback(const Field& u);

/// ||D_sign u* - M_sign (D_-sign u)*||_2 / ||u||_2.
double verify_kelvin_identity(const Field& u, int sign);

/// ||i D_sign u* - sum of Jacobian-weighted Pauli terms on (d_x u)*, (d_y u)*||_2 / ||u||_2.
double kelvin_chain_rule_residual(const Field& u, int sign);

/// Gaussian bump of width w centred at (r cos a, r sin a), in spinor slot `slot`,
/// on the box [-L, L)^2 with n samples per axis.
Field kelvin_test_bump(std::size_t n, double half_width = 2.5, double radius = 1.2, double angle = 0.4,
                       double width = 0.03, std::size_t slot = 0);

}  // namespace carlab
