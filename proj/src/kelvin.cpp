#include "carlab/kelvin.hpp"

#include "carlab/errors.hpp"
#include "carlab/operators.hpp"
#include "detail/walk.hpp"

#include <algorithm>
#include <cmath>

namespace carlab {

namespace {

using detail::for_each_position;

constexpr cplx kI{0.0, 1.0};
constexpr double kSupportTolerance = 1e-12;

void require_planar_spinor(const Field& u, const char* who) {
    if (u.spec().dim() != 2 || u.components() != 2 || u.side() != Side::physical)
        throw ContractViolation(std::string(who) + ": expects a physical two-component field in d = 2");
}

bool is_constant(const Field& u) {
    for (std::size_t c = 0; c < u.components(); ++c) {
        auto v = u.values(c);
        for (const auto& z : v)
            if (z != v[0]) return false;
    }
    return true;
}

bool in_annulus(double r2) { return r2 > 0.25 && r2 < 4.0; }

double l2(const Field& f) { return lebesgue_norm(f, 2.0); }

Field difference(const Field& a, const Field& b) {
    std::vector<std::vector<cplx>> out;
    for (std::size_t c = 0; c < a.components(); ++c) {
        auto x = a.values(c);
        auto y = b.values(c);
        std::vector<cplx> v(x.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] - y[i];
        out.push_back(std::move(v));
    }
    return a.with_components(std::move(out));
}

// Applies a position-dependent 2x2 matrix to a spinor field.
template <typename Fn>
Field apply_pointwise(const Field& u, Fn matrix_at) {
    auto a = u.values(0);
    auto b = u.values(1);
    std::vector<cplx> o0(a.size()), o1(a.size());
    for_each_position(u.spec(), [&](std::size_t i, std::span<const double> x) {
        const Mat2 m = matrix_at(x[0], x[1]);
        const auto r = m.apply({a[i], b[i]});
        o0[i] = r[0];
        o1[i] = r[1];
    });
    return u.with_components({std::move(o0), std::move(o1)});
}

}  // namespace

PauliPair pauli_pair() { return {pauli1(), pauli2()}; }

std::array<double, 2> kelvin_map(double x, double y) {
    const double r2 = x * x + y * y;
    if (!(r2 > 0.0)) throw SingularityError("kelvin_map: origin");
    return {x / r2, y / r2};
}

KelvinJacobian kelvin_jacobian(double x, double y) {
    const double r2 = x * x + y * y;
    if (!(r2 > 0.0)) throw SingularityError("kelvin_jacobian: origin");
    const double r4 = r2 * r2;
    const double off = -2.0 * x * y / r4;
    return {(y * y - x * x) / r4, off, off, (x * x - y * y) / r4};
}

Mat2 m_matrix(int sign, double x, double y) {
    if (sign != 1 && sign != -1) throw ContractViolation("m_matrix: sign must be +1 or -1");
    const double r2 = x * x + y * y;
    if (!(r2 > 0.0)) throw SingularityError("m_matrix: origin");
    const double s = sign;
    const cplx a = kI * x + s * y;
    const cplx b = kI * x - s * y;
    return Mat2::diag(a * a / (r2 * r2), b * b / (r2 * r2));
}

Field kelvin_pullback(const Field& u) {
    if (u.spec().dim() != 2 || u.side() != Side::physical)
        throw ContractViolation("kelvin_pullback: expects a physical field in d = 2");
    if (is_constant(u)) return u;
    const GridSpec& g = u.spec();
    for (std::size_t a = 0; a < 2; ++a)
        if (g.axis(a).half_width <= 2.0) throw SupportError("kelvin_pullback: box must contain the disc |x| <= 2");

    const auto mags = u.magnitudes();
    const double peak = *std::max_element(mags.begin(), mags.end());
    double outside = 0.0;
    std::vector<std::size_t> inside;
    std::vector<double> points;
    for_each_position(g, [&](std::size_t i, std::span<const double> x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        if (!in_annulus(r2)) {
            outside = std::max(outside, mags[i]);
            return;
        }
        inside.push_back(i);
        points.push_back(x[0] / r2);
        points.push_back(x[1] / r2);
    });
    if (outside > kSupportTolerance * peak)
        throw SupportError("kelvin_pullback: field is not supported in 1/2 < |x| < 2");

    const auto values = fourier_interpolate(u, points);
    std::vector<std::vector<cplx>> out(u.components(), std::vector<cplx>(g.size(), cplx{}));
    for (std::size_t c = 0; c < u.components(); ++c)
        for (std::size_t k = 0; k < inside.size(); ++k) out[c][inside[k]] = values[c][k];
    return u.with_components(std::move(out));
}

double verify_kelvin_identity(const Field& u, int sign) {
    require_planar_spinor(u, "verify_kelvin_identity");
    if (sign != 1 && sign != -1) throw ContractViolation("verify_kelvin_identity: sign must be +1 or -1");
    const double norm = l2(u);
    if (!(norm > 0.0)) throw ContractViolation("verify_kelvin_identity: zero field");
    const Field lhs = dirac_apply(sign, kelvin_pullback(u));
    const Field pulled = kelvin_pullback(dirac_apply(-sign, u));
    if (is_constant(u)) return l2(difference(lhs, pulled)) / norm;
    const Field rhs = apply_pointwise(pulled, [&](double x, double y) {
        const double r2 = x * x + y * y;
        return in_annulus(r2) ? m_matrix(sign, x, y) : Mat2{};
    });
    return l2(difference(lhs, rhs)) / norm;
}

double kelvin_chain_rule_residual(const Field& u, int sign) {
    require_planar_spinor(u, "kelvin_chain_rule_residual");
    if (sign != 1 && sign != -1) throw ContractViolation("kelvin_chain_rule_residual: sign must be +1 or -1");
    const double norm = l2(u);
    if (!(norm > 0.0)) throw ContractViolation("kelvin_chain_rule_residual: zero field");
    const Field direct = dirac_apply(sign, kelvin_pullback(u));
    const Field dx = kelvin_pullback(partial_derivative(u, 0));
    const Field dy = kelvin_pullback(partial_derivative(u, 1));
    const Mat2 s1 = pauli1(), s2 = pauli2();
    const double s = sign;
    auto weight = [&](bool along_x) {
        return [&, along_x](double x, double y) {
            const double r2 = x * x + y * y;
            if (!in_annulus(r2)) return Mat2{};
            const auto j = kelvin_jacobian(x, y);
            return along_x ? cplx{j.xx} * s1 + cplx{s * j.xy} * s2 : cplx{j.yx} * s1 + cplx{s * j.yy} * s2;
        };
    };
    const Field a = apply_pointwise(dx, weight(true));
    const Field b = apply_pointwise(dy, weight(false));
    auto av = a.values(0), a1 = a.values(1), bv = b.values(0), b1 = b.values(1);
    auto dv = direct.values(0), d1 = direct.values(1);
    std::vector<cplx> r0(av.size()), r1(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
        r0[i] = kI * dv[i] - (av[i] + bv[i]);
        r1[i] = kI * d1[i] - (a1[i] + b1[i]);
    }
    return l2(u.with_components({std::move(r0), std::move(r1)})) / norm;
}

Field kelvin_test_bump(std::size_t n, double half_width, double radius, double angle, double width, std::size_t slot) {
    if (slot > 1) throw ContractViolation("kelvin_test_bump: slot must be 0 or 1");
    const GridSpec g = GridSpec::uniform(2, half_width, n);
    const double cx = radius * std::cos(angle), cy = radius * std::sin(angle);
    std::vector<std::vector<cplx>> comps(2, std::vector<cplx>(g.size(), cplx{}));
    for_each_position(g, [&](std::size_t i, std::span<const double> x) {
        const double u = ((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) / (width * width);
        comps[slot][i] = std::exp(-0.5 * u);
    });
    return Field(g, Side::physical, std::move(comps));
}

}  // namespace carlab
