#pragma once

#include <algorithm>
#include <array>
#include <complex>

namespace carlab {

/// 2x2 complex matrix, row-major.
struct Mat2 {
    using cplx = std::complex<double>;
    std::array<cplx, 4> a{};

    cplx& operator()(int r, int c) { return a[2 * r + c]; }
    cplx operator()(int r, int c) const { return a[2 * r + c]; }

    static Mat2 of(cplx a00, cplx a01, cplx a10, cplx a11) {
        Mat2 m;
        m.a = {a00, a01, a10, a11};
        return m;
    }
    static Mat2 identity() { return of(1.0, 0.0, 0.0, 1.0); }
    static Mat2 diag(cplx x, cplx y) { return of(x, 0.0, 0.0, y); }

    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }

    /// Max-abs entry; used for exactness checks.
    double max_abs() const {
        double m = 0.0;
        for (const auto& z : a) m = std::max(m, std::abs(z));
        return m;
    }

    std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const {
        return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]};
    }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
    return r;
}

inline Mat2 operator+(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

inline Mat2 operator-(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

inline Mat2 operator*(std::complex<double> s, const Mat2& x) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.a[i] = s * x.a[i];
    return r;
}

inline Mat2 pauli1() { return Mat2::of(0.0, 1.0, 1.0, 0.0); }
inline Mat2 pauli2() { return Mat2::of(0.0, {0.0, -1.0}, {0.0, 1.0}, 0.0); }

/// w1*sigma1 + w2*sigma2 for complex w.
inline Mat2 pauli_dot(std::complex<double> w1, std::complex<double> w2) {
    const std::complex<double> i{0, 1};
    return Mat2::of(0.0, w1 - i * w2, w1 + i * w2, 0.0);
}

}  // namespace carlab
