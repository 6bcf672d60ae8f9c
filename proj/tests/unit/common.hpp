#pragma once

#include "carlab/lattice.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace carlab::test {

inline double rel_l2(std::span<const cplx> a, std::span<const cplx> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

inline double max_abs(std::span<const cplx> a) {
    double m = 0.0;
    for (const auto& z : a) m = std::max(m, std::abs(z));
    return m;
}

inline Field random_physical(const GridSpec& g, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<cplx> v(g.size());
    for (auto& z : v) z = {n(rng), n(rng)};
    return Field(g, Side::physical, std::move(v));
}

}  // namespace carlab::test
