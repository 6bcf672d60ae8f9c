#pragma once

#include "carlab/lattice.hpp"

#include <span>
#include <vector>

namespace carlab::detail {

// Calls fn(flat, xi) for every frequency lattice point.
template <typename Fn>
void for_each_frequency(const GridSpec& spec, Fn fn) {
    const std::size_t d = spec.dim();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> xi(d);
    for (std::size_t a = 0; a < d; ++a) xi[a] = spec.frequency(a, 0);
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        fn(flat, std::span<const double>(xi));
        std::size_t a = d;
        while (a > 0) {
            --a;
            if (++idx[a] < spec.axis(a).samples) {
                xi[a] = spec.frequency(a, idx[a]);
                break;
            }
            idx[a] = 0;
            xi[a] = spec.frequency(a, 0);
        }
    }
}

template <typename Fn>
void for_each_position(const GridSpec& spec, Fn fn) {
    const std::size_t d = spec.dim();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    for (std::size_t a = 0; a < d; ++a) x[a] = spec.position(a, 0);
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        fn(flat, std::span<const double>(x));
        std::size_t a = d;
        while (a > 0) {
            --a;
            if (++idx[a] < spec.axis(a).samples) {
                x[a] = spec.position(a, idx[a]);
                break;
            }
            idx[a] = 0;
            x[a] = spec.position(a, 0);
        }
    }
}

}  // namespace carlab::detail
