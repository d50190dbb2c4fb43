#pragma once

#include <array>
#include <cstddef>

namespace spme::quadrature {

inline constexpr std::size_t kGaussPoints = 16;

struct GaussRule {
    std::array<double, kGaussPoints> nodes;    // on [-1, 1]
    std::array<double, kGaussPoints> weights;
};

// 16-point Gauss-Legendre rule, computed once by Newton iteration on P_16.
const GaussRule& gauss_legendre16();

// Integral of f over [a, b] with one application of the 16-point rule.
template <typename F>
double integrate(F&& f, double a, double b) {
    const auto& rule = gauss_legendre16();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t q = 0; q < kGaussPoints; ++q) {
        acc += rule.weights[q] * f(mid + half * rule.nodes[q]);
    }
    return acc * half;
}

}  // namespace spme::quadrature
