#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spme/grid.hpp"

namespace spme {

// Spatial modulation m(x) = 1 + amplitude * cos(2 pi frequency x); |amplitude| <= 1 keeps m >= 0.
struct ModulationProfile {
    double amplitude = 0.0;
    double frequency = 1.0;

    double operator()(double x) const;
    bool trivial() const { return amplitude == 0.0; }
};

// Nemytskii coefficient c(x, u) = (c0 + c1 * u) * m(x) on [0, 1] x R_+.
// Used for both the diffusion coefficient b and the sojourn coefficient r.
struct Nemytskii {
    double c0 = 0.0;
    double c1 = 0.0;
    ModulationProfile profile{};

    static Nemytskii affine(double c0, double c1) { return Nemytskii{c0, c1, {}}; }

    bool x_independent() const { return profile.trivial(); }
    // C with sup_x c(x, u) <= C (1 + u).
    double growth_constant() const;
    void validate(const char* name) const;
};

double eval_coeff(const Nemytskii& c, double x, double u);

// Power-law coloring mu_k = c * k^{-q} for k <= n_modes, 0 beyond.
struct NoiseColoring {
    double c = 1.0;
    double q = 2.0;
    std::size_t n_modes = 64;

    double mu(std::size_t k) const;
    void validate() const;
};

// Component i: h^{-1} * integral over ((i-1)h, ih] of b(y, u_i) g_k(y) dy.
GridVec discretize_mode(const Nemytskii& b, const GridVec& u, std::size_t k);

// Component i: h^{-1} * integral over cell i of r(y, u_i) dy.
GridVec discretize_sojourn(const Nemytskii& r, const GridVec& u);

// sum_{k <= min(n, n_modes)} mu_k^2 [B_n(u)(g_k)]^2, componentwise.
GridVec sigma_n(const Nemytskii& b, const NoiseColoring& coloring, const GridVec& u);

struct SupportReport {
    bool pass = true;
    // Lebesgue measure (on the probe lattice over (0,1) x [0, u_max]) of {v = 0, r > 0}.
    double violation_measure = 0.0;
    std::size_t probes = 0;
    std::size_t violations = 0;
};

// Checks r = 1_{v > 0} r with v(x, u) = b^2(x, u) sum_k mu_k^2 g_k(x)^2.
SupportReport check_support_condition(const Nemytskii& r, const Nemytskii& b, const NoiseColoring& coloring,
                                      double u_max = 10.0);

// Per-grid tables behind the scheme's coefficient evaluations. The cell integrals of
// m_b * g_k and m_r are precomputed, so each evaluation is a pointwise affine map of u
// times a table row.
class DiscreteCoefficients {
public:
    DiscreteCoefficients(const Grid& grid, Nemytskii b, Nemytskii r, NoiseColoring coloring);

    const Grid& grid() const { return grid_; }
    const Nemytskii& b() const { return b_; }
    const Nemytskii& r() const { return r_; }
    const NoiseColoring& coloring() const { return coloring_; }

    // Retained modes min(n, n_modes) (the Galerkin truncation of the noise).
    std::size_t retained_modes() const { return modes_; }
    double mu(std::size_t k) const { return mu_[k - 1]; }

    // h^{-1} * integral over cell i of m_b(y) g_k(y) dy; k 1-based, i 0-based component.
    double mode_cell_average(std::size_t k, std::size_t i) const { return table_[(k - 1) * grid_.n() + i]; }

    // Affine factor c0 + c1 * u of b and r.
    double b_level(double u) const { return b_.c0 + b_.c1 * u; }
    double r_level(double u) const { return r_.c0 + r_.c1 * u; }

    // (r_n(u))_i.
    double sojourn(std::size_t i, double u) const { return r_level(u) * r_cell_[i]; }

    // noise_i = sum_k mu_k (B_n(u) g_k)_i * dxi_k, for all components (indicator not applied).
    void noise(std::span<const double> u, std::span<const double> dxi, std::span<double> out) const;

    // Sigma_n(u), componentwise.
    void sigma(std::span<const double> u, std::span<double> out) const;

private:
    Grid grid_;
    Nemytskii b_;
    Nemytskii r_;
    NoiseColoring coloring_;
    std::size_t modes_;
    std::vector<double> mu_;
    std::vector<double> table_;       // modes_ x n
    std::vector<double> r_cell_;      // cell averages of m_r
    std::vector<double> sigma_cell_;  // sum_k mu_k^2 (cell average of m_b g_k)^2
};

}  // namespace spme
