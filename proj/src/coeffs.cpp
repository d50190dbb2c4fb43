#include "spme/coeffs.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spme/error.hpp"
#include "spme/quadrature.hpp"

namespace spme {

namespace {

// h^{-1} * integral over ((i-1)h, ih] of m(y) g_k(y) dy.
double cell_mode_average(const ModulationProfile& m, const Grid& grid, std::size_t k, std::size_t i) {
    const double h = grid.h();
    const double a = grid.node(i - 1);
    const double b = grid.node(i);
    const double w = static_cast<double>(k) * std::numbers::pi;
    if (m.trivial()) {
        return std::numbers::sqrt2 * (std::cos(w * a) - std::cos(w * b)) / (w * h);
    }
    const double integral = quadrature::integrate(
        [&](double y) { return m(y) * std::numbers::sqrt2 * std::sin(w * y); }, a, b);
    return integral / h;
}

double cell_average(const ModulationProfile& m, const Grid& grid, std::size_t i) {
    if (m.trivial()) {
        return 1.0;
    }
    return quadrature::integrate(m, grid.node(i - 1), grid.node(i)) / grid.h();
}

void check_nonnegative(const GridVec& u, const char* what) {
    for (double x : u.values) {
        if (!(x >= 0.0)) {
            throw ConfigError(std::string(what) + ": state must be nonnegative");
        }
    }
}

}  // namespace

double ModulationProfile::operator()(double x) const {
    return 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * frequency * x);
}

double Nemytskii::growth_constant() const {
    const double sup_m = 1.0 + std::abs(profile.amplitude);
    return sup_m * std::max(c0, c1);
}

void Nemytskii::validate(const char* name) const {
    if (!(c0 >= 0.0 && c1 >= 0.0) || !std::isfinite(c0) || !std::isfinite(c1)) {
        throw ConfigError(std::string(name) + ": affine coefficients must be finite and nonnegative");
    }
    if (!(std::abs(profile.amplitude) <= 1.0) || !std::isfinite(profile.frequency)) {
        throw ConfigError(std::string(name) + ": modulation amplitude must lie in [-1, 1]");
    }
}

double eval_coeff(const Nemytskii& c, double x, double u) {
    if (!(u >= 0.0)) {
        throw ConfigError("eval_coeff: u must be nonnegative");
    }
    return (c.c0 + c.c1 * u) * c.profile(x);
}

double NoiseColoring::mu(std::size_t k) const {
    if (k == 0 || k > n_modes) {
        return 0.0;
    }
    return c * std::pow(static_cast<double>(k), -q);
}

void NoiseColoring::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw ConfigError("noise coloring: mu_c must be positive");
    }
    // sum k^2 mu_k^2 < infinity needs 2q - 2 > 1.
    if (!(q > 1.5) || !std::isfinite(q)) {
        throw ConfigError("noise coloring: mu_q must exceed 1.5");
    }
}

GridVec discretize_mode(const Nemytskii& b, const GridVec& u, std::size_t k) {
    if (k == 0) {
        throw ConfigError("discretize_mode: mode index starts at 1");
    }
    check_nonnegative(u, "discretize_mode");
    GridVec out(u.grid);
    for (std::size_t i = 1; i <= u.grid.n(); ++i) {
        const double level = b.c0 + b.c1 * u[i - 1];
        out[i - 1] = level * cell_mode_average(b.profile, u.grid, k, i);
    }
    return out;
}

GridVec discretize_sojourn(const Nemytskii& r, const GridVec& u) {
    check_nonnegative(u, "discretize_sojourn");
    GridVec out(u.grid);
    for (std::size_t i = 1; i <= u.grid.n(); ++i) {
        out[i - 1] = (r.c0 + r.c1 * u[i - 1]) * cell_average(r.profile, u.grid, i);
    }
    return out;
}

GridVec sigma_n(const Nemytskii& b, const NoiseColoring& coloring, const GridVec& u) {
    check_nonnegative(u, "sigma_n");
    GridVec out(u.grid);
    const std::size_t modes = std::min(u.grid.n(), coloring.n_modes);
    for (std::size_t k = 1; k <= modes; ++k) {
        const double mu = coloring.mu(k);
        const auto mode = discretize_mode(b, u, k);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += mu * mu * mode[i] * mode[i];
        }
    }
    return out;
}

SupportReport check_support_condition(const Nemytskii& r, const Nemytskii& b, const NoiseColoring& coloring,
                                      double u_max) {
    constexpr std::size_t kX = 257;
    constexpr std::size_t kU = 41;
    SupportReport report;
    const double cell = (1.0 / static_cast<double>(kX)) * (u_max / static_cast<double>(kU));
    for (std::size_t ix = 0; ix < kX; ++ix) {
        const double x = (static_cast<double>(ix) + 0.5) / static_cast<double>(kX);
        double noise_variance = 0.0;
        for (std::size_t k = 1; k <= coloring.n_modes; ++k) {
            const double g = std::numbers::sqrt2 * std::sin(static_cast<double>(k) * std::numbers::pi * x);
            const double mu = coloring.mu(k);
            noise_variance += mu * mu * g * g;
        }
        for (std::size_t iu = 0; iu < kU; ++iu) {
            const double u = u_max * static_cast<double>(iu) / static_cast<double>(kU - 1);
            const double bv = eval_coeff(b, x, u);
            const double v = bv * bv * noise_variance;
            ++report.probes;
            if (v == 0.0 && eval_coeff(r, x, u) > 0.0) {
                ++report.violations;
                report.violation_measure += cell;
            }
        }
    }
    report.pass = report.violations == 0;
    return report;
}

DiscreteCoefficients::DiscreteCoefficients(const Grid& grid, Nemytskii b, Nemytskii r, NoiseColoring coloring)
    : grid_(grid), b_(b), r_(r), coloring_(coloring), modes_(std::min(grid.n(), coloring.n_modes)) {
    b_.validate("b");
    r_.validate("r");
    coloring_.validate();
    const std::size_t n = grid.n();
    mu_.resize(modes_);
    table_.resize(modes_ * n);
    sigma_cell_.assign(n, 0.0);
    for (std::size_t k = 1; k <= modes_; ++k) {
        mu_[k - 1] = coloring_.mu(k);
        for (std::size_t i = 1; i <= n; ++i) {
            const double avg = cell_mode_average(b_.profile, grid, k, i);
            table_[(k - 1) * n + (i - 1)] = avg;
            sigma_cell_[i - 1] += mu_[k - 1] * mu_[k - 1] * avg * avg;
        }
    }
    r_cell_.resize(n);
    for (std::size_t i = 1; i <= n; ++i) {
        r_cell_[i - 1] = cell_average(r_.profile, grid, i);
    }
}

void DiscreteCoefficients::noise(std::span<const double> u, std::span<const double> dxi, std::span<double> out) const {
    const std::size_t n = grid_.n();
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t modes = std::min(modes_, dxi.size());
    for (std::size_t k = 0; k < modes; ++k) {
        const double weight = mu_[k] * dxi[k];
        const double* row = table_.data() + k * n;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += weight * row[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] *= b_level(u[i]);
    }
}

void DiscreteCoefficients::sigma(std::span<const double> u, std::span<double> out) const {
    for (std::size_t i = 0; i < grid_.n(); ++i) {
        const double level = b_level(u[i]);
        out[i] = level * level * sigma_cell_[i];
    }
}

}  // namespace spme
