#include "spme/ratio_suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spme/csv.hpp"
#include "spme/error.hpp"
#include "spme/grid.hpp"
#include "spme/noise.hpp"
#include "spme/quadrature.hpp"
#include "spme/spectral.hpp"

namespace spme {

namespace {

GridVec sample_nodes(const Grid& grid, const BandLimited& f, int shape) {
    GridVec v(grid);
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double y = f(grid.node(i + 1));
        v[i] = shape == 0 ? y : (shape == 1 ? std::abs(y) : y * y);
    }
    return v;
}

GridVec pow_vec(const GridVec& u, double p) {
    GridVec w(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        w[i] = std::pow(u[i], p);
    }
    return w;
}

double sup_abs(const GridVec& u) {
    double m = 0.0;
    for (double x : u.values) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// H^0_0 (theta = 0) or H^1_0 (theta = 1) norm of (pl(u))^mu, by Gauss-Legendre per cell.
double pl_power_norm(const GridVec& u, double mu, int theta) {
    const std::size_t n = u.size();
    const double h = u.grid.h();
    double acc = 0.0;
    for (std::size_t c = 0; c <= n; ++c) {
        const double left = c == 0 ? 0.0 : u[c - 1];
        const double right = c == n ? 0.0 : u[c];
        const double slope = (right - left) / h;
        acc += quadrature::integrate(
            [&](double t) {
                const double v = std::max(left + slope * t, 0.0);
                if (theta == 0) {
                    return std::pow(v, 2.0 * mu);
                }
                const double d = mu * std::pow(v, mu - 1.0) * slope;
                return d * d;
            },
            0.0, h);
    }
    return std::sqrt(acc);
}

void update(double& sup, double num, double den) {
    if (den > 0.0 && std::isfinite(num / den)) {
        sup = std::max(sup, num / den);
    }
}

}  // namespace

double RatioSuite::drift() const {
    double d = 0.0;
    for (double s : sup_ratio) {
        d = std::max(d, std::abs(s / sup_ratio.front() - 1.0));
    }
    return d;
}

double BandLimited::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        acc += a[j] * std::sin(static_cast<double>(k[j]) * std::numbers::pi * x);
    }
    return acc;
}

BandLimited BandLimited::draw(std::uint64_t seed, std::uint64_t sample) {
    std::mt19937_64 rng(NoiseStream::mix(seed, sample));
    std::uniform_int_distribution<std::size_t> terms(1, 6);
    std::uniform_int_distribution<std::size_t> freq(1, 4);
    std::normal_distribution<double> amp(0.0, 1.0);
    BandLimited f;
    const std::size_t m = terms(rng);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = freq(rng);
        f.k.push_back(k);
        f.a.push_back(amp(rng) / static_cast<double>(k));
    }
    return f;
}

std::vector<RatioSuite> run_ratio_suites(const RatioSuiteOptions& options) {
    if (options.levels.empty() || options.samples == 0) {
        throw ConfigError("ratio suites: empty level list or sample count");
    }
    const double alpha = options.alpha;
    const double g_theta = (alpha - 2.0) / alpha;
    const std::vector<double> mu_high{2.0, 3.0, alpha};
    std::vector<double> theta_high{0.5, g_theta, 1.0};
    std::sort(theta_high.begin(), theta_high.end());
    theta_high.erase(std::unique(theta_high.begin(), theta_high.end()), theta_high.end());
    const std::vector<double> theta_low{0.5, 1.0};
    const std::vector<double> theta_coeff{0.0, 0.5, 1.0};
    const std::vector<double> mu_coeff{1.0, 2.0};

    std::vector<RatioSuite> suites;
    auto add = [&](std::string name) {
        suites.push_back(RatioSuite{std::move(name), options.levels, {}});
        return suites.size() - 1;
    };
    const std::size_t s_product = add("product_h-1");
    std::vector<std::size_t> s_power;
    for (double mu : mu_high) {
        for (double th : theta_high) {
            s_power.push_back(add("power_mu" + format_double(mu) + "_theta" + format_double(th)));
        }
    }
    std::vector<std::size_t> s_root;
    for (double th : theta_low) {
        s_root.push_back(add("power_mu0.5_theta" + format_double(th)));
    }
    std::vector<std::size_t> s_disc;
    for (double mu : {2.0, alpha}) {
        for (int th : {0, 1}) {
            s_disc.push_back(add("discretized_power_mu" + format_double(mu) + "_theta" + format_double(th)));
        }
    }
    std::vector<std::size_t> s_b;
    std::vector<std::size_t> s_sigma;
    for (double mu : mu_coeff) {
        for (double th : theta_coeff) {
            s_b.push_back(add("coeff_B_mu" + format_double(mu) + "_theta" + format_double(th)));
            s_sigma.push_back(add("coeff_Sigma_mu" + format_double(mu) + "_theta" + format_double(th)));
        }
    }
    const std::size_t s_r = add("coeff_r");

    for (std::size_t n : options.levels) {
        const Grid grid(n);
        const SpectralBasis basis = SpectralBasis::build(grid);
        const DiscreteCoefficients coeffs(grid, options.b, options.r, options.coloring);
        const std::size_t modes = coeffs.retained_modes();
        std::vector<double> sup(suites.size(), 0.0);
        GridVec tmp(grid);
        std::vector<double> sig(n);
        for (std::size_t s = 0; s < options.samples; ++s) {
            const BandLimited f = BandLimited::draw(options.seed, 2 * s);
            const BandLimited g = BandLimited::draw(options.seed, 2 * s + 1);
            const GridVec v = sample_nodes(grid, f, 0);
            const GridVec w = sample_nodes(grid, g, 0);
            const GridVec u = sample_nodes(grid, f, 1);
            const GridVec q = sample_nodes(grid, f, 2);

            for (std::size_t i = 0; i < n; ++i) {
                tmp[i] = v[i] * w[i];
            }
            update(sup[s_product], discrete_norm(basis, tmp, -1.0),
                   discrete_norm(basis, v, -1.0) * discrete_norm(basis, w, 1.0));

            const double umax = sup_abs(u);
            std::size_t idx = 0;
            for (double mu : mu_high) {
                const GridVec um = pow_vec(u, mu);
                for (double th : theta_high) {
                    update(sup[s_power[idx++]], discrete_norm(basis, um, th),
                           discrete_norm(basis, u, th) * std::pow(umax, mu - 1.0));
                }
            }
            const GridVec qr = pow_vec(q, 0.5);
            for (std::size_t j = 0; j < theta_low.size(); ++j) {
                const double th = theta_low[j];
                update(sup[s_root[j]], discrete_norm(basis, qr, 0.5 * th),
                       std::pow(discrete_norm(basis, q, th), 0.5));
            }
            idx = 0;
            for (double mu : {2.0, alpha}) {
                const GridVec um = pow_vec(u, mu);
                for (int th : {0, 1}) {
                    update(sup[s_disc[idx++]], pl_power_norm(u, mu, th), pl_power_norm(um, 1.0, th));
                }
            }

            coeffs.sigma(u.values, sig);
            idx = 0;
            for (double mu : mu_coeff) {
                const GridVec um = pow_vec(u, mu);
                const GridVec um1 = pow_vec(u, mu + 1.0);
                const GridVec um2 = pow_vec(u, mu + 2.0);
                for (double th : theta_coeff) {
                    double lhs_b = 0.0;
                    for (std::size_t k = 1; k <= modes; ++k) {
                        for (std::size_t i = 0; i < n; ++i) {
                            tmp[i] = um[i] * coeffs.b_level(u[i]) * coeffs.mode_cell_average(k, i);
                        }
                        const double nk = discrete_norm(basis, tmp, th);
                        lhs_b += coeffs.mu(k) * coeffs.mu(k) * nk * nk;
                    }
                    const double a = discrete_norm(basis, um, th);
                    const double c1 = discrete_norm(basis, um1, th);
                    const double c2 = discrete_norm(basis, um2, th);
                    update(sup[s_b[idx]], lhs_b, a * a + c1 * c1);
                    for (std::size_t i = 0; i < n; ++i) {
                        tmp[i] = um[i] * sig[i];
                    }
                    const double ls = discrete_norm(basis, tmp, th);
                    update(sup[s_sigma[idx]], ls * ls, a * a + c2 * c2);
                    ++idx;
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                tmp[i] = coeffs.sojourn(i, u[i]);
            }
            const double lr = discrete_norm(basis, tmp, 0.0);
            const double lu = discrete_norm(basis, u, 0.0);
            update(sup[s_r], lr * lr, 1.0 + lu * lu);
        }
        for (std::size_t j = 0; j < suites.size(); ++j) {
            suites[j].sup_ratio.push_back(sup[j]);
        }
    }
    return suites;
}

double EquivalenceBand::growth() const {
    double g = 1.0;
    const double base = hi.front() / lo.front();
    for (std::size_t j = 0; j < levels.size(); ++j) {
        g = std::max(g, (hi[j] / lo[j]) / base);
    }
    return g;
}

std::vector<EquivalenceBand> discrete_continuous_bands(const std::vector<std::size_t>& levels,
                                                       const std::vector<double>& thetas, std::size_t samples,
                                                       std::uint64_t seed) {
    std::vector<EquivalenceBand> bands;
    for (double th : thetas) {
        bands.push_back(EquivalenceBand{th, levels, {}, {}});
    }
    for (std::size_t n : levels) {
        const Grid grid(n);
        const SpectralBasis basis = SpectralBasis::build(grid);
        std::vector<PlNormWeights> weights;
        for (double th : thetas) {
            weights.emplace_back(grid, th);
        }
        std::vector<double> lo(thetas.size(), INFINITY);
        std::vector<double> hi(thetas.size(), 0.0);
        std::mt19937_64 rng(NoiseStream::mix(seed, n));
        std::normal_distribution<double> normal(0.0, 1.0);
        GridVec v(grid);
        for (std::size_t s = 0; s < samples; ++s) {
            for (double& x : v.values) {
                x = normal(rng);
            }
            for (std::size_t t = 0; t < thetas.size(); ++t) {
                const double r = discrete_norm(basis, v, thetas[t]) / weights[t].norm(basis, v.values);
                lo[t] = std::min(lo[t], r);
                hi[t] = std::max(hi[t], r);
            }
        }
        for (std::size_t t = 0; t < thetas.size(); ++t) {
            bands[t].lo.push_back(lo[t]);
            bands[t].hi.push_back(hi[t]);
        }
    }
    return bands;
}

}  // namespace spme
