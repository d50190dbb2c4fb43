#include "spme/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spme/noise.hpp"
#include "spme/ratio_suites.hpp"
#include "spme/spectral.hpp"

namespace spme {

namespace {

const std::vector<std::size_t> kLevels{7, 15, 31, 63, 127};

SpectralBasis make_basis(const Grid& grid, double fault) {
    return fault == 0.0 ? SpectralBasis::build(grid) : SpectralBasis::build_perturbed(grid, fault);
}

GridVec random_nonnegative(const Grid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    GridVec v(grid);
    for (double& x : v.values) {
        x = unif(rng);
    }
    return v;
}

CheckResult eigenpairs(double fault) {
    double worst_value = 0.0;
    double worst_orth = 0.0;
    for (std::size_t n : kLevels) {
        const Grid grid(n);
        const SpectralBasis basis = make_basis(grid, fault);
        std::vector<std::vector<double>> m;
        for (std::size_t k = 1; k <= n; ++k) {
            m.push_back(basis.eigenvector(k));
        }
        std::vector<double> lm(n);
        for (std::size_t k = 1; k <= n; ++k) {
            apply_laplacian(grid, m[k - 1], lm);
            double q = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                q += m[k - 1][i] * lm[i];
            }
            const double lambda = basis.eigenvalue(k);
            worst_value = std::max(worst_value, std::abs(q - lambda) / lambda);
            for (std::size_t j = 1; j <= k; ++j) {
                double d = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    d += m[k - 1][i] * m[j - 1][i];
                }
                worst_orth = std::max(worst_orth, std::abs(d - (j == k ? 1.0 : 0.0)));
            }
        }
    }
    // One figure of merit: the value residual scaled so both limits map to 1.
    const double score = std::max(worst_value / 1e-10, worst_orth / 1e-12);
    return CheckResult{"eigenpairs", score <= 1.0, score, 1.0};
}

CheckResult coercivity(double fault, std::size_t samples) {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    const double alpha = 4.0;
    for (std::size_t n : kLevels) {
        const Grid grid(n);
        const SpectralBasis basis = make_basis(grid, fault);
        for (std::size_t s = 0; s < samples; ++s) {
            GridVec w = random_nonnegative(grid, rng);
            for (double& x : w.values) {
                x = std::pow(x, alpha);
            }
            const GridVec lw = apply_laplacian(w);
            double direct = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                direct += w[i] * lw[i];
            }
            direct *= grid.h();
            const double norm = discrete_norm(basis, w, 1.0);
            worst = std::max(worst, std::abs(direct - norm * norm) / (norm * norm));
        }
    }
    return CheckResult{"coercivity", worst <= 1e-12, worst, 1e-12};
}

CheckResult poincare(double fault, std::size_t samples) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::vector<double> thetas{-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
    double violations = 0.0;
    for (std::size_t n : kLevels) {
        const Grid grid(n);
        const SpectralBasis basis = make_basis(grid, fault);
        GridVec v(grid);
        for (std::size_t s = 0; s < samples; ++s) {
            for (double& x : v.values) {
                x = normal(rng);
            }
            double prev = -1.0;
            for (double th : thetas) {
                const double cur = discrete_norm(basis, v, th);
                if (cur < prev) {
                    violations += 1.0;
                }
                prev = cur;
            }
        }
    }
    return CheckResult{"poincare_monotone", violations == 0.0, violations, 0.0};
}

CheckResult continuous_equivalence(std::size_t samples) {
    const std::vector<double> s_list{-1.0, -0.5, 0.0, 0.5, 1.0};
    const double base = 1.0 + 1.0 / (std::numbers::pi * std::numbers::pi);
    double violations = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const BandLimited f = BandLimited::draw(13, s);
        ContinuousSine c;
        c.coefficients.assign(8, 0.0);
        for (std::size_t j = 0; j < f.k.size(); ++j) {
            c.coefficients[f.k[j] - 1] += f.a[j] / std::numbers::sqrt2;
        }
        for (double sv : s_list) {
            // lambda^s and (1 + lambda)^s differ by a factor between 1 and base^s.
            const double lo = std::min(1.0, std::pow(base, -0.5 * sv));
            const double hi = std::max(1.0, std::pow(base, -0.5 * sv));
            const double inh = continuous_norm(c, sv, false);
            const double hom = continuous_norm(c, sv, true);
            if (hom < lo * inh * (1.0 - 1e-14) || hom > hi * inh * (1.0 + 1e-14)) {
                violations += 1.0;
            }
        }
    }
    return CheckResult{"continuous_norm_equivalence", violations == 0.0, violations, 0.0};
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options) {
    std::vector<CheckResult> out;
    out.push_back(eigenpairs(options.fault));
    out.push_back(coercivity(options.fault, options.samples));
    out.push_back(poincare(options.fault, options.samples));
    out.push_back(continuous_equivalence(options.samples));
    RatioSuiteOptions ratio;
    ratio.levels = {15, 31, 63};
    ratio.samples = options.samples;
    double worst = 0.0;
    for (const auto& suite : run_ratio_suites(ratio)) {
        worst = std::max(worst, suite.drift());
    }
    out.push_back(CheckResult{"ratio_suites_drift", worst <= 0.25, worst, 0.25});
    return out;
}

}  // namespace spme
