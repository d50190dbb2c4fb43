#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spme/coeffs.hpp"

namespace spme {

// Empirical sup of one inequality ratio, per grid level.
struct RatioSuite {
    std::string name;
    std::vector<std::size_t> levels;
    std::vector<double> sup_ratio;

    // max_j |sup_j / sup_0 - 1|.
    double drift() const;
};

struct RatioSuiteOptions {
    std::vector<std::size_t> levels{15, 31, 63, 127};
    std::size_t samples = 1000;
    double alpha = 4.0;
    std::uint64_t seed = 20240917;
    Nemytskii b = Nemytskii::affine(0.5, 1.0);
    Nemytskii r = Nemytskii::affine(1.0, 0.5);
    NoiseColoring coloring{};
};

// Random band-limited sine series f(x) = sum_j a_j sin(k_j pi x) with 1 to 6 terms and
// k_j <= 4, identical for every level; sample s is reproducible from (seed, s).
struct BandLimited {
    std::vector<std::size_t> k;
    std::vector<double> a;

    double operator()(double x) const;
    static BandLimited draw(std::uint64_t seed, std::uint64_t sample);
};

// Sup-ratio suites for the pointwise product, power, discretized-power and
// discretized-coefficient estimates.
std::vector<RatioSuite> run_ratio_suites(const RatioSuiteOptions& options);

// Ratio ||v_n||_theta / ||pl(v_n)||_{H^theta_0} over random v, min and max per level.
struct EquivalenceBand {
    double theta;
    std::vector<std::size_t> levels;
    std::vector<double> lo;
    std::vector<double> hi;

    // max_j (hi_j / lo_j) / (hi_0 / lo_0).
    double growth() const;
};

std::vector<EquivalenceBand> discrete_continuous_bands(const std::vector<std::size_t>& levels,
                                                       const std::vector<double>& thetas, std::size_t samples,
                                                       std::uint64_t seed);

}  // namespace spme
