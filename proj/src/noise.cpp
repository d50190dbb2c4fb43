#include "spme/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spme/error.hpp"

namespace spme {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1], never 0 so the logarithm below stays finite.
double to_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

std::uint64_t NoiseStream::mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

std::pair<double, double> NoiseStream::normal_pair(std::uint64_t step, std::uint64_t pair) const {
    const std::uint64_t base = mix(mix(key_, step), pair);
    const double u1 = to_unit(splitmix64(base));
    const double u2 = to_unit(splitmix64(base ^ 0xd6e8feb86659fd93ULL));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

double NoiseStream::normal(std::uint64_t step, std::size_t mode) const {
    const auto [even, odd] = normal_pair(step, mode / 2);
    return (mode % 2 == 0) ? even : odd;
}

void sample_increments(const NoiseStream& stream, std::uint64_t fine_step, std::size_t stride, double dt,
                       std::span<double> out) {
    if (!(dt > 0.0)) {
        throw ConfigError("sample_increments: dt must be positive");
    }
    if (stride == 0) {
        throw ConfigError("sample_increments: stride must be positive");
    }
    const double scale = std::sqrt(dt / static_cast<double>(stride));
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t s = 0; s < stride; ++s) {
        for (std::size_t k = 0; k < out.size(); k += 2) {
            const auto [even, odd] = stream.normal_pair(fine_step + s, k / 2);
            out[k] += even;
            if (k + 1 < out.size()) {
                out[k + 1] += odd;
            }
        }
    }
    for (double& x : out) {
        x *= scale;
    }
}

void bridge_split(const NoiseStream& stream, std::uint64_t step, std::uint64_t node, double dt,
                  std::span<const double> whole, std::span<double> left, std::span<double> right) {
    if (left.size() != whole.size() || right.size() != whole.size()) {
        throw ConfigError("bridge_split: size mismatch");
    }
    const std::uint64_t key = NoiseStream::mix(step ^ 0xa0761d6478bd642fULL, node);
    const double scale = 0.5 * std::sqrt(dt);
    for (std::size_t k = 0; k < whole.size(); k += 2) {
        const auto [even, odd] = stream.normal_pair(key, k / 2);
        left[k] = 0.5 * whole[k] + scale * even;
        if (k + 1 < whole.size()) {
            left[k + 1] = 0.5 * whole[k + 1] + scale * odd;
        }
    }
    for (std::size_t k = 0; k < whole.size(); ++k) {
        right[k] = whole[k] - left[k];
    }
}

std::vector<double> sample_increments(const NoiseColoring& coloring, const NoiseStream& stream,
                                      std::uint64_t step, double dt, std::size_t retained) {
    std::vector<double> out(std::min(retained, coloring.n_modes));
    sample_increments(stream, step, 1, dt, out);
    return out;
}

}  // namespace spme
