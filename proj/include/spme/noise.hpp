#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spme/coeffs.hpp"

namespace spme {

// Stateless Gaussian source keyed by (seed, path, step, mode). Any draw can be
// reproduced without replaying the stream, which makes paths independent of worker
// scheduling and lets grids of different size share the same per-mode increments.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t path) : key_(mix(seed, path)) {}

    // Standard normal for (step, mode), mode 0-based.
    double normal(std::uint64_t step, std::size_t mode) const;
    // Both normals of the Box-Muller pair holding modes 2*pair and 2*pair + 1.
    std::pair<double, double> normal_pair(std::uint64_t step, std::uint64_t pair) const;

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

private:
    std::uint64_t key_;
};

// Brownian increments of the first `retained` modes over one step of length dt
// (variance dt each). When `stride > 1` the step covers `stride` consecutive fine steps
// starting at `fine_step` and the increment is the sum of the fine increments, each of
// variance dt / stride.
void sample_increments(const NoiseStream& stream, std::uint64_t fine_step, std::size_t stride, double dt,
                       std::span<double> out);

// Midpoint split of `whole`, an increment over a step of length dt, by the Brownian
// bridge. `node` is the heap index of the halved interval inside base step `step`
// (1 for the base step itself), so every grid that refines the same interval draws
// the same bridge values and the sum left + right reproduces `whole` exactly.
void bridge_split(const NoiseStream& stream, std::uint64_t step, std::uint64_t node, double dt,
                  std::span<const double> whole, std::span<double> left, std::span<double> right);

std::vector<double> sample_increments(const NoiseColoring& coloring, const NoiseStream& stream,
                                      std::uint64_t step, double dt, std::size_t retained);

}  // namespace spme
