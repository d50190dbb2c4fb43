#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spme/coeffs.hpp"
#include "spme/functionals.hpp"
#include "spme/grid.hpp"
#include "spme/sde.hpp"

namespace spme {

enum class InitialKind { zero, sine_bump, hat, two_bumps };

// u0 families. The grid datum is the piecewise-linear projection clamped at zero.
struct InitialDatum {
    InitialKind kind = InitialKind::sine_bump;
    double amplitude = 1.0;
    double power = 1.0;  // sine_bump: amplitude * sin(pi x)^power

    ScalarFunction function() const;
    GridVec on(const Grid& grid) const;
    void validate() const;
};

struct ExperimentPlan {
    std::vector<std::size_t> levels{15, 31, 63};
    std::size_t paths = 256;
    bool coupling = false;
    std::vector<double> p_list{2.0};
    HolderSpec holder{};
    std::uint64_t seed = 0;
    std::vector<double> epsilons;      // stickiness thresholds; empty uses the pooled quantile only
    double stick_quantile = 0.2;
    std::size_t threads = 0;           // 0: STICKY_SPME_THREADS or the hardware count

    void validate() const;
    // Throws unless n_{j+1} = 2 n_j + 1.
    void require_nested() const;
};

// Worker count: explicit request, else STICKY_SPME_THREADS, else hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

// Calls fn(i) for i in [0, count) on `threads` workers. Rethrows the exception of the
// lowest failing index after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

// Per-level simulation settings. With coupling every level runs the fixed step of the
// finest level and reads the same per-path noise stream.
SdeConfig level_config(const ExperimentPlan& plan, const SdeConfig& base, const InitialDatum& u0, std::size_t n);

NoiseStream level_stream(const ExperimentPlan& plan, std::size_t n, std::size_t path);

struct MomentRow {
    std::size_t n;
    double p;
    std::string functional;  // sup_energy, dissipation, sup_g_energy, holder_sq
    double estimate;
    double stderr_;
    std::size_t paths;
    std::size_t stopped;
    std::size_t clamps;
};

struct MomentReport {
    std::vector<MomentRow> rows;
    bool partial = false;
    std::string failure;
};

MomentReport run_moments(const ExperimentPlan& plan, const SdeConfig& config, const Model& model,
                         const InitialDatum& u0);

struct ConvergenceRow {
    std::size_t n_coarse;
    std::size_t n_fine;
    double gap;
    double stderr_;
    std::size_t paths;
    std::vector<double> per_path;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
};

// sup over snapshots and the nodes of `target` of |u_a - u_b|, both read through their
// piecewise-linear interpolants.
double trajectory_gap(const Trajectory& a, const Trajectory& b, const Grid& target);

ConvergenceReport run_convergence(const ExperimentPlan& plan, const SdeConfig& config, const Model& model,
                                  const InitialDatum& u0);

struct Interval {
    double lo;
    double hi;
};

Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct StickinessRow {
    std::size_t n;
    double epsilon;
    double prob;
    double ci_lo;
    double ci_hi;
    std::size_t paths;
};

struct StickinessReport {
    std::vector<std::size_t> levels;
    std::vector<std::vector<double>> samples;  // S(u_n) per level and path
    double pooled_threshold = 0.0;             // plan.stick_quantile of the pooled sample
    std::vector<StickinessRow> rows;
};

// Empirical q-quantile (lower order statistic) of x.
double pooled_quantile(std::vector<double> x, double q);

StickinessReport run_stickiness(const ExperimentPlan& plan, const SdeConfig& config, const Model& model,
                                const InitialDatum& u0);

// Simulates `paths` independent paths on one grid with observers attached.
std::vector<Trajectory> run_ensemble(const SdeConfig& config, const DiscreteCoefficients& coefficients,
                                     const GridVec& u0, std::size_t paths, std::span<const GridVec> observers,
                                     std::size_t threads);

}  // namespace spme
