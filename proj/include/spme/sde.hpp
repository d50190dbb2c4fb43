#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spme/coeffs.hpp"
#include "spme/grid.hpp"
#include "spme/noise.hpp"

namespace spme {

enum class StepPolicy { adaptive, fixed_dt };
enum class Truncation { hard_stop, smooth_sigma };

struct SdeConfig {
    double alpha = 4.0;
    double kappa = 1.0;  // energy threshold h^{-kappa}
    double dt_max = 1e-3;
    double c_cfl = 0.4;
    double T = 0.05;
    StepPolicy policy = StepPolicy::adaptive;
    Truncation truncation = Truncation::hard_stop;
    std::uint64_t seed = 0;
    std::size_t n_out = 64;
    // fixed_dt: steps per output interval; 0 derives it from the CFL bound at u0.
    std::size_t substeps = 0;
    // fixed_dt: each step consumes this many consecutive fine noise increments.
    std::size_t noise_stride = 1;
    bool record_steps = false;
    std::uint64_t max_steps = 50'000'000;

    void validate() const;
    double energy_threshold(const Grid& grid) const;
    double output_interval() const { return T / static_cast<double>(n_out); }
};

struct Model {
    Nemytskii b = Nemytskii::affine(0.0, 0.0);
    Nemytskii r = Nemytskii::affine(0.0, 0.0);
    NoiseColoring coloring{};
};

struct SdeState {
    double t = 0.0;
    GridVec u;
    GridVec K;  // cumulative pushing
    bool stopped = false;
    std::size_t clamp_count = 0;

    explicit SdeState(GridVec u0) : u(std::move(u0)), K(u.grid) {}
};

// C-infinity cutoff: 1 on [0, 1], 0 on [2, inf).
double smooth_cutoff(double x);

// -L_n(u^alpha).
GridVec drift_pme(const GridVec& u, double alpha);

// dt = min(dt_max, c_cfl h^2 / (alpha (max u)^{alpha-1} + 1)).
double stable_dt(const GridVec& u, const SdeConfig& config);

// One explicit Euler-Maruyama step of length dt with mode increments dxi (variance dt).
// Indicators are read at the start state; negative results are clamped to zero.
SdeState step(const SdeState& state, const SdeConfig& config, const DiscreteCoefficients& coefficients,
              std::span<const double> dxi, double dt);

// Running integrals of one test vector phi (cell averages of the test function).
struct ObserverTrace {
    std::vector<double> phi;
    std::vector<double> drift;        // int <phi, -L u^alpha> dr at each snapshot
    std::vector<double> compensator;  // int sum_k mu_k^2 <phi, 1_{u>0} B_n(u) g_k>^2 dr
};

// Per-step record, kept only when config.record_steps is set.
struct StepLog {
    std::vector<double> t;
    std::vector<double> dt;
    std::vector<double> u_start;  // steps x n
    std::vector<double> qv;       // steps x n, increments 1_{u>0} Sigma_n dt
};

struct Trajectory {
    Grid grid;
    SdeConfig config;
    std::vector<double> times;
    std::vector<GridVec> u;
    std::vector<GridVec> K;
    std::vector<GridVec> qv;           // running int 1_{u>0} Sigma_n dr, per component
    std::vector<double> dissipation;   // running int ||u^alpha||^2_{H^1} dr
    std::vector<ObserverTrace> observers;
    std::optional<double> stop_time;
    std::uint64_t steps = 0;
    std::size_t clamps = 0;
    std::size_t refined_steps = 0;  // fixed_dt base steps split to satisfy the CFL bound
    std::optional<StepLog> log;

    explicit Trajectory(const Grid& g) : grid(g) {}
    std::size_t snapshots() const { return times.size(); }
};

// Integrates from u0 to T, storing n_out + 1 uniform snapshots (including t = 0).
// Throws NumericalError on a non-finite state or when max_steps is exhausted.
Trajectory simulate_path(const SdeConfig& config, const DiscreteCoefficients& coefficients, const GridVec& u0,
                         const NoiseStream& stream, std::span<const GridVec> observers = {});

// Substep count used by the fixed_dt policy when config.substeps is 0.
std::size_t derive_substeps(const GridVec& u0, const SdeConfig& config);

}  // namespace spme
