#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spme/grid.hpp"
#include "spme/sde.hpp"
#include "spme/spectral.hpp"

namespace spme {

// h * sum u_i^{alpha+1}.
double energy(const GridVec& u, double alpha);

// ||u^alpha||^2 in the discrete H^{(alpha-2)/alpha} norm.
double g_energy(const SpectralBasis& basis, const GridVec& u, double alpha);
double g_energy(const GridVec& u, double alpha);

// ||u^alpha||^2 in the discrete H^1 norm, h (u^alpha)^T L_n (u^alpha).
double dissipation_rate(const GridVec& u, double alpha);

// Left-point sum over snapshot intervals of h * #{i : u_i = 0} * dt.
double stickiness(const Trajectory& traj);

struct HolderSpec {
    double gamma1 = 0.0;  // time
    double gamma2 = 0.0;  // space

    void validate() const;
};

// sup |u| + [u]_{time, gamma1} + [u]_{space, gamma2} over snapshots and nodes
// (boundary nodes included). A zero exponent drops its seminorm term.
double holder_norm(const Trajectory& traj, const HolderSpec& spec);

struct TimeSobolevSpec {
    double s = 0.5;
    double p = 2.0;
    double theta = 0.0;
    // Exponent applied to u before taking norms; 0 selects alpha + 1.
    double power = 0.0;

    void validate() const;
};

struct TimeSobolevValue {
    double lp = 0.0;        // sum_j dt ||w(t_j)||^p, dt the mean snapshot spacing
    double seminorm = 0.0;  // sum_{j != l} dt^2 ||w_j - w_l||^p / |t_j - t_l|^{1 + s p}
    double total() const;   // lp + seminorm
};

TimeSobolevValue time_sobolev_norm(const Trajectory& traj, const TimeSobolevSpec& spec);

struct BetaExponents {
    double beta1;
    double beta2;
    double gamma_max;
};

BetaExponents beta_exponents(double alpha);

struct MartingaleDiagnostics {
    std::size_t paths = 0;
    double mean_m1 = 0.0;
    double se_m1 = 0.0;
    // mean of M1(T)^2 minus the quadratic-variation compensator, per path.
    double mean_qv_gap = 0.0;
    double se_qv_gap = 0.0;
    double mean_compensator = 0.0;
    // h sum_i phi_i int 1_{u_i>0} Sigma_i dr, mean over paths.
    double mean_sigma_pairing = 0.0;
};

// M1(T) = <phi, u(T) - u(0)> - int <phi, -L u^alpha> dr - <phi, K(T)> for observer `index`.
double martingale_m1(const Trajectory& traj, std::size_t index);
MartingaleDiagnostics martingale_residual(std::span<const Trajectory> ensemble, std::size_t index);

// sum over steps of 1_{0 < u_i < eps} * (1_{u_i > 0} Sigma_n)_i dt, per component.
// Requires a trajectory recorded with record_steps.
std::vector<double> occupation_near_zero(const Trajectory& traj, double eps);

}  // namespace spme
