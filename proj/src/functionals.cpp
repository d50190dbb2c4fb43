#include "spme/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spme/error.hpp"

namespace spme {

namespace {

void require_nonnegative(const GridVec& u, const char* who) {
    for (double x : u.values) {
        if (!(x >= 0.0)) {
            throw ConfigError(std::string(who) + ": input must be nonnegative");
        }
    }
}

GridVec power_of(const GridVec& u, double p) {
    GridVec w(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        w[i] = std::pow(u[i], p);
    }
    return w;
}

double mean(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v;
    }
    return acc / static_cast<double>(x.size());
}

double standard_error(std::span<const double> x, double m) {
    if (x.size() < 2) {
        return 0.0;
    }
    double acc = 0.0;
    for (double v : x) {
        acc += (v - m) * (v - m);
    }
    return std::sqrt(acc / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

// Value at boundary-inclusive index j in 0..n+1.
double extended(const GridVec& u, std::size_t j) {
    if (j == 0 || j == u.size() + 1) {
        return 0.0;
    }
    return u[j - 1];
}

}  // namespace

double energy(const GridVec& u, double alpha) {
    require_nonnegative(u, "energy");
    double acc = 0.0;
    for (double x : u.values) {
        acc += std::pow(x, alpha + 1.0);
    }
    return u.grid.h() * acc;
}

double g_energy(const SpectralBasis& basis, const GridVec& u, double alpha) {
    require_nonnegative(u, "g_energy");
    const double norm = discrete_norm(basis, power_of(u, alpha), (alpha - 2.0) / alpha);
    return norm * norm;
}

double g_energy(const GridVec& u, double alpha) { return g_energy(SpectralBasis::build(u.grid), u, alpha); }

double dissipation_rate(const GridVec& u, double alpha) {
    require_nonnegative(u, "dissipation_rate");
    const GridVec w = power_of(u, alpha);
    const GridVec lw = apply_laplacian(w);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i] * lw[i];
    }
    return u.grid.h() * acc;
}

double stickiness(const Trajectory& traj) {
    const double h = traj.grid.h();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < traj.snapshots(); ++j) {
        const double dt = traj.times[j + 1] - traj.times[j];
        std::size_t zeros = 0;
        for (double x : traj.u[j].values) {
            zeros += x == 0.0 ? 1 : 0;
        }
        acc += static_cast<double>(zeros) * h * dt;
    }
    return acc;
}

void HolderSpec::validate() const {
    if (!(gamma1 >= 0.0 && gamma1 < 1.0) || !(gamma2 >= 0.0 && gamma2 < 1.0)) {
        throw ConfigError("holder: exponents must lie in [0, 1)");
    }
}

double holder_norm(const Trajectory& traj, const HolderSpec& spec) {
    spec.validate();
    const std::size_t snaps = traj.snapshots();
    const std::size_t n = traj.grid.n();
    double sup = 0.0;
    for (const auto& u : traj.u) {
        for (double x : u.values) {
            sup = std::max(sup, std::abs(x));
        }
    }
    double time_semi = 0.0;
    if (spec.gamma1 > 0.0) {
        for (std::size_t a = 0; a < snaps; ++a) {
            for (std::size_t b = a + 1; b < snaps; ++b) {
                const double w = std::pow(traj.times[b] - traj.times[a], -spec.gamma1);
                for (std::size_t i = 0; i < n; ++i) {
                    time_semi = std::max(time_semi, std::abs(traj.u[b][i] - traj.u[a][i]) * w);
                }
            }
        }
    }
    double space_semi = 0.0;
    if (spec.gamma2 > 0.0) {
        const double h = traj.grid.h();
        std::vector<double> lag(n + 2, 0.0);
        for (std::size_t d = 1; d <= n + 1; ++d) {
            lag[d] = std::pow(static_cast<double>(d) * h, -spec.gamma2);
        }
        for (const auto& u : traj.u) {
            for (std::size_t a = 0; a <= n + 1; ++a) {
                const double ua = extended(u, a);
                for (std::size_t b = a + 1; b <= n + 1; ++b) {
                    space_semi = std::max(space_semi, std::abs(extended(u, b) - ua) * lag[b - a]);
                }
            }
        }
    }
    return sup + time_semi + space_semi;
}

void TimeSobolevSpec::validate() const {
    if (!(s > 0.0 && s < 1.0)) {
        throw ConfigError("time_sobolev: s must lie in (0, 1)");
    }
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw ConfigError("time_sobolev: p must be >= 1");
    }
    if (!(s * p < 1.0 + p)) {
        throw ConfigError("time_sobolev: s * p must be below 1 + p");
    }
    if (!(std::abs(theta) <= 1.0)) {
        throw ConfigError("time_sobolev: theta must lie in [-1, 1]");
    }
    if (!(power >= 0.0)) {
        throw ConfigError("time_sobolev: power must be nonnegative");
    }
}

double TimeSobolevValue::total() const { return lp + seminorm; }

TimeSobolevValue time_sobolev_norm(const Trajectory& traj, const TimeSobolevSpec& spec) {
    spec.validate();
    const std::size_t snaps = traj.snapshots();
    if (snaps < 2) {
        throw ConfigError("time_sobolev: at least two snapshots required");
    }
    const double power = spec.power > 0.0 ? spec.power : traj.config.alpha + 1.0;
    const SpectralBasis basis = SpectralBasis::build(traj.grid);
    std::vector<GridVec> w;
    w.reserve(snaps);
    for (const auto& u : traj.u) {
        w.push_back(power_of(u, power));
    }
    // Uniform weight per snapshot: the mean snapshot spacing.
    const double weight = (traj.times.back() - traj.times.front()) / static_cast<double>(snaps - 1);
    TimeSobolevValue out;
    for (std::size_t j = 0; j < snaps; ++j) {
        out.lp += weight * std::pow(discrete_norm(basis, w[j], spec.theta), spec.p);
    }
    GridVec diff(traj.grid);
    for (std::size_t a = 0; a < snaps; ++a) {
        for (std::size_t b = a + 1; b < snaps; ++b) {
            for (std::size_t i = 0; i < diff.size(); ++i) {
                diff[i] = w[b][i] - w[a][i];
            }
            const double gap = traj.times[b] - traj.times[a];
            const double term = std::pow(discrete_norm(basis, diff, spec.theta), spec.p) /
                                std::pow(gap, 1.0 + spec.s * spec.p);
            out.seminorm += 2.0 * weight * weight * term;
        }
    }
    return out;
}

BetaExponents beta_exponents(double alpha) {
    if (!(alpha >= 4.0) || !std::isfinite(alpha)) {
        throw ConfigError("beta_exponents: alpha must be >= 4");
    }
    const double a = alpha;
    return BetaExponents{(a - 2.0) * (a - 4.0) / (4.0 * (a - 1.0) * (a + 1.0) * (a * a + a - 4.0)),
                         (a - 4.0) / (2.0 * a * a), (a - 2.0) / (4.0 * (a - 1.0) * (a + 1.0))};
}

double martingale_m1(const Trajectory& traj, std::size_t index) {
    if (index >= traj.observers.size()) {
        throw ConfigError("martingale: observer index out of range");
    }
    const auto& obs = traj.observers[index];
    const std::size_t last = traj.snapshots() - 1;
    const double h = traj.grid.h();
    double pairing = 0.0;
    for (std::size_t i = 0; i < obs.phi.size(); ++i) {
        pairing += obs.phi[i] * (traj.u[last][i] - traj.u[0][i] - traj.K[last][i]);
    }
    return h * pairing - obs.drift[last];
}

MartingaleDiagnostics martingale_residual(std::span<const Trajectory> ensemble, std::size_t index) {
    MartingaleDiagnostics out;
    out.paths = ensemble.size();
    if (ensemble.empty()) {
        return out;
    }
    const Trajectory& ref = ensemble.front();
    std::vector<double> m1(ensemble.size());
    std::vector<double> gap(ensemble.size());
    std::vector<double> comp(ensemble.size());
    std::vector<double> pairing(ensemble.size());
    for (std::size_t p = 0; p < ensemble.size(); ++p) {
        const Trajectory& tr = ensemble[p];
        if (!(tr.grid == ref.grid) || tr.config.alpha != ref.config.alpha || tr.config.T != ref.config.T ||
            tr.config.n_out != ref.config.n_out || tr.observers.size() != ref.observers.size() ||
            tr.snapshots() != ref.snapshots()) {
            throw ConfigError("martingale: ensemble mixes configurations (path " + std::to_string(p) + ")");
        }
        const std::size_t last = tr.snapshots() - 1;
        m1[p] = martingale_m1(tr, index);
        comp[p] = tr.observers[index].compensator[last];
        gap[p] = m1[p] * m1[p] - comp[p];
        double acc = 0.0;
        for (std::size_t i = 0; i < tr.grid.n(); ++i) {
            acc += tr.observers[index].phi[i] * tr.qv[last][i];
        }
        pairing[p] = tr.grid.h() * acc;
    }
    out.mean_m1 = mean(m1);
    out.se_m1 = standard_error(m1, out.mean_m1);
    out.mean_qv_gap = mean(gap);
    out.se_qv_gap = standard_error(gap, out.mean_qv_gap);
    out.mean_compensator = mean(comp);
    out.mean_sigma_pairing = mean(pairing);
    return out;
}

std::vector<double> occupation_near_zero(const Trajectory& traj, double eps) {
    if (!(eps > 0.0)) {
        throw ConfigError("occupation_near_zero: eps must be positive");
    }
    if (!traj.log) {
        throw ConfigError("occupation_near_zero: trajectory has no step log");
    }
    const std::size_t n = traj.grid.n();
    const auto& log = *traj.log;
    std::vector<double> out(n, 0.0);
    for (std::size_t s = 0; s < log.t.size(); ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = log.u_start[s * n + i];
            if (u > 0.0 && u < eps) {
                out[i] += log.qv[s * n + i];
            }
        }
    }
    return out;
}

}  // namespace spme
