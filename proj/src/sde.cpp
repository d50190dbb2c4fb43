#include "spme/sde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spme/error.hpp"
#include "spme/functionals.hpp"
#include "spme/spectral.hpp"

namespace spme {

void SdeConfig::validate() const {
    if (!(alpha >= 4.0) || !std::isfinite(alpha)) {
        throw ConfigError("alpha: must be >= 4");
    }
    if (!(kappa > 0.0)) {
        throw ConfigError("kappa: must be positive");
    }
    if (!(dt_max > 0.0)) {
        throw ConfigError("dt_max: must be positive");
    }
    if (!(c_cfl > 0.0 && c_cfl <= 1.0)) {
        throw ConfigError("c_cfl: must lie in (0, 1]");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw ConfigError("T: must be positive");
    }
    if (n_out == 0) {
        throw ConfigError("n_out: must be positive");
    }
    if (noise_stride == 0) {
        throw ConfigError("noise_stride: must be positive");
    }
}

double SdeConfig::energy_threshold(const Grid& grid) const { return std::pow(grid.h(), -kappa); }

double smooth_cutoff(double x) {
    if (x <= 1.0) {
        return 1.0;
    }
    if (x >= 2.0) {
        return 0.0;
    }
    const auto bump = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    const double a = bump(2.0 - x);
    const double b = bump(x - 1.0);
    return a / (a + b);
}

GridVec drift_pme(const GridVec& u, double alpha) {
    GridVec w(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] >= 0.0)) {
            throw ConfigError("drift_pme: state must be nonnegative");
        }
        w[i] = std::pow(u[i], alpha);
    }
    GridVec out = apply_laplacian(w);
    for (double& x : out.values) {
        x = -x;
    }
    return out;
}

double stable_dt(const GridVec& u, const SdeConfig& config) {
    const double h = u.grid.h();
    const double umax = u.values.empty() ? 0.0 : *std::max_element(u.values.begin(), u.values.end());
    const double stiffness = config.alpha * std::pow(std::max(umax, 0.0), config.alpha - 1.0) + 1.0;
    return std::min(config.dt_max, config.c_cfl * h * h / stiffness);
}

std::size_t derive_substeps(const GridVec& u0, const SdeConfig& config) {
    const double dt = stable_dt(u0, config);
    return static_cast<std::size_t>(std::ceil(config.output_interval() / dt - 1e-9));
}

namespace {

// Shared step implementation; the public step() and simulate_path() both run through it.
class Kernel {
public:
    Kernel(const SdeConfig& config, const DiscreteCoefficients& coefficients, std::span<const GridVec> observers)
        : config_(config),
          coefficients_(coefficients),
          observers_(observers),
          n_(coefficients.grid().n()),
          h_(coefficients.grid().h()),
          threshold_(config.energy_threshold(coefficients.grid())),
          w_(n_),
          lw_(n_),
          noise_(n_),
          sigma_(n_) {}

    struct Increments {
        double dissipation = 0.0;
        std::span<double> qv;            // may be empty
        std::span<double> drift_obs;     // one per observer, may be empty
        std::span<double> comp_obs;
    };

    // Returns false when the hard stop fires (state left unchanged, stopped set).
    bool advance(SdeState& s, std::span<const double> dxi, double dt, Increments* inc) {
        if (s.stopped) {
            return false;
        }
        std::span<double> u = s.u.values;
        double energy = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double ua = std::pow(u[i], config_.alpha);
            w_[i] = ua;
            energy += ua * u[i];
        }
        energy *= h_;
        if (config_.truncation == Truncation::hard_stop && energy >= threshold_) {
            s.stopped = true;
            return false;
        }
        const double factor =
            config_.truncation == Truncation::smooth_sigma ? smooth_cutoff(energy / threshold_) : 1.0;
        apply_laplacian(coefficients_.grid(), w_, lw_);
        coefficients_.noise(u, dxi, noise_);

        if (inc != nullptr) {
            double d = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                d += w_[i] * lw_[i];
            }
            inc->dissipation = h_ * d * dt;
            if (!inc->qv.empty()) {
                coefficients_.sigma(u, sigma_);
                for (std::size_t i = 0; i < n_; ++i) {
                    inc->qv[i] = u[i] > 0.0 ? factor * factor * sigma_[i] * dt : 0.0;
                }
            }
            for (std::size_t o = 0; o < observers_.size(); ++o) {
                inc->drift_obs[o] = observer_drift(observers_[o], factor) * dt;
                inc->comp_obs[o] = observer_compensator(observers_[o], u, factor) * dt;
            }
        }

        for (std::size_t i = 0; i < n_; ++i) {
            const double ui = u[i];
            double next = ui - factor * lw_[i] * dt;
            if (ui > 0.0) {
                next += factor * noise_[i];
            } else {
                const double push = factor * coefficients_.sojourn(i, ui) * dt;
                next += push;
                s.K[i] += push;
            }
            if (!std::isfinite(next)) {
                throw NumericalError("sde: non-finite state at t = " + std::to_string(s.t) + ", component " +
                                     std::to_string(i + 1));
            }
            if (next < 0.0) {
                next = 0.0;
                ++s.clamp_count;
            }
            u[i] = next;
        }
        s.t += dt;
        return true;
    }

private:
    double observer_drift(const GridVec& phi, double factor) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            acc -= phi[i] * lw_[i];
        }
        return factor * h_ * acc;
    }

    double observer_compensator(const GridVec& phi, std::span<const double> u, double factor) {
        // <phi, 1_{u>0} B_n(u) g_k> for every retained mode.
        const std::size_t modes = coefficients_.retained_modes();
        double acc = 0.0;
        for (std::size_t k = 1; k <= modes; ++k) {
            double p = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (u[i] > 0.0) {
                    p += phi[i] * coefficients_.b_level(u[i]) * coefficients_.mode_cell_average(k, i);
                }
            }
            const double mu = coefficients_.mu(k);
            const double term = factor * h_ * p;
            acc += mu * mu * term * term;
        }
        return acc;
    }

    const SdeConfig& config_;
    const DiscreteCoefficients& coefficients_;
    std::span<const GridVec> observers_;
    std::size_t n_;
    double h_;
    double threshold_;
    std::vector<double> w_;
    std::vector<double> lw_;
    std::vector<double> noise_;
    std::vector<double> sigma_;
};

void check_initial(const GridVec& u0, const DiscreteCoefficients& coefficients) {
    if (!(u0.grid == coefficients.grid())) {
        throw ConfigError("simulate_path: initial datum grid does not match coefficients");
    }
    for (double x : u0.values) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw ConfigError("simulate_path: initial datum must be finite and nonnegative");
        }
    }
}

}  // namespace

SdeState step(const SdeState& state, const SdeConfig& config, const DiscreteCoefficients& coefficients,
              std::span<const double> dxi, double dt) {
    config.validate();
    if (!(dt > 0.0)) {
        throw ConfigError("step: dt must be positive");
    }
    SdeState next = state;
    Kernel kernel(config, coefficients, {});
    kernel.advance(next, dxi, dt, nullptr);
    return next;
}

Trajectory simulate_path(const SdeConfig& config, const DiscreteCoefficients& coefficients, const GridVec& u0,
                         const NoiseStream& stream, std::span<const GridVec> observers) {
    config.validate();
    check_initial(u0, coefficients);
    for (const auto& phi : observers) {
        if (!(phi.grid == u0.grid)) {
            throw ConfigError("simulate_path: observer grid mismatch");
        }
    }
    const Grid& grid = u0.grid;
    const std::size_t n = grid.n();
    const std::size_t n_obs = observers.size();

    Trajectory traj(grid);
    traj.config = config;
    traj.times.reserve(config.n_out + 1);
    traj.observers.resize(n_obs);
    for (std::size_t o = 0; o < n_obs; ++o) {
        traj.observers[o].phi = observers[o].values;
    }
    if (config.record_steps) {
        traj.log.emplace();
    }

    SdeState state(u0);
    GridVec qv_running(grid);
    double dissipation_running = 0.0;
    std::vector<double> drift_running(n_obs, 0.0);
    std::vector<double> comp_running(n_obs, 0.0);

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.u.push_back(state.u);
        traj.K.push_back(state.K);
        traj.qv.push_back(qv_running);
        traj.dissipation.push_back(dissipation_running);
        for (std::size_t o = 0; o < n_obs; ++o) {
            traj.observers[o].drift.push_back(drift_running[o]);
            traj.observers[o].compensator.push_back(comp_running[o]);
        }
    };

    Kernel kernel(config, coefficients, observers);
    std::vector<double> qv_inc(n, 0.0);
    std::vector<double> drift_inc(n_obs, 0.0);
    std::vector<double> comp_inc(n_obs, 0.0);
    std::vector<double> dxi(coefficients.retained_modes(), 0.0);
    Kernel::Increments inc{0.0, qv_inc, drift_inc, comp_inc};

    const std::size_t substeps =
        config.policy == StepPolicy::fixed_dt ? (config.substeps > 0 ? config.substeps : derive_substeps(u0, config))
                                              : 0;
    const double interval = config.output_interval();

    std::uint64_t step_index = 0;
    // One kernel step; false once the hard stop fires.
    auto take_step = [&](double dt, std::span<const double> increments) {
        if (step_index >= config.max_steps) {
            throw NumericalError("sde: step budget exhausted at step " + std::to_string(step_index) +
                                 ", t = " + std::to_string(state.t));
        }
        const double t_start = state.t;
        if (traj.log) {
            traj.log->t.push_back(t_start);
            traj.log->dt.push_back(dt);
            traj.log->u_start.insert(traj.log->u_start.end(), state.u.values.begin(), state.u.values.end());
        }
        if (!kernel.advance(state, increments, dt, &inc)) {
            if (traj.log) {
                traj.log->t.pop_back();
                traj.log->dt.pop_back();
                traj.log->u_start.resize(traj.log->u_start.size() - n);
            }
            traj.stop_time = t_start;
            return false;
        }
        ++step_index;
        dissipation_running += inc.dissipation;
        for (std::size_t i = 0; i < n; ++i) {
            qv_running[i] += qv_inc[i];
        }
        for (std::size_t o = 0; o < n_obs; ++o) {
            drift_running[o] += drift_inc[o];
            comp_running[o] += comp_inc[o];
        }
        if (traj.log) {
            traj.log->qv.insert(traj.log->qv.end(), qv_inc.begin(), qv_inc.end());
        }
        return true;
    };

    // Fixed-dt steps that would violate the CFL bound are halved recursively, with the
    // noise refined by the Brownian bridge so every grid sharing the base step stays coupled.
    constexpr int kMaxDepth = 48;
    auto refine = [&](auto& self, std::uint64_t base, std::uint64_t node, int depth, double dt,
                      std::span<const double> increments) -> bool {
        if (stable_dt(state.u, config) >= dt * (1.0 - 1e-12)) {
            return take_step(dt, increments);
        }
        if (depth == kMaxDepth) {
            throw NumericalError("sde: step refinement exhausted at t = " + std::to_string(state.t));
        }
        if (depth == 0) {
            ++traj.refined_steps;
        }
        std::vector<double> left(increments.size());
        std::vector<double> right(increments.size());
        bridge_split(stream, base, node, dt, increments, left, right);
        return self(self, base, 2 * node, depth + 1, 0.5 * dt, left) &&
               self(self, base, 2 * node + 1, depth + 1, 0.5 * dt, right);
    };

    record(0.0);
    std::uint64_t base_index = 0;
    for (std::size_t j = 1; j <= config.n_out; ++j) {
        const double target = config.T * static_cast<double>(j) / static_cast<double>(config.n_out);
        if (config.policy == StepPolicy::fixed_dt) {
            const double dt = interval / static_cast<double>(substeps);
            for (std::size_t sub = 0; sub < substeps && !state.stopped; ++sub, ++base_index) {
                sample_increments(stream, base_index * config.noise_stride, config.noise_stride, dt, dxi);
                refine(refine, base_index, 1, 0, dt, dxi);
            }
            if (!state.stopped) {
                state.t = target;
            }
        } else {
            while (!state.stopped) {
                const double remaining = target - state.t;
                if (remaining <= 0.0) {
                    break;
                }
                double dt = stable_dt(state.u, config);
                const bool last = dt >= remaining * (1.0 - 1e-12);
                if (last) {
                    dt = remaining;
                }
                sample_increments(stream, step_index, 1, dt, dxi);
                if (take_step(dt, dxi) && last) {
                    state.t = target;
                    break;
                }
            }
        }
        record(target);
    }
    traj.steps = step_index;
    traj.clamps = state.clamp_count;
    return traj;
}

}  // namespace spme
