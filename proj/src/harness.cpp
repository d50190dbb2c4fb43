#include "spme/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "spme/error.hpp"
#include "spme/spectral.hpp"

namespace spme {

namespace {

double bump(double x, double c, double w) {
    const double s = (x - c) / w;
    const double v = 1.0 - s * s;
    return v > 0.0 ? v * v : 0.0;
}

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

Moments moments_of(const std::vector<double>& x) {
    Moments m;
    if (x.empty()) {
        return m;
    }
    for (double v : x) {
        m.mean += v;
    }
    m.mean /= static_cast<double>(x.size());
    if (x.size() > 1) {
        double acc = 0.0;
        for (double v : x) {
            acc += (v - m.mean) * (v - m.mean);
        }
        m.se = std::sqrt(acc / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    }
    return m;
}

}  // namespace

ScalarFunction InitialDatum::function() const {
    const double a = amplitude;
    switch (kind) {
        case InitialKind::zero:
            return [](double) { return 0.0; };
        case InitialKind::sine_bump: {
            const double p = power;
            return [a, p](double x) { return a * std::pow(std::max(std::sin(std::numbers::pi * x), 0.0), p); };
        }
        case InitialKind::hat:
            return [a](double x) { return a * std::max(0.0, 1.0 - std::abs(x - 0.5) / 0.25); };
        case InitialKind::two_bumps:
            return [a](double x) { return a * (bump(x, 0.3, 0.15) + bump(x, 0.7, 0.15)); };
    }
    throw ConfigError("u0_kind: unknown kind");
}

GridVec InitialDatum::on(const Grid& grid) const {
    validate();
    GridVec u = project_pl(function(), grid);
    for (double& x : u.values) {
        x = std::max(x, 0.0);
    }
    return u;
}

void InitialDatum::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw ConfigError("u0_amplitude: must be finite and nonnegative");
    }
    if (!(power > 0.0) || !std::isfinite(power)) {
        throw ConfigError("u0_power: must be positive");
    }
}

void ExperimentPlan::validate() const {
    if (levels.empty()) {
        throw ConfigError("levels: at least one level required");
    }
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (levels[j] == 0) {
            throw ConfigError("levels: sizes must be positive");
        }
        if (j > 0 && levels[j] <= levels[j - 1]) {
            throw ConfigError("levels: sizes must be strictly increasing");
        }
    }
    if (paths == 0) {
        throw ConfigError("paths: must be positive");
    }
    for (double p : p_list) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw ConfigError("p_list: orders must be positive");
        }
    }
    holder.validate();
    for (double e : epsilons) {
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw ConfigError("epsilons: thresholds must be finite and nonnegative");
        }
    }
    if (!(stick_quantile >= 0.0 && stick_quantile <= 1.0)) {
        throw ConfigError("stick_quantile: must lie in [0, 1]");
    }
    if (coupling) {
        require_nested();
    }
}

void ExperimentPlan::require_nested() const {
    for (std::size_t j = 1; j < levels.size(); ++j) {
        if (levels[j] != 2 * levels[j - 1] + 1) {
            throw ConfigError("levels: coupled levels must be nested (n_next = 2 n + 1), got " +
                              std::to_string(levels[j - 1]) + " -> " + std::to_string(levels[j]));
        }
    }
}

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("STICKY_SPME_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    std::atomic<std::size_t> next{0};
    std::mutex lock;
    std::size_t failed_index = count;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> guard(lock);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

SdeConfig level_config(const ExperimentPlan& plan, const SdeConfig& base, const InitialDatum& u0, std::size_t) {
    SdeConfig config = base;
    config.seed = plan.seed;
    if (plan.coupling) {
        const Grid finest(plan.levels.back());
        config.policy = StepPolicy::fixed_dt;
        if (config.substeps == 0) {
            config.substeps = derive_substeps(u0.on(finest), base);
        }
        config.noise_stride = 1;
    }
    return config;
}

NoiseStream level_stream(const ExperimentPlan& plan, std::size_t n, std::size_t path) {
    if (plan.coupling) {
        return NoiseStream(plan.seed, path);
    }
    return NoiseStream(NoiseStream::mix(plan.seed, n), path);
}

MomentReport run_moments(const ExperimentPlan& plan, const SdeConfig& config, const Model& model,
                         const InitialDatum& u0) {
    plan.validate();
    config.validate();
    const std::size_t threads = resolve_threads(plan.threads);
    MomentReport report;
    for (std::size_t n : plan.levels) {
        const Grid grid(n);
        const SdeConfig cfg = level_config(plan, config, u0, n);
        const DiscreteCoefficients coeffs(grid, model.b, model.r, model.coloring);
        const SpectralBasis basis = SpectralBasis::build(grid);
        const GridVec start = u0.on(grid);

        std::vector<double> sup_e(plan.paths), diss(plan.paths), sup_g(plan.paths), holder(plan.paths);
        std::vector<char> stopped(plan.paths, 0);
        std::vector<std::size_t> clamps(plan.paths, 0);
        try {
            parallel_for(plan.paths, threads, [&](std::size_t p) {
                const Trajectory traj = simulate_path(cfg, coeffs, start, level_stream(plan, n, p));
                double se = 0.0;
                double sg = 0.0;
                for (const auto& u : traj.u) {
                    se = std::max(se, energy(u, cfg.alpha));
                    sg = std::max(sg, g_energy(basis, u, cfg.alpha));
                }
                sup_e[p] = se;
                sup_g[p] = sg;
                diss[p] = traj.dissipation.back();
                const double hn = holder_norm(traj, plan.holder);
                holder[p] = hn * hn;
                stopped[p] = traj.stop_time.has_value() ? 1 : 0;
                clamps[p] = traj.clamps;
            });
        } catch (const NumericalError& e) {
            report.partial = true;
            report.failure = "level n = " + std::to_string(n) + ": " + e.what();
            return report;
        }
        std::size_t n_stopped = 0;
        std::size_t n_clamps = 0;
        for (std::size_t p = 0; p < plan.paths; ++p) {
            n_stopped += static_cast<std::size_t>(stopped[p]);
            n_clamps += clamps[p];
        }
        auto emit = [&](double p, const char* name, const std::vector<double>& base, double exponent) {
            std::vector<double> x(base.size());
            for (std::size_t k = 0; k < base.size(); ++k) {
                x[k] = std::pow(base[k], exponent);
            }
            const Moments m = moments_of(x);
            report.rows.push_back(MomentRow{n, p, name, m.mean, m.se, plan.paths, n_stopped, n_clamps});
        };
        for (double p : plan.p_list) {
            emit(p, "sup_energy", sup_e, p / 2.0);
            emit(p, "dissipation", diss, p);
            emit(p, "sup_g_energy", sup_g, p / 2.0);
        }
        emit(2.0, "holder_sq", holder, 1.0);
    }
    return report;
}

double trajectory_gap(const Trajectory& a, const Trajectory& b, const Grid& target) {
    if (a.snapshots() != b.snapshots()) {
        throw ConfigError("trajectory_gap: snapshot counts differ");
    }
    const std::vector<double> x = target.nodes();
    double gap = 0.0;
    for (std::size_t j = 0; j < a.snapshots(); ++j) {
        for (double xi : x) {
            gap = std::max(gap, std::abs(eval_pl(a.u[j], xi) - eval_pl(b.u[j], xi)));
        }
    }
    return gap;
}

ConvergenceReport run_convergence(const ExperimentPlan& plan, const SdeConfig& config, const Model& model,
                                  const InitialDatum& u0) {
    plan.validate();
    plan.require_nested();
    if (!plan.coupling) {
        throw ConfigError("coupling: convergence study requires coupled levels");
    }
    config.validate();
    const std::size_t threads = resolve_threads(plan.threads);
    const std::size_t L = plan.levels.size();
    const Grid finest(plan.levels.back());

    std::vector<Grid> grids;
    std::vector<DiscreteCoefficients> coeffs;
    std::vector<GridVec> starts;
    std::vector<SdeConfig> cfgs;
    for (std::size_t n : plan.levels) {
        grids.emplace_back(n);
        coeffs.emplace_back(grids.back(), model.b, model.r, model.coloring);
        starts.push_back(u0.on(grids.back()));
        cfgs.push_back(level_config(plan, config, u0, n));
    }
    std::vector<std::vector<double>> gaps(L > 0 ? L - 1 : 0, std::vector<double>(plan.paths, 0.0));
    parallel_for(plan.paths, threads, [&](std::size_t p) {
        std::vector<Trajectory> trajs;
        trajs.reserve(L);
        for (std::size_t l = 0; l < L; ++l) {
            trajs.push_back(simulate_path(cfgs[l], coeffs[l], starts[l], level_stream(plan, plan.levels[l], p)));
        }
        for (std::size_t l = 0; l + 1 < L; ++l) {
            gaps[l][p] = trajectory_gap(trajs[l], trajs[l + 1], finest);
        }
    });
    ConvergenceReport report;
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const Moments m = moments_of(gaps[l]);
        report.rows.push_back(
            ConvergenceRow{plan.levels[l], plan.levels[l + 1], m.mean, m.se, plan.paths, std::move(gaps[l])});
    }
    return report;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) {
        return Interval{0.0, 1.0};
    }
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double centre = (p + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
    return Interval{std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double pooled_quantile(std::vector<double> x, double q) {
    if (x.empty()) {
        throw ConfigError("pooled_quantile: empty sample");
    }
    std::sort(x.begin(), x.end());
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(x.size() - 1)));
    return x[idx];
}

StickinessReport run_stickiness(const ExperimentPlan& plan, const SdeConfig& config, const Model& model,
                                const InitialDatum& u0) {
    plan.validate();
    config.validate();
    const std::size_t threads = resolve_threads(plan.threads);
    StickinessReport report;
    report.levels = plan.levels;
    for (std::size_t n : plan.levels) {
        const Grid grid(n);
        const SdeConfig cfg = level_config(plan, config, u0, n);
        const DiscreteCoefficients coeffs(grid, model.b, model.r, model.coloring);
        const GridVec start = u0.on(grid);
        std::vector<double> s(plan.paths, 0.0);
        parallel_for(plan.paths, threads, [&](std::size_t p) {
            s[p] = stickiness(simulate_path(cfg, coeffs, start, level_stream(plan, n, p)));
        });
        report.samples.push_back(std::move(s));
    }
    std::vector<double> pooled;
    for (const auto& s : report.samples) {
        pooled.insert(pooled.end(), s.begin(), s.end());
    }
    report.pooled_threshold = pooled_quantile(pooled, plan.stick_quantile);
    std::vector<double> eps = plan.epsilons;
    eps.push_back(report.pooled_threshold);
    for (std::size_t l = 0; l < plan.levels.size(); ++l) {
        for (double e : eps) {
            const auto& s = report.samples[l];
            const auto hits = static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [e](double v) { return v >= e; }));
            const Interval ci = wilson_interval(hits, s.size());
            report.rows.push_back(StickinessRow{plan.levels[l], e,
                                                static_cast<double>(hits) / static_cast<double>(s.size()), ci.lo,
                                                ci.hi, s.size()});
        }
    }
    return report;
}

std::vector<Trajectory> run_ensemble(const SdeConfig& config, const DiscreteCoefficients& coefficients,
                                     const GridVec& u0, std::size_t paths, std::span<const GridVec> observers,
                                     std::size_t threads) {
    std::vector<std::optional<Trajectory>> slots(paths);
    parallel_for(paths, resolve_threads(threads), [&](std::size_t p) {
        slots[p].emplace(simulate_path(config, coefficients, u0, NoiseStream(config.seed, p), observers));
    });
    std::vector<Trajectory> out;
    out.reserve(paths);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

}  // namespace spme
