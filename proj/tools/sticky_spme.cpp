#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spme/config.hpp"
#include "spme/csv.hpp"
#include "spme/error.hpp"
#include "spme/harness.hpp"
#include "spme/selfcheck.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;
constexpr int kSelfcheckFailure = 3;

std::filesystem::path output_dir(const spme::RunConfig& config, const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (!config.out_dir.empty()) {
        return config.out_dir;
    }
    return ".";
}

int cmd_selfcheck(bool json, double fault) {
    spme::SelfcheckOptions options;
    options.fault = fault;
    const auto results = spme::run_selfcheck(options);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
    }
    if (json) {
        nlohmann::json doc;
        doc["pass"] = all;
        for (const auto& r : results) {
            doc["checks"].push_back({{"name", r.name}, {"pass", r.pass}, {"value", r.value}, {"threshold", r.threshold}});
        }
        std::cout << doc.dump(2) << '\n';
    } else {
        for (const auto& r : results) {
            std::printf("%-30s %s  value=%s  threshold=%s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                        spme::format_double(r.value).c_str(), spme::format_double(r.threshold).c_str());
        }
    }
    return all ? kOk : kSelfcheckFailure;
}

int cmd_simulate(const spme::RunConfig& config, const std::string& out) {
    config.require("n");
    const spme::Grid grid(config.n);
    const spme::DiscreteCoefficients coeffs(grid, config.model.b, config.model.r, config.model.coloring);
    const spme::GridVec u0 = config.u0.on(grid);
    const spme::Trajectory traj = spme::simulate_path(config.sde, coeffs, u0, spme::NoiseStream(config.sde.seed, 0));
    const auto dir = output_dir(config, out);
    spme::write_csv_file(dir, "trajectory.csv", traj, &spme::write_trajectory_csv);
    std::printf("simulate: n=%zu steps=%llu clamps=%zu stopped=%s -> %s\n", config.n,
                static_cast<unsigned long long>(traj.steps), traj.clamps, traj.stop_time ? "yes" : "no",
                (dir / "trajectory.csv").string().c_str());
    return kOk;
}

int cmd_moments(const spme::RunConfig& config, const std::string& out) {
    config.require("levels");
    const auto report = spme::run_moments(config.plan, config.sde, config.model, config.u0);
    const auto dir = output_dir(config, out);
    spme::write_csv_file(dir, "moments.csv", report, &spme::write_moments_csv);
    for (const auto& r : report.rows) {
        std::printf("n=%zu p=%s %-13s %s +- %s\n", r.n, spme::format_double(r.p).c_str(), r.functional.c_str(),
                    spme::format_double(r.estimate).c_str(), spme::format_double(r.stderr_).c_str());
    }
    if (report.partial) {
        std::fprintf(stderr, "moments: partial report, %s\n", report.failure.c_str());
        return kNumericalError;
    }
    return kOk;
}

int cmd_converge(const spme::RunConfig& config, const std::string& out) {
    config.require("levels");
    const auto report = spme::run_convergence(config.plan, config.sde, config.model, config.u0);
    const auto dir = output_dir(config, out);
    spme::write_csv_file(dir, "convergence.csv", report, &spme::write_convergence_csv);
    for (const auto& r : report.rows) {
        std::printf("%zu -> %zu gap %s +- %s\n", r.n_coarse, r.n_fine, spme::format_double(r.gap).c_str(),
                    spme::format_double(r.stderr_).c_str());
    }
    return kOk;
}

int cmd_stickiness(const spme::RunConfig& config, const std::string& out) {
    config.require("levels");
    const auto report = spme::run_stickiness(config.plan, config.sde, config.model, config.u0);
    const auto dir = output_dir(config, out);
    spme::write_csv_file(dir, "stickiness.csv", report, &spme::write_stickiness_csv);
    std::printf("pooled threshold %s (finite-n proxy for the uniform stickiness condition)\n",
                spme::format_double(report.pooled_threshold).c_str());
    for (const auto& r : report.rows) {
        std::printf("n=%zu eps=%s P=%s [%s, %s]\n", r.n, spme::format_double(r.epsilon).c_str(),
                    spme::format_double(r.prob).c_str(), spme::format_double(r.ci_lo).c_str(),
                    spme::format_double(r.ci_hi).c_str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sticky-reflected stochastic porous medium simulator"};
    app.require_subcommand(1);

    bool json = false;
    double fault = 0.0;
    auto* selfcheck = app.add_subcommand("selfcheck", "Run the exact-identity suite");
    selfcheck->add_flag("--json", json, "Machine-readable output");
    selfcheck->add_option("--inject-fault", fault, "Relative eigenvalue perturbation")->group("");

    std::string config_path;
    std::string out;
    auto add_run = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Config file (key=value)")->required();
        sub->add_option("--out", out, "Output directory");
        return sub;
    };
    auto* simulate = add_run("simulate", "Simulate one path and write trajectory.csv");
    auto* moments = add_run("moments", "Moment table across levels");
    auto* converge = add_run("converge", "Coupled-noise convergence study");
    auto* stick = add_run("stickiness", "Stickiness experiment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (selfcheck->parsed()) {
            return cmd_selfcheck(json, fault);
        }
        const spme::RunConfig config = spme::load_config(config_path);
        if (simulate->parsed()) {
            return cmd_simulate(config, out);
        }
        if (moments->parsed()) {
            return cmd_moments(config, out);
        }
        if (converge->parsed()) {
            return cmd_converge(config, out);
        }
        if (stick->parsed()) {
            return cmd_stickiness(config, out);
        }
    } catch (const spme::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const spme::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumericalError;
    }
    return kConfigError;
}
