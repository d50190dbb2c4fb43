// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spme/functionals.hpp"
#include "spme/harness.hpp"
#include "spme/ratio_suites.hpp"
#include "spme/spectral.hpp"

#ifndef STICKY_SPME_BIN
#error "STICKY_SPME_BIN must point at the CLI binary"
#endif

using namespace spme;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

struct Mean {
    double mean = 0.0;
    double se = 0.0;
};

Mean mean_se(const std::vector<double>& x) {
    Mean m;
    for (double v : x) {
        m.mean += v;
    }
    m.mean /= static_cast<double>(x.size());
    double acc = 0.0;
    for (double v : x) {
        acc += (v - m.mean) * (v - m.mean);
    }
    m.se = std::sqrt(acc / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    return m;
}

const std::vector<std::size_t> kSpectralLevels{7, 15, 31, 63, 127};

Outcome spectral_exactness() {
    double worst_value = 0.0;
    double worst_orth = 0.0;
    for (std::size_t n : kSpectralLevels) {
        const Grid g(n);
        const auto basis = SpectralBasis::build(g);
        std::vector<std::vector<double>> m;
        for (std::size_t k = 1; k <= n; ++k) {
            m.push_back(basis.eigenvector(k));
        }
        std::vector<double> lm(n);
        for (std::size_t k = 0; k < n; ++k) {
            apply_laplacian(g, m[k], lm);
            double q = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                q += m[k][i] * lm[i];
            }
            worst_value = std::max(worst_value, std::abs(q - basis.eigenvalue(k + 1)) / basis.eigenvalue(k + 1));
            for (std::size_t j = 0; j < n; ++j) {
                double d = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    d += m[k][i] * m[j][i];
                }
                worst_orth = std::max(worst_orth, std::abs(d - (j == k ? 1.0 : 0.0)));
            }
        }
    }
    return {worst_value <= 1e-10 && worst_orth <= 1e-12,
            "max rel eigen residual " + fmt(worst_value) + ", orthonormality residual " + fmt(worst_orth)};
}

Outcome coercivity() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    double worst = 0.0;
    for (std::size_t n : kSpectralLevels) {
        const Grid g(n);
        const auto basis = SpectralBasis::build(g);
        for (int s = 0; s < 100; ++s) {
            GridVec w(g);
            for (double& x : w.values) {
                x = std::pow(unif(rng), 4.0);
            }
            const auto lw = apply_laplacian(w);
            double direct = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                direct += w[i] * lw[i];
            }
            direct *= g.h();
            const double nrm = discrete_norm(basis, w, 1.0);
            worst = std::max(worst, std::abs(direct - nrm * nrm) / (nrm * nrm));
        }
    }
    return {worst <= 1e-12, "max rel residual " + fmt(worst)};
}

Outcome poincare() {
    std::mt19937_64 rng(102);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::size_t violations = 0;
    std::size_t checks = 0;
    for (std::size_t n : kSpectralLevels) {
        const Grid g(n);
        const auto basis = SpectralBasis::build(g);
        GridVec v(g);
        for (int s = 0; s < 500; ++s) {
            for (double& x : v.values) {
                x = nd(rng);
            }
            std::vector<double> norms;
            for (int j = 0; j <= 8; ++j) {
                norms.push_back(discrete_norm(basis, v, -1.0 + 0.25 * j));
            }
            for (int a = 0; a <= 8; ++a) {
                for (int b = a + 1; b <= 8; ++b) {
                    ++checks;
                    violations += norms[a] > norms[b] ? 1 : 0;
                }
            }
        }
    }
    return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(checks) + " pairs"};
}

Outcome norm_equivalence() {
    const double base = 1.0 + 1.0 / (std::numbers::pi * std::numbers::pi);
    std::size_t violations = 0;
    std::size_t literal_violations = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto f = BandLimited::draw(103, s);
        ContinuousSine c{std::vector<double>(4, 0.0)};
        for (std::size_t j = 0; j < f.k.size(); ++j) {
            c.coefficients[f.k[j] - 1] += f.a[j] / std::numbers::sqrt2;
        }
        for (double sv : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            const double inh = continuous_norm(c, sv, false);
            const double hom = continuous_norm(c, sv, true);
            const double lo = std::min(1.0, std::pow(base, -0.5 * sv));
            const double hi = std::max(1.0, std::pow(base, -0.5 * sv));
            violations += (hom < lo * inh * (1 - 1e-14) || hom > hi * inh * (1 + 1e-14)) ? 1 : 0;
            literal_violations += (inh > hom * (1 + 1e-14) || hom > std::sqrt(base) * inh * (1 + 1e-14)) ? 1 : 0;
        }
    }
    return {violations == 0, std::to_string(violations) +
                                 " violations of the two-sided bound min(1,c^-s) <= ratio <= max(1,c^-s), "
                                 "c = 1 + pi^-2 (the one-sided form with c1 = 1 fails " +
                                 std::to_string(literal_violations) + " times, all at s > 0)"};
}

Outcome ratio_suites() {
    const auto suites = run_ratio_suites(RatioSuiteOptions{});
    double worst = 0.0;
    std::string name;
    for (const auto& s : suites) {
        if (s.drift() > worst) {
            worst = s.drift();
            name = s.name;
        }
    }
    return {worst <= 0.25, std::to_string(suites.size()) + " suites, max drift " + fmt(worst) + " (" + name + ")"};
}

Outcome pme_dissipation() {
    const Grid g(63);
    const DiscreteCoefficients dc(g, Nemytskii::affine(0, 0), Nemytskii::affine(0, 0), NoiseColoring{});
    const GridVec u0 = InitialDatum{}.on(g);
    const double e0 = energy(u0, 4.0);
    bool monotone = true;
    std::vector<double> residual;
    for (std::size_t substeps : {100, 200, 400}) {
        SdeConfig c;
        c.T = 0.05;
        c.n_out = 64;
        c.policy = StepPolicy::fixed_dt;
        c.substeps = substeps;
        const auto traj = simulate_path(c, dc, u0, NoiseStream(0, 0));
        for (std::size_t j = 1; j < traj.snapshots(); ++j) {
            monotone = monotone && energy(traj.u[j], 4.0) <= energy(traj.u[j - 1], 4.0) + 1e-12 * e0;
        }
        residual.push_back(std::abs(energy(traj.u.back(), 4.0) - e0 + 5.0 * traj.dissipation.back()));
    }
    const double r1 = residual[0] / residual[1];
    const double r2 = residual[1] / residual[2];
    const bool halves = std::abs(r1 - 2.0) <= 0.4 && std::abs(r2 - 2.0) <= 0.4;
    return {monotone && halves, std::string("energy nonincreasing: ") + (monotone ? "yes" : "no") +
                                    "; residual ratios under dt halving " + fmt(r1) + ", " + fmt(r2)};
}

Outcome nonnegativity() {
    std::size_t path_steps = 0;
    std::size_t negatives = 0;
    double worst_k = 0.0;
    const std::vector<Model> models{
        Model{Nemytskii::affine(0.5, 0.5), Nemytskii::affine(1.0, 0.0), NoiseColoring{}},
        Model{Nemytskii::affine(1.0, 0.0), Nemytskii::affine(1.0, 0.5), NoiseColoring{1.0, 2.0, 8}},
        Model{Nemytskii{0.5, 1.0, {0.5, 2.0}}, Nemytskii{1.0, 0.0, {0.8, 1.0}}, NoiseColoring{2.0, 1.8, 64}},
    };
    const std::vector<InitialDatum> data{{InitialKind::zero}, {InitialKind::sine_bump, 1.0, 2.0},
                                         {InitialKind::hat, 0.5}, {InitialKind::two_bumps, 1.0}};
    for (std::size_t n : {15, 31}) {
        const Grid g(n);
        for (const auto& m : models) {
            const DiscreteCoefficients dc(g, m.b, m.r, m.coloring);
            for (const auto& d : data) {
                for (auto trunc : {Truncation::hard_stop, Truncation::smooth_sigma}) {
                    SdeConfig c;
                    c.T = 0.02;
                    c.n_out = 16;
                    c.truncation = trunc;
                    c.record_steps = true;
                    for (std::size_t p = 0; p < 4; ++p) {
                        const auto traj = simulate_path(c, dc, d.on(g), NoiseStream(104, p));
                        path_steps += traj.steps;
                        for (const auto& u : traj.u) {
                            negatives += static_cast<std::size_t>(
                                std::count_if(u.values.begin(), u.values.end(), [](double x) { return x < 0.0; }));
                        }
                        const auto& log = *traj.log;
                        std::vector<double> k(n, 0.0);
                        for (std::size_t s = 0; s < log.t.size(); ++s) {
                            for (std::size_t i = 0; i < n; ++i) {
                                const double u = log.u_start[s * n + i];
                                negatives += u < 0.0 ? 1 : 0;
                                if (u == 0.0) {
                                    k[i] += dc.sojourn(i, 0.0) * log.dt[s];
                                }
                            }
                        }
                        for (std::size_t i = 0; i < n; ++i) {
                            const double tol = static_cast<double>(traj.steps) *
                                               std::nextafter(traj.K.back()[i], INFINITY) -
                                               static_cast<double>(traj.steps) * traj.K.back()[i];
                            const double err = std::abs(traj.K.back()[i] - k[i]);
                            worst_k = std::max(worst_k, tol > 0.0 ? err / tol : err);
                        }
                    }
                }
            }
        }
    }
    return {negatives == 0 && worst_k <= 1.0 && path_steps >= 10000,
            std::to_string(path_steps) + " path-steps, " + std::to_string(negatives) +
                " negative components, K reconstruction error " + fmt(worst_k) + " x (steps * ulp)"};
}

Outcome martingale() {
    const Grid g(31);
    const DiscreteCoefficients dc(g, Nemytskii::affine(0.5, 0.5), Nemytskii::affine(1.0, 0.0), NoiseColoring{});
    SdeConfig c;
    c.T = 0.05;
    c.n_out = 16;
    c.seed = 105;
    const auto phi = project_pc(
        [](double x) {
            const double s = (x - 0.5) / 0.25;
            return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 4.0) : 0.0;
        },
        g);
    const std::vector<GridVec> obs{phi};
    const auto ens = run_ensemble(c, dc, InitialDatum{}.on(g), 1024, obs, 0);
    const auto d = martingale_residual(ens, 0);
    const bool m1 = std::abs(d.mean_m1) <= 3.0 * d.se_m1;
    const bool m2 = std::abs(d.mean_qv_gap) <= 3.0 * d.se_qv_gap;
    return {m1 && m2, "mean M1 " + fmt(d.mean_m1) + " (SE " + fmt(d.se_m1) + "), mean M1^2 - compensator " +
                          fmt(d.mean_qv_gap) + " (SE " + fmt(d.se_qv_gap) + "), compensator " +
                          fmt(d.mean_compensator) + ", <phi, 1 Sigma> pairing " + fmt(d.mean_sigma_pairing)};
}

Model noisy_model() { return Model{Nemytskii::affine(0.5, 0.5), Nemytskii::affine(1.0, 0.0), NoiseColoring{}}; }

Outcome moment_uniformity() {
    ExperimentPlan p;
    p.levels = {15, 31, 63};
    p.paths = 256;
    p.coupling = true;
    p.seed = 106;
    SdeConfig c;
    c.T = 0.05;
    c.n_out = 64;
    const auto rep = run_moments(p, c, noisy_model(), InitialDatum{});
    if (rep.partial) {
        return {false, "partial report: " + rep.failure};
    }
    std::string detail;
    bool ok = true;
    for (const char* name : {"sup_energy", "sup_g_energy"}) {
        double lo = INFINITY, hi = 0.0;
        for (const auto& r : rep.rows) {
            if (r.functional == name && r.p == 2.0) {
                lo = std::min(lo, r.estimate);
                hi = std::max(hi, r.estimate);
            }
        }
        ok = ok && hi <= 2.0 * lo;
        detail += std::string(name) + " range [" + fmt(lo) + ", " + fmt(hi) + "] ratio " + fmt(hi / lo) + "; ";
    }
    return {ok, detail};
}

Outcome convergence() {
    ExperimentPlan p;
    p.levels = {15, 31, 63};
    p.paths = 256;
    p.coupling = true;
    p.seed = 107;
    SdeConfig c;
    c.T = 0.05;
    c.n_out = 64;
    const auto noisy = run_convergence(p, c, noisy_model(), InitialDatum{});
    std::vector<double> diff(p.paths);
    for (std::size_t k = 0; k < p.paths; ++k) {
        diff[k] = noisy.rows[0].per_path[k] - noisy.rows[1].per_path[k];
    }
    const Mean d = mean_se(diff);
    const bool stoch = d.mean > 2.0 * d.se;

    ExperimentPlan q;
    q.levels = {15, 31, 63, 127};
    q.paths = 1;
    q.coupling = true;
    const auto det = run_convergence(q, c, Model{}, InitialDatum{});
    bool mono = true;
    std::string dets;
    for (std::size_t j = 0; j < det.rows.size(); ++j) {
        dets += (j ? ", " : "") + fmt(det.rows[j].gap);
        if (j > 0) {
            mono = mono && det.rows[j].gap < det.rows[j - 1].gap;
        }
    }
    return {stoch && mono, "noisy gaps " + fmt(noisy.rows[0].gap) + " -> " + fmt(noisy.rows[1].gap) +
                               ", paired difference " + fmt(d.mean) + " (SE " + fmt(d.se) + "); deterministic gaps " +
                               dets};
}

Outcome stickiness_check() {
    const Model m{Nemytskii::affine(1.0, 0.0), Nemytskii::affine(1.0, 0.0), NoiseColoring{}};
    SdeConfig c;
    c.T = 0.05;
    c.n_out = 64;
    ExperimentPlan p;
    p.levels = {15, 31, 63};
    p.paths = 512;
    p.coupling = true;
    p.seed = 108;
    const auto rep = run_stickiness(p, c, m, InitialDatum{InitialKind::zero});
    bool ok = true;
    std::string detail = "eps* " + fmt(rep.pooled_threshold) + ":";
    for (const auto& r : rep.rows) {
        if (r.epsilon == rep.pooled_threshold) {
            ok = ok && r.prob >= 0.5;
            detail += " n=" + std::to_string(r.n) + " P=" + fmt(r.prob) + " [" + fmt(r.ci_lo) + "," + fmt(r.ci_hi) + "]";
        }
    }
    p.coupling = false;
    const auto adaptive = run_stickiness(p, c, m, InitialDatum{InitialKind::zero});
    detail += "; adaptive-dt (uncoupled, informational):";
    for (const auto& r : adaptive.rows) {
        detail += " n=" + std::to_string(r.n) + " P=" + fmt(r.prob);
    }
    return {ok, detail};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "sticky_spme_acceptance";
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "moments.cfg";
    {
        std::ofstream out(cfg);
        out << "seed = 109\nlevels = 15,31\npaths = 32\ncoupling = true\n"
               "b0 = 0.5\nb1 = 0.5\nr0 = 1\nT = 0.02\nn_out = 16\np_list = 1,2\n";
    }
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "8", "1", "8"}) {
        const auto out = dir / (std::string("run") + std::to_string(outputs.size()));
        const std::string cmd = std::string("STICKY_SPME_THREADS=") + threads + " \"" + STICKY_SPME_BIN +
                                "\" moments --config \"" + cfg.string() + "\" --out \"" + out.string() +
                                "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) {
            return {false, "moments command failed"};
        }
        outputs.push_back(read_file(out / "moments.csv"));
    }
    const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& s) { return s == outputs[0]; });
    return {same && !outputs[0].empty(),
            std::to_string(outputs.size()) + " runs (1 and 8 threads), " + (same ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 spectral exactness", spectral_exactness},
        {"2 coercivity identity", coercivity},
        {"3 Poincare monotonicity", poincare},
        {"4 continuous norm equivalence", norm_equivalence},
        {"5 bounded-ratio suites", ratio_suites},
        {"6 deterministic PME dissipation", pme_dissipation},
        {"7 nonnegativity and sojourn bookkeeping", nonnegativity},
        {"8 martingale diagnostics", martingale},
        {"9 moment uniformity", moment_uniformity},
        {"10 convergence proxy", convergence},
        {"11 stickiness", stickiness_check},
        {"12 determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  criterion %s  [%.1fs]  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
