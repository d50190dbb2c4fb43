#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "spme/csv.hpp"
#include "spme/error.hpp"
#include "spme/harness.hpp"

using namespace spme;

namespace {

SdeConfig quick() {
    SdeConfig c;
    c.T = 0.01;
    c.n_out = 8;
    return c;
}

Model noisy() { return Model{Nemytskii::affine(0.5, 0.5), Nemytskii::affine(1.0, 0.0), NoiseColoring{}}; }

}  // namespace

TEST(InitialDatum, Families) {
    const Grid g(31);
    for (auto kind : {InitialKind::zero, InitialKind::sine_bump, InitialKind::hat, InitialKind::two_bumps}) {
        const auto u = InitialDatum{kind, 2.0, 2.0}.on(g);
        for (double x : u.values) {
            EXPECT_GE(x, 0.0);
        }
    }
    EXPECT_EQ(InitialDatum{InitialKind::zero}.on(g).values, GridVec{g}.values);
    EXPECT_NEAR((InitialDatum{InitialKind::sine_bump, 2.0, 1.0}.function()(0.5)), 2.0, 1e-15);
    EXPECT_NEAR((InitialDatum{InitialKind::hat, 1.0}.function()(0.375)), 0.5, 1e-15);
    EXPECT_THROW((InitialDatum{InitialKind::hat, -1.0}.validate()), ConfigError);
}

TEST(Plan, Validation) {
    ExperimentPlan p;
    EXPECT_NO_THROW(p.validate());
    p.levels = {15, 15};
    EXPECT_THROW(p.validate(), ConfigError);
    p.levels = {15, 30};
    p.coupling = true;
    EXPECT_THROW(p.validate(), ConfigError);
    p.levels = {15, 31, 63};
    EXPECT_NO_THROW(p.validate());
    p.paths = 0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Threads, Resolution) {
    EXPECT_EQ(resolve_threads(3), 3u);
    setenv("STICKY_SPME_THREADS", "5", 1);
    EXPECT_EQ(resolve_threads(0), 5u);
    unsetenv("STICKY_SPME_THREADS");
    EXPECT_GE(resolve_threads(0), 1u);
}

TEST(ParallelFor, CoversAllAndRethrowsLowest) {
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) {
        EXPECT_EQ(h, 1);
    }
    try {
        parallel_for(50, 4, [&](std::size_t i) {
            if (i == 7 || i == 30) {
                throw NumericalError("fail " + std::to_string(i));
            }
        });
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_STREQ(e.what(), "fail 7");
    }
}

TEST(Wilson, KnownValues) {
    const auto ci = wilson_interval(50, 100);
    EXPECT_NEAR(ci.lo, 0.4038, 1e-4);
    EXPECT_NEAR(ci.hi, 0.5962, 1e-4);
    const auto zero = wilson_interval(0, 10);
    EXPECT_EQ(zero.lo, 0.0);
    EXPECT_GT(zero.hi, 0.0);
    const auto all = wilson_interval(10, 10);
    EXPECT_LT(all.lo, 1.0);
    EXPECT_NEAR(all.hi, 1.0, 1e-15);
}

TEST(PooledQuantile, LowerOrderStatistic) {
    EXPECT_EQ(pooled_quantile({5, 1, 4, 2, 3}, 0.2), 1.0);
    EXPECT_EQ(pooled_quantile({5, 1, 4, 2, 3}, 0.5), 3.0);
    EXPECT_EQ(pooled_quantile({5, 1, 4, 2, 3}, 1.0), 5.0);
    EXPECT_THROW(pooled_quantile({}, 0.5), ConfigError);
}

TEST(Moments, DegenerateEnsembleHasZeroVariance) {
    ExperimentPlan p;
    p.levels = {15};
    p.paths = 4;
    const auto rep = run_moments(p, quick(), Model{}, InitialDatum{});
    ASSERT_FALSE(rep.partial);
    ASSERT_EQ(rep.rows.size(), 4u);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.stderr_, 0.0);
        EXPECT_EQ(r.paths, 4u);
    }
    const Grid g(15);
    const DiscreteCoefficients dc(g, Model{}.b, Model{}.r, Model{}.coloring);
    const auto traj = simulate_path(quick(), dc, InitialDatum{}.on(g), NoiseStream(0, 0));
    EXPECT_DOUBLE_EQ(rep.rows[0].estimate, energy(traj.u[0], 4.0));
}

TEST(Moments, SmokeAllFields) {
    ExperimentPlan p;
    p.levels = {7, 15};
    p.paths = 2;
    p.p_list = {1.0, 2.0};
    const auto rep = run_moments(p, quick(), noisy(), InitialDatum{});
    EXPECT_EQ(rep.rows.size(), 2u * (3u * 2u + 1u));
    std::ostringstream out;
    write_moments_csv(out, rep);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "n,p,functional,estimate,stderr,paths,stopped,clamps");
    for (const auto& r : rep.rows) {
        EXPECT_TRUE(std::isfinite(r.estimate));
        EXPECT_TRUE(std::isfinite(r.stderr_));
    }
}

TEST(Moments, DeterministicAcrossThreadCounts) {
    ExperimentPlan p;
    p.levels = {7, 15};
    p.paths = 12;
    p.seed = 77;
    std::string ref;
    for (std::size_t t : {1, 3, 8}) {
        p.threads = t;
        std::ostringstream out;
        write_moments_csv(out, run_moments(p, quick(), noisy(), InitialDatum{}));
        if (ref.empty()) {
            ref = out.str();
        }
        EXPECT_EQ(out.str(), ref);
    }
}

TEST(Convergence, RequiresNestedCoupledPlan) {
    ExperimentPlan p;
    p.levels = {7, 15};
    p.paths = 1;
    EXPECT_THROW(run_convergence(p, quick(), Model{}, InitialDatum{}), ConfigError);
    p.coupling = true;
    p.levels = {7, 16};
    EXPECT_THROW(run_convergence(p, quick(), Model{}, InitialDatum{}), ConfigError);
}

TEST(Convergence, IdenticalTrajectoriesHaveZeroGap) {
    const Grid g(15);
    const DiscreteCoefficients dc(g, noisy().b, noisy().r, noisy().coloring);
    const auto a = simulate_path(quick(), dc, InitialDatum{}.on(g), NoiseStream(3, 0));
    EXPECT_EQ(trajectory_gap(a, a, Grid(31)), 0.0);
}

TEST(Convergence, CouplingIrrelevantWithoutNoise) {
    ExperimentPlan p;
    p.levels = {7, 15, 31};
    p.paths = 3;
    p.coupling = true;
    const auto rep = run_convergence(p, quick(), Model{}, InitialDatum{});
    ASSERT_EQ(rep.rows.size(), 2u);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.stderr_, 0.0);
        for (double g : r.per_path) {
            EXPECT_EQ(g, r.per_path.front());
        }
    }
}

TEST(Stickiness, DeterministicPushLeavesZero) {
    ExperimentPlan p;
    p.levels = {7, 15};
    p.paths = 3;
    const Model m{Nemytskii::affine(0, 0), Nemytskii::affine(1.0, 0.0), NoiseColoring{}};
    const auto rep = run_stickiness(p, quick(), m, InitialDatum{InitialKind::zero});
    for (std::size_t l = 0; l < 2; ++l) {
        for (double s : rep.samples[l]) {
            EXPECT_EQ(s, rep.samples[l].front());
            // Only the first snapshot interval sees zeros.
            EXPECT_NEAR(s, quick().output_interval() * static_cast<double>(p.levels[l]) / (p.levels[l] + 1.0), 1e-15);
        }
    }
}

TEST(Stickiness, FrozenAtZero) {
    ExperimentPlan p;
    p.levels = {7};
    p.paths = 2;
    p.epsilons = {0.0, 0.005};
    const auto rep = run_stickiness(p, quick(), Model{}, InitialDatum{InitialKind::zero});
    for (double s : rep.samples[0]) {
        EXPECT_NEAR(s, 0.01 * 7.0 / 8.0, 1e-15);
    }
    ASSERT_EQ(rep.rows.size(), 3u);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.prob, 1.0);
        EXPECT_LE(r.ci_lo, r.prob);
        EXPECT_GE(r.ci_hi, r.prob);
    }
}
