#include "gossip_aoi/simulator.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gossip_aoi;

namespace {

ModelParams fig3(int a_max = 30) { return {0.2, 0.2, 0.8, 0.8, 1.0, a_max}; }

Action act(const PolicySpec& spec, AgeState s, const ModelParams& p = fig3()) {
    SplitMix64 rng(0);
    return decide(spec, s, p, rng);
}

} // namespace

TEST(Decide, MaxAgeFirst) {
    EXPECT_EQ(act(Maf{}, {3, 7}), Action::Tx2);
    EXPECT_EQ(act(Maf{}, {7, 3}), Action::Tx1);
    EXPECT_EQ(act(Maf{}, {4, 4}), Action::Tx1);
}

TEST(Decide, MaxAgeFirstWithThreshold) {
    EXPECT_EQ(act(Maft{5}, {3, 4}), Action::Idle);
    EXPECT_EQ(act(Maft{5}, {3, 6}), Action::Tx2);
    EXPECT_EQ(act(Maft{5}, {5, 5}), Action::Tx1);
    EXPECT_EQ(default_maft_threshold(fig3()), 5);
    EXPECT_EQ(default_maft_threshold({0.2, 0.2, 0.8, 0.8, 0.0, 30}), 1);
}

TEST(Decide, TransmitToBestChannel) {
    EXPECT_EQ(act(Tpo{}, {9, 2}), Action::Tx1);
    const ModelParams skewed{0.2, 0.4, 0.8, 0.8, 1.0, 30};
    EXPECT_EQ(act(Tpo{}, {9, 2}, skewed), Action::Tx2);
}

TEST(Decide, ValidatesThreshold) {
    EXPECT_THROW(validate(PolicySpec{Maft{0}}, fig3()), InvalidParams);
    EXPECT_THROW(run(Maft{0}, fig3(), 100, 0, 1), InvalidParams);
}

TEST(Step, FixedDraws) {
    const ModelParams p = fig3(10);
    ChannelDraws hit{0.1, 0.1, 0.1};
    ChannelDraws miss{0.9, 0.9, 0.9};

    auto r = step({2, 5}, Action::Tx1, p, hit);
    EXPECT_EQ(r.next, (AgeState{1, 6}));
    EXPECT_DOUBLE_EQ(r.cost, 8.0);
    r = step({2, 5}, Action::Tx1, p, miss);
    EXPECT_EQ(r.next, (AgeState{3, 6}));
    EXPECT_DOUBLE_EQ(r.cost, 10.0);

    r = step({2, 5}, Action::Idle, p, hit);
    EXPECT_EQ(r.next, (AgeState{3, 3}));
    EXPECT_DOUBLE_EQ(r.cost, 6.0);
    r = step({2, 5}, Action::Idle, p, {0.9, 0.1, 0.9});
    EXPECT_EQ(r.next, (AgeState{3, 3}));
    r = step({2, 5}, Action::Idle, p, {0.9, 0.9, 0.1});
    EXPECT_EQ(r.next, (AgeState{3, 6}));

    r = step({10, 10}, Action::Tx2, p, miss);
    EXPECT_EQ(r.next, (AgeState{10, 10}));
    EXPECT_DOUBLE_EQ(r.cost, 21.0);
}

TEST(Step, MeanCostMatchesStageCost) {
    const ModelParams p{0.35, 0.6, 0.25, 0.9, 2.0, 8};
    SplitMix64 rng(99);
    const int n = 1'000'000;
    for (const AgeState s : {AgeState{2, 5}, AgeState{6, 3}, AgeState{8, 8}}) {
        for (Action u : all_actions) {
            double sum = 0.0, sum_sq = 0.0;
            for (int k = 0; k < n; ++k) {
                const double c = step(s, u, p, rng).cost;
                sum += c;
                sum_sq += c * c;
            }
            const double mean = sum / n;
            const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
            EXPECT_NEAR(mean, oracle::expected_cost(s, u, p), 3 * se + 1e-12);
        }
    }
}

TEST(SplitMix, KnownSequenceAndStreams) {
    // Reference outputs of SplitMix64 seeded with 0.
    SplitMix64 rng(0);
    EXPECT_EQ(rng(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng(), 0x6e789e6aa1b965f4ULL);
    const SplitMix64 root(42);
    SplitMix64 a = root.split(0), b = root.split(1), a2 = root.split(0);
    const auto va = a();
    EXPECT_EQ(va, a2());
    EXPECT_NE(va, b());
    for (int k = 0; k < 1000; ++k) {
        const double u = rng.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Run, DeterministicForFixedSeed) {
    const auto a = run(Maf{}, fig3(), 20000, 200, 42);
    const auto b = run(Maf{}, fig3(), 20000, 200, 42);
    EXPECT_EQ(a, b);
    const auto c = run(Maf{}, fig3(), 20000, 200, 43);
    EXPECT_NE(a.avg_cost, c.avg_cost);
}

TEST(Run, ResultFields) {
    const auto r = run(RandomUniform{}, fig3(), 300000, 3000, 7);
    EXPECT_EQ(r.horizon, 300000);
    EXPECT_EQ(r.warmup, 3000);
    EXPECT_EQ(r.seed, 7u);
    EXPECT_GT(r.std_error, 0.0);
    for (double f : r.action_frequencies) EXPECT_NEAR(f, 1.0 / 3, 5e-3);
}

TEST(Run, MafIgnoresGossipReliability) {
    // With a shared seed the direct-channel draws coincide and MAF never idles.
    ModelParams p = fig3();
    const auto base = run(Maf{}, p, 50000, 500, 5);
    p.pv1 = p.pv2 = 0.1;
    const auto other = run(Maf{}, p, 50000, 500, 5);
    EXPECT_EQ(base.avg_cost, other.avg_cost);
    EXPECT_DOUBLE_EQ(base.action_frequencies[0], 0.0);
}

TEST(Run, AgreesWithExactEvaluation) {
    const ModelParams p = fig3(15);
    const auto optimal = rvi_solve(p).policy;
    for (const PolicySpec& spec :
         std::vector<PolicySpec>{OptimalTable{optimal}, Maf{}, Maft{5}, Tpo{}, RandomUniform{}}) {
        const auto sim = run(spec, p, 400000, 4000, 11);
        EXPECT_NEAR(sim.avg_cost, evaluate_spec(spec, p), 3 * sim.std_error) << policy_name(spec);
    }
}

TEST(Run, Validation) {
    EXPECT_THROW(run(Maf{}, fig3(), 100, 100, 1), InvalidParams);
    EXPECT_THROW(run(Maf{}, fig3(), 100, -1, 1), InvalidParams);
    EXPECT_THROW(run(Maf{}, fig3(), 100, 0, 1, 1), InvalidParams);
    ModelParams bad = fig3();
    bad.a_max = 0;
    EXPECT_THROW(run(Maf{}, bad, 100, 0, 1), InvalidParams);
    EXPECT_THROW(run(OptimalTable{PolicyTable(5, Action::Idle)}, fig3(), 100, 0, 1), InvalidParams);
    EXPECT_EQ(default_warmup(1'000'000), 10'000);
}
