#include "gossip_aoi/model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace gossip_aoi;

namespace {

ModelParams fig3(int a_max = 30) { return {0.2, 0.2, 0.8, 0.8, 1.0, a_max}; }

void expect_matches_oracle(AgeState s, Action u, const ModelParams& p) {
    const auto dist = transitions(s, u, p);
    const auto expected = oracle::enumerate_transitions(s, u, p);
    ASSERT_EQ(dist.size(), expected.size());
    for (const auto& [next, prob] : expected) EXPECT_NEAR(dist.prob_of({next.first, next.second}), prob, 1e-12);
}

} // namespace

TEST(ClampAge, IncrementsAndSaturates) {
    EXPECT_EQ(clamp_age(3, 30), 4);
    EXPECT_EQ(clamp_age(30, 30), 30);
    EXPECT_EQ(clamp_age(0, 30), 1);
}

TEST(Transitions, TransmitToFirstReceiver) {
    ModelParams p = fig3();
    const auto dist = transitions({2, 5}, Action::Tx1, p);
    ASSERT_EQ(dist.size(), 2u);
    EXPECT_NEAR(dist.prob_of({1, 6}), 0.2, 1e-15);
    EXPECT_NEAR(dist.prob_of({3, 6}), 0.8, 1e-15);
    expect_matches_oracle({2, 5}, Action::Tx1, p);
}

TEST(Transitions, IdleOnDiagonalCollapses) {
    const auto dist = transitions({4, 4}, Action::Idle, fig3());
    ASSERT_EQ(dist.size(), 1u);
    EXPECT_EQ(dist[0].next, (AgeState{5, 5}));
    EXPECT_NEAR(dist[0].prob, 1.0, 1e-15);
}

TEST(Transitions, IdleMergesDuplicateOutcomes) {
    ModelParams p = fig3();
    const auto dist = transitions({2, 5}, Action::Idle, p);
    ASSERT_EQ(dist.size(), 2u);
    EXPECT_NEAR(dist.prob_of({3, 3}), 0.80, 1e-12);
    EXPECT_NEAR(dist.prob_of({3, 6}), 0.20, 1e-12);
    expect_matches_oracle({2, 5}, Action::Idle, p);
}

TEST(Transitions, SaturatedCorner) {
    ModelParams p = fig3(5);
    const auto dist = transitions({5, 5}, Action::Tx2, p);
    EXPECT_NEAR(dist.prob_of({5, 1}), 0.2, 1e-15);
    EXPECT_NEAR(dist.prob_of({5, 5}), 0.8, 1e-15);
}

TEST(StageCost, Examples) {
    ModelParams p = fig3();
    EXPECT_NEAR(stage_cost({2, 5}, Action::Tx1, p), 9.6, 1e-12);
    EXPECT_NEAR(oracle::expected_cost({2, 5}, Action::Tx1, p), 9.6, 1e-12);

    ModelParams no_gossip = p;
    no_gossip.pv1 = no_gossip.pv2 = 0.0;
    EXPECT_NEAR(stage_cost({2, 5}, Action::Idle, no_gossip), 9.0, 1e-12);

    EXPECT_NEAR(stage_cost({4, 4}, Action::Idle, p), 10.0, 1e-12);
}

TEST(EnumerateStates, RowMajorOrder) {
    ModelParams p = fig3(2);
    EXPECT_EQ(enumerate_states(p), (std::vector<AgeState>{{1, 1}, {1, 2}, {2, 1}, {2, 2}}));
    p.a_max = 3;
    EXPECT_EQ(enumerate_states(p).size(), 9u);
    p.a_max = 30;
    const auto states = enumerate_states(p);
    ASSERT_EQ(states.size(), 900u);
    EXPECT_EQ(states.front(), (AgeState{1, 1}));
    EXPECT_EQ(states.back(), (AgeState{30, 30}));
    for (std::size_t i = 0; i < states.size(); ++i) {
        EXPECT_EQ(state_index(states[i], 30), i);
        EXPECT_EQ(state_at(i, 30), states[i]);
    }
}

TEST(Validate, RejectsOutOfRange) {
    ModelParams p = fig3();
    p.p1 = 1.5;
    try {
        validate(p);
        FAIL() << "expected InvalidParams";
    } catch (const InvalidParams& e) {
        EXPECT_EQ(e.field(), "p1");
    }
    p = fig3();
    p.c_tx = -1;
    EXPECT_THROW(validate(p), InvalidParams);
    p = fig3();
    p.a_max = 1;
    EXPECT_THROW(validate(p), InvalidParams);
    EXPECT_NO_THROW(validate(fig3()));
}

TEST(Symmetric, Predicate) {
    EXPECT_TRUE(symmetric(fig3()));
    ModelParams p = fig3();
    p.p2 = 0.3;
    EXPECT_FALSE(symmetric(p));
    p = fig3();
    p.pv1 = 0.7;
    EXPECT_FALSE(symmetric(p));
}

// Kernel properties over random instances.
TEST(KernelProperties, RandomInstances) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int a_max = 2 + trial % 7;
        const ModelParams p = oracle::random_params(rng, a_max);
        for (const AgeState s : enumerate_states(p)) {
            for (Action u : all_actions) {
                const auto dist = transitions(s, u, p);
                EXPECT_NEAR(dist.total(), 1.0, 1e-12);
                std::set<AgeState> seen;
                for (const auto& [next, prob] : dist) {
                    EXPECT_TRUE(on_grid(next, a_max));
                    EXPECT_TRUE(seen.insert(next).second) << "duplicate next state";
                    EXPECT_GT(prob, 0.0);
                }
                EXPECT_NEAR(stage_cost(s, u, p), stage_cost_closed_form(s, u, p), 1e-12);
                EXPECT_NEAR(stage_cost(s, u, p), oracle::expected_cost(s, u, p), 1e-12);
                expect_matches_oracle(s, u, p);
            }
        }
    }
}

TEST(KernelProperties, SwapSymmetryUnderSymmetricChannels) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ModelParams p = oracle::random_params(rng, 2 + trial % 6, true);
        for (const AgeState s : enumerate_states(p)) {
            for (Action u : all_actions) {
                const auto here = transitions(s, u, p);
                const auto mirror = transitions(s.swapped(), swapped(u), p);
                ASSERT_EQ(here.size(), mirror.size());
                for (const auto& [next, prob] : here) EXPECT_NEAR(mirror.prob_of(next.swapped()), prob, 1e-15);
            }
        }
    }
}

TEST(TransitionTable, MatchesDirectComputation) {
    const ModelParams p{0.35, 0.6, 0.25, 0.9, 2.0, 6};
    const TransitionTable table(p);
    ASSERT_EQ(table.size(), 36u);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const AgeState s = state_at(i, p.a_max);
        for (Action u : all_actions) {
            EXPECT_DOUBLE_EQ(table.cost(i, u), stage_cost(s, u, p));
            const auto dist = transitions(s, u, p);
            const auto outs = table.outcomes(i, u);
            ASSERT_EQ(outs.size(), dist.size());
            for (const auto& e : outs) EXPECT_DOUBLE_EQ(e.prob, dist.prob_of(state_at(e.next, p.a_max)));
        }
    }
}
