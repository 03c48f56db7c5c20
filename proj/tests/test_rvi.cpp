#include "gossip_aoi/chain.hpp"
#include "gossip_aoi/rvi.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gossip_aoi;

namespace {

ModelParams fig3(int a_max = 30) { return {0.2, 0.2, 0.8, 0.8, 1.0, a_max}; }

} // namespace

TEST(QValue, ZeroContinuationIsStageCost) {
    const ModelParams p = fig3(8);
    const ValueTable zero(p);
    for (const AgeState s : enumerate_states(p))
        for (Action u : all_actions) EXPECT_DOUBLE_EQ(q_value(s, u, zero, p), stage_cost(s, u, p));
}

TEST(QValue, IdleWithMergedDistribution) {
    const ModelParams p = fig3(10);
    ValueTable U(p);
    U(3, 3) = 10;
    U(3, 6) = 20;
    // 0.8 (6 + 10) + 0.2 (9 + 20)
    EXPECT_NEAR(q_value({2, 5}, Action::Idle, U, p), 18.6, 1e-12);
}

TEST(QValue, AbsorbingCornerWithoutGossip) {
    ModelParams p = fig3(7);
    p.pv1 = p.pv2 = 0.0;
    ValueTable U(p);
    U(7, 7) = 3.25;
    EXPECT_NEAR(q_value({7, 7}, Action::Idle, U, p), 2 * 7 + 3.25, 1e-12);
}

TEST(RviSolve, MatchesExhaustiveSearchOnSmallGrid) {
    const ModelParams p{0.3, 0.3, 0.7, 0.7, 0.5, 3};
    const auto rvi = rvi_solve(p);
    const auto brute = brute_force_solve(p);
    EXPECT_NEAR(rvi.rho_star, brute.rho, 1e-6);
    for (std::size_t i = 0; i < rvi.policy.actions.size(); ++i)
        EXPECT_TRUE(brute.best_policy.ties[i].contains(rvi.policy.actions[i])) << "state " << i;
}

TEST(RviSolve, ExpensiveTransmissionWithPerfectGossipIdles) {
    const ModelParams p{1.0, 1.0, 1.0, 1.0, 30.0, 3};
    const auto rvi = rvi_solve(p);
    for (Action u : rvi.policy.actions) EXPECT_EQ(u, Action::Idle);
    const auto brute = brute_force_solve(p);
    EXPECT_NEAR(rvi.rho_star, brute.rho, 1e-6);
    // Idling from (1,1) climbs the diagonal to (3,3) and stays.
    EXPECT_NEAR(brute.rho, 6.0, 1e-9);
}

TEST(RviSolve, ReferenceStatePinnedAndBellmanResidualSmall) {
    const ModelParams p = fig3(20);
    const double eps = 1e-9;
    const auto result = rvi_solve(p, eps);
    EXPECT_EQ(result.u_table(1, 1), 0.0);
    EXPECT_LT(result.final_residual, eps);
    EXPECT_LE(bellman_residual(result.u_table, result.rho_star), 10 * eps);
    for (double v : result.u_table.values) EXPECT_TRUE(std::isfinite(v));
    for (std::size_t i = 0; i < result.policy.actions.size(); ++i)
        EXPECT_TRUE(result.policy.ties[i].contains(result.policy.actions[i]));
}

TEST(RviSolve, AlternateReferenceState) {
    const ModelParams p = fig3(12);
    const auto a = rvi_solve(p, 1e-10);
    const auto b = rvi_solve(p, 1e-10, 100000, {4, 6});
    EXPECT_EQ(b.u_table(4, 6), 0.0);
    EXPECT_NEAR(a.rho_star, b.rho_star, 1e-8);
    EXPECT_EQ(a.policy.actions, b.policy.actions);
}

TEST(RviSolve, Deterministic) {
    const ModelParams p{0.25, 0.4, 0.6, 0.9, 1.5, 15};
    EXPECT_EQ(rvi_solve(p), rvi_solve(p));
}

TEST(RviSolve, ExactEvaluationOfSolvedPolicyEqualsRho) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const ModelParams p = oracle::random_params(rng, 6 + trial);
        const auto result = rvi_solve(p);
        EXPECT_NEAR(evaluate_policy(result.policy, p), result.rho_star, 1e-9) << "trial " << trial;
    }
}

TEST(RviSolve, Errors) {
    ModelParams p = fig3(30);
    EXPECT_THROW(rvi_solve(p, 1e-9, 2), NonConvergence);
    try {
        rvi_solve(p, 1e-9, 3);
    } catch (const NonConvergence& e) {
        EXPECT_EQ(e.iterations(), 3);
        EXPECT_GT(e.residual(), 1e-9);
    }
    p.pv1 = -0.1;
    EXPECT_THROW(rvi_solve(p), InvalidParams);
    EXPECT_THROW(rvi_solve(fig3(), 0.0), InvalidParams);
    EXPECT_THROW(rvi_solve(fig3(5), 1e-9, 100, {6, 1}), InvalidParams);
}

TEST(ExtractPolicy, DiagonalTransmitTieChoosesFirstReceiver) {
    const ModelParams p = fig3(30);
    const auto result = rvi_solve(p);
    bool saw_tie = false;
    for (int m = 1; m <= 29; ++m) {
        const AgeState s{m, m};
        const double q0 = q_value(s, Action::Idle, result.u_table, p);
        const double q1 = q_value(s, Action::Tx1, result.u_table, p);
        const double q2 = q_value(s, Action::Tx2, result.u_table, p);
        EXPECT_NEAR(q1, q2, 1e-9);
        if (q1 < q0 - 1e-6) {
            saw_tie = true;
            EXPECT_EQ(result.policy.at(s), Action::Tx1);
            EXPECT_EQ(result.policy.ties_at(s), (ActionSet{Action::Tx1, Action::Tx2}));
        }
    }
    EXPECT_TRUE(saw_tie);
}

TEST(ExtractPolicy, StrictIdleMinimum) {
    // With no continuation value, idling saves c_tx and the gossip helps.
    const ModelParams p = fig3(6);
    const auto policy = extract_policy(ValueTable(p), p);
    EXPECT_EQ(policy(2, 5), Action::Idle);
    EXPECT_EQ(policy.ties_at({2, 5}), ActionSet{Action::Idle});
}

TEST(ExtractPolicy, HandBuiltTies) {
    // a_max = 2, U = 0: at (2,2) Tx1 and Tx2 cost c_tx + 4 - p, idle costs 4.
    ModelParams p{0.5, 0.5, 0.0, 0.0, 0.0, 2};
    auto policy = extract_policy(ValueTable(p), p);
    EXPECT_EQ(policy(2, 2), Action::Tx1);
    EXPECT_EQ(policy.ties_at({2, 2}), (ActionSet{Action::Tx1, Action::Tx2}));
    p.c_tx = 0.5; // transmit now ties with idle too: lowest index wins
    policy = extract_policy(ValueTable(p), p);
    EXPECT_EQ(policy(2, 2), Action::Idle);
    EXPECT_EQ(policy.ties_at({2, 2}).size(), 3);
}

TEST(ExtractPolicy, SwapSymmetryOnSymmetricInstances) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        const ModelParams p = oracle::random_params(rng, 10, true);
        const auto result = rvi_solve(p);
        for (const AgeState s : enumerate_states(p)) {
            if (s.a1 == s.a2) continue;
            if (result.policy.ties_at(s).size() > 1) continue;
            EXPECT_EQ(result.policy.at(s.swapped()), swapped(result.policy.at(s)));
        }
    }
}

TEST(ExtractPolicy, ShiftInvariance) {
    const ModelParams p{0.3, 0.35, 0.75, 0.7, 2.0, 12};
    const auto result = rvi_solve(p);
    ValueTable shifted = result.u_table;
    for (double& v : shifted.values) v += 123.5;
    // Relative tie slack grows slightly with |Q|; compare chosen actions.
    EXPECT_EQ(extract_policy(shifted, p).actions, result.policy.actions);
}

TEST(ActionSet, Basics) {
    ActionSet set;
    EXPECT_TRUE(set.empty());
    set.insert(Action::Tx2);
    set.insert(Action::Tx1);
    EXPECT_EQ(set.size(), 2);
    EXPECT_EQ(set.first(), Action::Tx1);
    EXPECT_FALSE(set.contains(Action::Idle));
}
