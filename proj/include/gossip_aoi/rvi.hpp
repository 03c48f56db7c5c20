#pragma once

// Relative value iteration for the average-cost Bellman equation and
// greedy policy extraction.

#include "gossip_aoi/errors.hpp"
#include "gossip_aoi/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace gossip_aoi {

/// Relative value function U(s) over the working grid, in `enumerate_states`
/// order.
struct ValueTable {
    ModelParams params;
    std::vector<double> values;

    ValueTable() = default;
    explicit ValueTable(const ModelParams& p, double fill = 0.0)
        : params(p), values(num_states(p.a_max), fill) {}

    int a_max() const { return params.a_max; }

    double operator()(int a1, int a2) const { return values[state_index({a1, a2}, params.a_max)]; }
    double& operator()(int a1, int a2) { return values[state_index({a1, a2}, params.a_max)]; }
    double at(AgeState s) const { return values[state_index(s, params.a_max)]; }

    bool operator==(const ValueTable&) const = default;
};

/// Small set of actions stored as a bitmask.
class ActionSet {
public:
    constexpr ActionSet() = default;
    constexpr ActionSet(std::initializer_list<Action> actions) {
        for (Action u : actions) insert(u);
    }

    constexpr void insert(Action u) { bits_ |= static_cast<std::uint8_t>(1u << to_index(u)); }
    constexpr bool contains(Action u) const { return (bits_ >> to_index(u)) & 1u; }
    constexpr int size() const { return ((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint8_t bits() const { return bits_; }

    /// Lowest-index member. Precondition: not empty.
    constexpr Action first() const {
        for (Action u : all_actions)
            if (contains(u)) return u;
        return Action::Idle;
    }

    constexpr bool operator==(const ActionSet&) const = default;

private:
    std::uint8_t bits_ = 0;
};

/// Stationary deterministic policy with the set of near-optimal actions
/// recorded per state.
struct PolicyTable {
    int a_max = 0;
    std::vector<Action> actions;
    std::vector<ActionSet> ties;

    PolicyTable() = default;
    PolicyTable(int cap, Action fill)
        : a_max(cap), actions(num_states(cap), fill), ties(num_states(cap), ActionSet{fill}) {}

    Action at(AgeState s) const { return actions[state_index(s, a_max)]; }
    Action operator()(int a1, int a2) const { return at({a1, a2}); }
    ActionSet ties_at(AgeState s) const { return ties[state_index(s, a_max)]; }

    /// Sets the action at `s` and resets its tie set to {u}.
    void set(AgeState s, Action u) {
        const auto i = state_index(s, a_max);
        actions[i] = u;
        ties[i] = ActionSet{u};
    }

    bool operator==(const PolicyTable&) const = default;
};

struct SolveResult {
    double rho_star = 0.0;
    ValueTable u_table;
    PolicyTable policy;
    long iterations = 0;
    double final_residual = 0.0; ///< sup-norm of the last update
    double final_span = 0.0;     ///< span seminorm of the last update, diagnostic only

    bool operator==(const SolveResult&) const = default;
};

struct SolverOptions {
    double epsilon = 1e-9;
    long max_iter = 100000;
    AgeState ref_state{1, 1};
    double tie_tol = 1e-8;
};

/// Q(s,u) = c(s,u) + sum_s' P(s'|s,u) U(s').
inline double q_value(AgeState s, Action u, const ValueTable& U, const ModelParams& params) {
    double q = stage_cost(s, u, params);
    for (const auto& [next, prob] : transitions(s, u, params)) q += prob * U.at(next);
    return q;
}

namespace detail {

inline ActionSet near_minimal(const std::array<double, 3>& q, double tie_tol) {
    const double best = *std::min_element(q.begin(), q.end());
    const double slack = tie_tol * (std::abs(best) + 1.0);
    ActionSet ties;
    for (Action u : all_actions)
        if (q[to_index(u)] - best <= slack) ties.insert(u);
    return ties;
}

} // namespace detail

/// Greedy policy with respect to U. Ties within `tie_tol * (|min Q| + 1)`
/// resolve to the lowest action index, so a Tx1/Tx2 tie picks Tx1.
inline PolicyTable extract_policy(const ValueTable& U, const ModelParams& params, double tie_tol = 1e-8) {
    const TransitionTable table(params);
    PolicyTable policy(params.a_max, Action::Idle);
    for (std::size_t i = 0; i < table.size(); ++i) {
        std::array<double, 3> q{};
        for (Action u : all_actions) q[to_index(u)] = table.q_value(i, u, U.values);
        const ActionSet ties = detail::near_minimal(q, tie_tol);
        policy.ties[i] = ties;
        policy.actions[i] = ties.first();
    }
    return policy;
}

/// Solves rho + U(s) = min_u Q(s,u) by synchronous relative value iteration
/// starting from U = 0. U(ref_state) is pinned to zero after every sweep.
/// Stops once the sup-norm change drops below `options.epsilon`.
inline SolveResult rvi_solve(const ModelParams& params, const SolverOptions& options) {
    validate(params);
    if (!(options.epsilon > 0.0)) throw InvalidParams("epsilon", "must be positive");
    if (options.max_iter < 1) throw InvalidParams("max_iter", "must be at least 1");
    if (!on_grid(options.ref_state, params.a_max))
        throw InvalidParams("ref_state", "reference state is off the working grid");

    const TransitionTable table(params);
    const std::size_t n = table.size();
    const std::size_t ref = state_index(options.ref_state, params.a_max);

    std::vector<double> current(n, 0.0), next(n, 0.0);
    double rho = 0.0, residual = std::numeric_limits<double>::infinity(), span = residual;
    long iter = 0;
    while (iter < options.max_iter) {
        ++iter;
        for (std::size_t i = 0; i < n; ++i) {
            double best = table.q_value(i, Action::Idle, current);
            best = std::min(best, table.q_value(i, Action::Tx1, current));
            best = std::min(best, table.q_value(i, Action::Tx2, current));
            next[i] = best;
        }
        rho = next[ref];
        double max_diff = -std::numeric_limits<double>::infinity();
        double min_diff = std::numeric_limits<double>::infinity();
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] -= rho;
            const double diff = next[i] - current[i];
            residual = std::max(residual, std::abs(diff));
            max_diff = std::max(max_diff, diff);
            min_diff = std::min(min_diff, diff);
        }
        span = max_diff - min_diff;
        current.swap(next);
        if (!std::isfinite(residual)) break;
        if (residual < options.epsilon) {
            SolveResult result;
            result.rho_star = rho;
            result.u_table = ValueTable(params);
            result.u_table.values = std::move(current);
            result.policy = extract_policy(result.u_table, params, options.tie_tol);
            result.iterations = iter;
            result.final_residual = residual;
            result.final_span = span;
            return result;
        }
    }
    throw NonConvergence(iter, residual);
}

inline SolveResult rvi_solve(const ModelParams& params, double epsilon = 1e-9, long max_iter = 100000,
                             AgeState ref_state = {1, 1}) {
    return rvi_solve(params, SolverOptions{epsilon, max_iter, ref_state, 1e-8});
}

/// max_s |rho + U(s) - min_u Q(s,u)| with rho read off the reference state.
inline double bellman_residual(const ValueTable& U, double rho) {
    const TransitionTable table(U.params);
    double worst = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Action u : all_actions) best = std::min(best, table.q_value(i, u, U.values));
        worst = std::max(worst, std::abs(rho + U.values[i] - best));
    }
    return worst;
}

} // namespace gossip_aoi
