#pragma once

// Exact long-run average cost of stationary policies via the stationary
// distribution of the induced Markov chain, and exhaustive policy search on
// tiny grids. These do not share any code path with relative value iteration.

#include "gossip_aoi/errors.hpp"
#include "gossip_aoi/model.hpp"
#include "gossip_aoi/rvi.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace gossip_aoi {

/// Per-state distribution over {Idle, Tx1, Tx2}.
using ActionProbs = std::array<double, 3>;

/// Stationary randomized policy.
struct StochasticPolicy {
    int a_max = 0;
    std::vector<ActionProbs> probs;

    static StochasticPolicy from(const PolicyTable& policy) {
        StochasticPolicy out{policy.a_max, std::vector<ActionProbs>(policy.actions.size(), ActionProbs{})};
        for (std::size_t i = 0; i < policy.actions.size(); ++i) out.probs[i][to_index(policy.actions[i])] = 1.0;
        return out;
    }

    static StochasticPolicy uniform(int a_max) {
        return {a_max, std::vector<ActionProbs>(num_states(a_max), ActionProbs{1.0 / 3, 1.0 / 3, 1.0 / 3})};
    }
};

struct ChainEvaluation {
    double average_cost = 0.0;
    /// Long-run fraction of time spent in each state, starting from (1,1).
    std::vector<double> occupancy;
    int closed_classes = 0;
};

namespace detail {

/// Solves A x = b. Dense full-pivot LU for small systems, sparse LU otherwise.
inline Eigen::VectorXd solve_linear(int n, const std::vector<Eigen::Triplet<double>>& triplets,
                                    const Eigen::VectorXd& b) {
    Eigen::VectorXd x;
    if (n <= 64) {
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
        for (const auto& t : triplets) dense(t.row(), t.col()) += t.value();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
        lu.setThreshold(1e-13);
        if (!lu.isInvertible()) throw SingularChain("stationary system is singular");
        x = lu.solve(b);
    } else {
        Eigen::SparseMatrix<double> sparse(n, n);
        sparse.setFromTriplets(triplets.begin(), triplets.end());
        sparse.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(sparse);
        if (lu.info() != Eigen::Success) throw SingularChain("stationary system is singular");
        x = lu.solve(b);
        if (lu.info() != Eigen::Success) throw SingularChain("stationary solve failed");
    }
    if (!x.allFinite()) throw SingularChain("stationary solve produced non-finite values");
    return x;
}

struct Edge {
    std::size_t to;
    double prob;
};

} // namespace detail

/// Exact long-run behaviour of the chain induced by `policy`, started at
/// (1,1). Handles several closed classes (possible with degenerate
/// probabilities) by weighting each class with its absorption probability.
inline ChainEvaluation evaluate_chain(const StochasticPolicy& policy, const ModelParams& params) {
    validate(params);
    const TransitionTable table(params);
    const std::size_t n = table.size();
    if (policy.probs.size() != n) throw InvalidParams("policy", "policy size does not match the grid");

    std::vector<std::vector<detail::Edge>> out(n);
    std::vector<double> cost(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (Action u : all_actions) {
            const double w = policy.probs[i][to_index(u)];
            if (w <= 0.0) continue;
            cost[i] += w * table.cost(i, u);
            for (const auto& e : table.outcomes(i, u)) {
                auto it = std::find_if(out[i].begin(), out[i].end(), [&](const auto& x) { return x.to == e.next; });
                if (it == out[i].end())
                    out[i].push_back({e.next, w * e.prob});
                else
                    it->prob += w * e.prob;
            }
        }
    }

    const std::size_t start = state_index({1, 1}, params.a_max);

    // States reachable from the start, in discovery order.
    std::vector<char> reachable(n, 0);
    std::vector<std::size_t> order{start};
    reachable[start] = 1;
    for (std::size_t k = 0; k < order.size(); ++k)
        for (const auto& e : out[order[k]])
            if (!reachable[e.to]) {
                reachable[e.to] = 1;
                order.push_back(e.to);
            }

    // Tarjan SCC restricted to reachable states, iterative.
    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), low(n, 0), component(n, unvisited);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, num_components = 0;
    struct Frame {
        std::size_t v, edge;
    };
    for (std::size_t root : order) {
        if (index[root] != unvisited) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& frame = call.back();
            const std::size_t v = frame.v;
            if (frame.edge < out[v].size()) {
                const std::size_t w = out[v][frame.edge++].to;
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    component[w] = num_components;
                } while (w != v);
                ++num_components;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }

    std::vector<char> closed(num_components, 1);
    for (std::size_t v : order)
        for (const auto& e : out[v])
            if (component[e.to] != component[v]) closed[component[v]] = 0;

    ChainEvaluation result;
    result.occupancy.assign(n, 0.0);
    std::vector<double> class_cost(num_components, 0.0);
    std::vector<std::vector<double>> class_dist(num_components);

    for (std::size_t c = 0; c < num_components; ++c) {
        if (!closed[c]) continue;
        ++result.closed_classes;
        std::vector<std::size_t> members;
        for (std::size_t v : order)
            if (component[v] == c) members.push_back(v);
        std::sort(members.begin(), members.end());
        const int k = static_cast<int>(members.size());
        std::vector<int> local(n, -1);
        for (int j = 0; j < k; ++j) local[members[j]] = j;

        // pi (P - I) = 0 with the last balance equation replaced by sum(pi) = 1.
        std::vector<Eigen::Triplet<double>> triplets;
        for (int j = 0; j < k; ++j) {
            const std::size_t v = members[j];
            for (const auto& e : out[v]) {
                const int row = local[e.to];
                if (row != k - 1) triplets.emplace_back(row, j, e.prob);
            }
            if (j != k - 1) triplets.emplace_back(j, j, -1.0);
            triplets.emplace_back(k - 1, j, 1.0);
        }
        Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
        b(k - 1) = 1.0;
        const Eigen::VectorXd pi = detail::solve_linear(k, triplets, b);
        class_dist[c].assign(n, 0.0);
        for (int j = 0; j < k; ++j) {
            class_dist[c][members[j]] = pi(j);
            class_cost[c] += pi(j) * cost[members[j]];
        }
    }

    std::vector<double> absorb(num_components, 0.0);
    if (closed[component[start]]) {
        absorb[component[start]] = 1.0;
    } else {
        std::vector<std::size_t> transient;
        for (std::size_t v : order)
            if (!closed[component[v]]) transient.push_back(v);
        std::sort(transient.begin(), transient.end());
        const int k = static_cast<int>(transient.size());
        std::vector<int> local(n, -1);
        for (int j = 0; j < k; ++j) local[transient[j]] = j;
        std::vector<Eigen::Triplet<double>> triplets;
        for (int j = 0; j < k; ++j) {
            triplets.emplace_back(j, j, 1.0);
            for (const auto& e : out[transient[j]])
                if (local[e.to] >= 0) triplets.emplace_back(j, local[e.to], -e.prob);
        }
        // One absorption solve per closed class: (I - P_TT) h = P_T,C 1.
        for (std::size_t c = 0; c < num_components; ++c) {
            if (!closed[c]) continue;
            Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
            for (int j = 0; j < k; ++j)
                for (const auto& e : out[transient[j]])
                    if (component[e.to] == c) b(j) += e.prob;
            const Eigen::VectorXd h = detail::solve_linear(k, triplets, b);
            absorb[c] = h(local[start]);
        }
    }

    for (std::size_t c = 0; c < num_components; ++c) {
        if (!closed[c] || absorb[c] == 0.0) continue;
        result.average_cost += absorb[c] * class_cost[c];
        for (std::size_t i = 0; i < n; ++i) result.occupancy[i] += absorb[c] * class_dist[c][i];
    }
    return result;
}

/// Exact long-run average cost of a deterministic policy started at (1,1).
inline double evaluate_policy(const PolicyTable& policy, const ModelParams& params) {
    return evaluate_chain(StochasticPolicy::from(policy), params).average_cost;
}

inline double evaluate_policy(const StochasticPolicy& policy, const ModelParams& params) {
    return evaluate_chain(policy, params).average_cost;
}

struct BruteForceResult {
    double rho = 0.0;
    /// First minimizing policy in enumeration order. `ties[s]` collects every
    /// action used at s by some policy whose cost is within `gain_tol` of rho.
    PolicyTable best_policy;
    long optimal_count = 0;
    long policies_evaluated = 0;
};

/// Evaluates all 3^(a_max^2) deterministic stationary policies.
inline BruteForceResult brute_force_solve(const ModelParams& params, double gain_tol = 1e-9) {
    validate(params);
    if (params.a_max > 4)
        throw TooLarge("exhaustive search needs a_max <= 4, got " + std::to_string(params.a_max));
    const std::size_t n = num_states(params.a_max);
    long total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;

    auto decode = [&](long code) {
        PolicyTable policy(params.a_max, Action::Idle);
        for (std::size_t i = 0; i < n; ++i) {
            policy.actions[i] = static_cast<Action>(code % 3);
            policy.ties[i] = ActionSet{policy.actions[i]};
            code /= 3;
        }
        return policy;
    };

    std::vector<double> costs(static_cast<std::size_t>(total));
    double best = std::numeric_limits<double>::infinity();
    long best_code = 0;
    for (long code = 0; code < total; ++code) {
        costs[code] = evaluate_policy(decode(code), params);
        if (costs[code] < best) {
            best = costs[code];
            best_code = code;
        }
    }

    BruteForceResult result;
    result.rho = best;
    result.best_policy = decode(best_code);
    result.policies_evaluated = total;
    std::fill(result.best_policy.ties.begin(), result.best_policy.ties.end(), ActionSet{});
    for (long code = 0; code < total; ++code) {
        if (costs[code] > best + gain_tol) continue;
        ++result.optimal_count;
        long rest = code;
        for (std::size_t i = 0; i < n; ++i) {
            result.best_policy.ties[i].insert(static_cast<Action>(rest % 3));
            rest /= 3;
        }
    }
    return result;
}

} // namespace gossip_aoi
