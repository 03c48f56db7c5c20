#pragma once

// States, actions, dynamics and stage costs of the two-receiver gossip
// scheduling MDP.

#include "gossip_aoi/errors.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gossip_aoi {

/// Parameters of one MDP instance.
struct ModelParams {
    double p1 = 0.2;   ///< TX -> RX1 success probability
    double p2 = 0.2;   ///< TX -> RX2 success probability
    double pv1 = 0.8;  ///< gossip RX1 -> RX2 success probability
    double pv2 = 0.8;  ///< gossip RX2 -> RX1 success probability
    double c_tx = 1.0; ///< cost paid on every transmission attempt
    int a_max = 30;    ///< age saturation cap

    bool operator==(const ModelParams&) const = default;
};

/// Throws InvalidParams naming the first offending field.
inline void validate(const ModelParams& params) {
    auto check_prob = [](const char* name, double value) {
        if (!(value >= 0.0 && value <= 1.0))
            throw InvalidParams(name, "probability must lie in [0,1], got " + std::to_string(value));
    };
    check_prob("p1", params.p1);
    check_prob("p2", params.p2);
    check_prob("pv1", params.pv1);
    check_prob("pv2", params.pv2);
    if (!(params.c_tx >= 0.0) || !std::isfinite(params.c_tx))
        throw InvalidParams("c_tx", "transmission cost must be finite and non-negative");
    if (params.a_max < 2)
        throw InvalidParams("a_max", "age cap must be at least 2, got " + std::to_string(params.a_max));
}

inline bool symmetric(const ModelParams& params) {
    return params.p1 == params.p2 && params.pv1 == params.pv2;
}

/// Ages of (RX1, RX2) in slots.
struct AgeState {
    int a1 = 1;
    int a2 = 1;

    auto operator<=>(const AgeState&) const = default;

    AgeState swapped() const { return {a2, a1}; }
};

enum class Action : int { Idle = 0, Tx1 = 1, Tx2 = 2 };

inline constexpr std::array<Action, 3> all_actions{Action::Idle, Action::Tx1, Action::Tx2};
inline constexpr int num_actions = 3;

constexpr int to_index(Action u) { return static_cast<int>(u); }

/// Mirror image of an action under swapping the two receivers.
constexpr Action swapped(Action u) {
    switch (u) {
    case Action::Tx1: return Action::Tx2;
    case Action::Tx2: return Action::Tx1;
    default: return Action::Idle;
    }
}

constexpr char symbol(Action u) {
    switch (u) {
    case Action::Tx1: return '1';
    case Action::Tx2: return '2';
    default: return 'I';
    }
}

/// Increments an age by one slot, saturating at a_max.
constexpr int clamp_age(int a, int a_max) {
    assert(a >= 0 && a <= a_max);
    return std::min(a + 1, a_max);
}

struct Outcome {
    AgeState next;
    double prob = 0.0;

    bool operator==(const Outcome&) const = default;
};

/// Next-state distribution of one (state, action) pair. Holds at most four
/// distinct outcomes; duplicates are merged on insertion.
class TransitionDist {
public:
    void add(AgeState next, double prob) {
        for (std::size_t i = 0; i < size_; ++i) {
            if (entries_[i].next == next) {
                entries_[i].prob += prob;
                return;
            }
        }
        assert(size_ < entries_.size());
        entries_[size_++] = {next, prob};
    }

    std::size_t size() const { return size_; }
    const Outcome* begin() const { return entries_.data(); }
    const Outcome* end() const { return entries_.data() + size_; }
    const Outcome& operator[](std::size_t i) const { return entries_[i]; }

    /// Probability of `next`, zero if it is not an outcome.
    double prob_of(AgeState next) const {
        for (const auto& e : *this)
            if (e.next == next) return e.prob;
        return 0.0;
    }

    double total() const {
        double sum = 0.0;
        for (const auto& e : *this) sum += e.prob;
        return sum;
    }

private:
    std::array<Outcome, 4> entries_{};
    std::size_t size_ = 0;
};

/// P(s' | s, u). Zero-probability branches are dropped.
inline TransitionDist transitions(AgeState s, Action u, const ModelParams& params) {
    const int m1 = clamp_age(s.a1, params.a_max);
    const int m2 = clamp_age(s.a2, params.a_max);
    TransitionDist dist;
    auto add = [&](AgeState next, double prob) {
        if (prob > 0.0) dist.add(next, prob);
    };
    switch (u) {
    case Action::Tx1:
        add({1, m2}, params.p1);
        add({m1, m2}, 1.0 - params.p1);
        break;
    case Action::Tx2:
        add({m1, 1}, params.p2);
        add({m1, m2}, 1.0 - params.p2);
        break;
    case Action::Idle: {
        const int m = std::min(m1, m2);
        const double g1 = params.pv1, g2 = params.pv2;
        add({m, m}, g1 * g2);
        add({m1, m}, g1 * (1.0 - g2));
        add({m, m2}, (1.0 - g1) * g2);
        add({m1, m2}, (1.0 - g1) * (1.0 - g2));
        break;
    }
    }
    return dist;
}

/// Expected next-slot age sum plus the transmission cost, computed from the
/// transition distribution.
inline double stage_cost(AgeState s, Action u, const ModelParams& params) {
    double cost = u == Action::Idle ? 0.0 : params.c_tx;
    for (const auto& [next, prob] : transitions(s, u, params))
        cost += prob * (next.a1 + next.a2);
    return cost;
}

/// The same stage cost written out per action, without going through
/// `transitions`.
inline double stage_cost_closed_form(AgeState s, Action u, const ModelParams& params) {
    const double m1 = clamp_age(s.a1, params.a_max);
    const double m2 = clamp_age(s.a2, params.a_max);
    const double m = std::min(m1, m2);
    switch (u) {
    case Action::Tx1:
        return params.p1 * (1 + m2) + (1 - params.p1) * (m1 + m2) + params.c_tx;
    case Action::Tx2:
        return params.p2 * (m1 + 1) + (1 - params.p2) * (m1 + m2) + params.c_tx;
    case Action::Idle:
    default: {
        const double g1 = params.pv1, g2 = params.pv2;
        return g1 * g2 * (2 * m) + g1 * (1 - g2) * (m1 + m) + (1 - g1) * g2 * (m + m2) +
               (1 - g1) * (1 - g2) * (m1 + m2);
    }
    }
}

/// Row-major indexing of the working grid {1..a_max}^2.
inline std::size_t num_states(int a_max) {
    return static_cast<std::size_t>(a_max) * static_cast<std::size_t>(a_max);
}

inline std::size_t state_index(AgeState s, int a_max) {
    assert(s.a1 >= 1 && s.a1 <= a_max && s.a2 >= 1 && s.a2 <= a_max);
    return static_cast<std::size_t>(s.a1 - 1) * static_cast<std::size_t>(a_max) +
           static_cast<std::size_t>(s.a2 - 1);
}

inline AgeState state_at(std::size_t index, int a_max) {
    const auto n = static_cast<std::size_t>(a_max);
    return {static_cast<int>(index / n) + 1, static_cast<int>(index % n) + 1};
}

inline bool on_grid(AgeState s, int a_max) {
    return s.a1 >= 1 && s.a1 <= a_max && s.a2 >= 1 && s.a2 <= a_max;
}

inline std::vector<AgeState> enumerate_states(const ModelParams& params) {
    std::vector<AgeState> states;
    states.reserve(num_states(params.a_max));
    for (int a1 = 1; a1 <= params.a_max; ++a1)
        for (int a2 = 1; a2 <= params.a_max; ++a2) states.push_back({a1, a2});
    return states;
}

/// Flattened kernel: for every (state, action) the merged outcomes as state
/// indices, plus the stage cost. Built once per solve.
class TransitionTable {
public:
    struct Entry {
        std::size_t next;
        double prob;
    };

    explicit TransitionTable(const ModelParams& params)
        : a_max_(params.a_max), n_(num_states(params.a_max)) {
        offsets_.reserve(n_ * num_actions + 1);
        costs_.reserve(n_ * num_actions);
        offsets_.push_back(0);
        for (std::size_t i = 0; i < n_; ++i) {
            const AgeState s = state_at(i, a_max_);
            for (Action u : all_actions) {
                const auto dist = transitions(s, u, params);
                for (const auto& [next, prob] : dist) entries_.push_back({state_index(next, a_max_), prob});
                offsets_.push_back(entries_.size());
                costs_.push_back(stage_cost(s, u, params));
            }
        }
    }

    int a_max() const { return a_max_; }
    std::size_t size() const { return n_; }

    std::span<const Entry> outcomes(std::size_t state, Action u) const {
        const std::size_t k = state * num_actions + to_index(u);
        return {entries_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
    }

    double cost(std::size_t state, Action u) const { return costs_[state * num_actions + to_index(u)]; }

    /// c(s,u) + sum_s' P(s'|s,u) values[s']
    double q_value(std::size_t state, Action u, std::span<const double> values) const {
        double q = cost(state, u);
        for (const auto& e : outcomes(state, u)) q += e.prob * values[e.next];
        return q;
    }

private:
    int a_max_;
    std::size_t n_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> offsets_;
    std::vector<double> costs_;
};

} // namespace gossip_aoi
