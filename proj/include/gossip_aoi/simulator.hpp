#pragma once

// Monte Carlo rollouts of a scheduling policy.

#include "gossip_aoi/errors.hpp"
#include "gossip_aoi/model.hpp"
#include "gossip_aoi/policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace gossip_aoi {

/// Uniform draws for one slot. Always drawn in this order, whether or not the
/// action uses them, so that runs with a common seed share channel outcomes.
struct ChannelDraws {
    double direct = 0.0;  ///< TX -> chosen receiver
    double gossip1 = 0.0; ///< RX1 -> RX2
    double gossip2 = 0.0; ///< RX2 -> RX1

    static ChannelDraws draw(SplitMix64& rng) {
        ChannelDraws d;
        d.direct = rng.uniform();
        d.gossip1 = rng.uniform();
        d.gossip2 = rng.uniform();
        return d;
    }
};

struct StepResult {
    AgeState next;
    double cost = 0.0; ///< next-slot age sum plus c_tx when transmitting
};

inline StepResult step(AgeState s, Action u, const ModelParams& params, const ChannelDraws& draws) {
    const int m1 = clamp_age(s.a1, params.a_max);
    const int m2 = clamp_age(s.a2, params.a_max);
    AgeState next{m1, m2};
    double cost = 0.0;
    switch (u) {
    case Action::Tx1:
        if (draws.direct < params.p1) next.a1 = 1;
        cost = params.c_tx;
        break;
    case Action::Tx2:
        if (draws.direct < params.p2) next.a2 = 1;
        cost = params.c_tx;
        break;
    case Action::Idle: {
        const int m = std::min(m1, m2);
        if (draws.gossip1 < params.pv1) next.a2 = m;
        if (draws.gossip2 < params.pv2) next.a1 = m;
        break;
    }
    }
    return {next, cost + next.a1 + next.a2};
}

inline StepResult step(AgeState s, Action u, const ModelParams& params, SplitMix64& rng) {
    return step(s, u, params, ChannelDraws::draw(rng));
}

struct SimResult {
    double avg_cost = 0.0;
    double std_error = 0.0;
    long horizon = 0;
    long warmup = 0;
    std::uint64_t seed = 0;
    std::array<double, 3> action_frequencies{};

    bool operator==(const SimResult&) const = default;
};

/// Simulates `horizon` slots from (1,1), discards the first `warmup`, and
/// estimates the average cost with a batch-means standard error.
inline SimResult run(const PolicySpec& spec, const ModelParams& params, long horizon, long warmup, std::uint64_t seed,
                     int batches = 50) {
    validate(params);
    validate(spec, params);
    if (warmup < 0) throw InvalidParams("warmup", "must be non-negative");
    if (horizon <= warmup) throw InvalidParams("horizon", "must exceed warmup");
    if (batches < 2) throw InvalidParams("batches", "need at least two batches");

    const SplitMix64 root(seed);
    SplitMix64 channel = root.split(0);
    SplitMix64 chooser = root.split(1);

    const long measured = horizon - warmup;
    const long used_batches = std::min<long>(batches, measured);
    const long batch_size = measured / used_batches;
    std::vector<double> batch_sums(static_cast<std::size_t>(used_batches), 0.0);
    std::array<long, 3> counts{};
    double total = 0.0;

    AgeState s{1, 1};
    for (long t = 0; t < horizon; ++t) {
        const Action u = decide(spec, s, params, chooser);
        const auto [next, cost] = step(s, u, params, channel);
        if (t >= warmup) {
            const long k = t - warmup;
            total += cost;
            ++counts[to_index(u)];
            if (k / batch_size < used_batches) batch_sums[static_cast<std::size_t>(k / batch_size)] += cost;
        }
        s = next;
    }

    SimResult result;
    result.horizon = horizon;
    result.warmup = warmup;
    result.seed = seed;
    result.avg_cost = total / static_cast<double>(measured);
    for (int i = 0; i < 3; ++i) result.action_frequencies[i] = static_cast<double>(counts[i]) / measured;

    double mean = 0.0;
    for (double& b : batch_sums) {
        b /= static_cast<double>(batch_size);
        mean += b;
    }
    mean /= static_cast<double>(used_batches);
    if (used_batches < 2) return result;
    double var = 0.0;
    for (double b : batch_sums) var += (b - mean) * (b - mean);
    var /= static_cast<double>(used_batches - 1);
    result.std_error = std::sqrt(var / static_cast<double>(used_batches));
    return result;
}

/// Warmup used when none is given: 1% of the horizon.
inline long default_warmup(long horizon) { return horizon / 100; }

} // namespace gossip_aoi
