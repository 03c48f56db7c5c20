#pragma once

// Scheduling policies compared in the experiments: the solved optimal table
// and the MAF, MAFT, TPO and uniform-random baselines.

#include "gossip_aoi/chain.hpp"
#include "gossip_aoi/errors.hpp"
#include "gossip_aoi/model.hpp"
#include "gossip_aoi/rvi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

namespace gossip_aoi {

/// SplitMix64: 64-bit state, one multiply-xorshift output per step.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Independent generator for sub-stream `stream`; leaves *this untouched.
    SplitMix64 split(std::uint64_t stream) const {
        SplitMix64 mixer(state_ ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
        return SplitMix64(mixer());
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

struct OptimalTable {
    PolicyTable table;
};
struct Maf {};
struct Maft {
    int threshold = 1;
};
struct Tpo {};
struct RandomUniform {};

using PolicySpec = std::variant<OptimalTable, Maf, Maft, Tpo, RandomUniform>;

inline std::string policy_name(const PolicySpec& spec) {
    struct {
        std::string operator()(const OptimalTable&) const { return "aoi_optimal"; }
        std::string operator()(const Maf&) const { return "maf"; }
        std::string operator()(const Maft&) const { return "maft"; }
        std::string operator()(const Tpo&) const { return "tpo"; }
        std::string operator()(const RandomUniform&) const { return "random"; }
    } visitor;
    return std::visit(visitor, spec);
}

inline void validate(const PolicySpec& spec, const ModelParams& params) {
    if (const auto* maft = std::get_if<Maft>(&spec); maft && maft->threshold < 1)
        throw InvalidParams("maft_threshold", "MAFT threshold must be at least 1");
    if (const auto* opt = std::get_if<OptimalTable>(&spec); opt && opt->table.a_max != params.a_max)
        throw InvalidParams("policy", "policy table was built for a different a_max");
}

/// Default MAFT threshold: ceil(c_tx / p1), at least 1.
inline int default_maft_threshold(const ModelParams& params) {
    if (params.p1 <= 0.0) return 1;
    const double ratio = params.c_tx / params.p1;
    return std::max(1, static_cast<int>(std::ceil(ratio - 1e-12 * std::max(1.0, ratio))));
}

namespace detail {

inline Action max_age_first(AgeState s) { return s.a2 > s.a1 ? Action::Tx2 : Action::Tx1; }

inline Action best_channel(const ModelParams& params) { return params.p2 > params.p1 ? Action::Tx2 : Action::Tx1; }

} // namespace detail

/// Action of `spec` at `s`. Only RandomUniform consumes `rng`.
inline Action decide(const PolicySpec& spec, AgeState s, const ModelParams& params, SplitMix64& rng) {
    if (const auto* opt = std::get_if<OptimalTable>(&spec)) return opt->table.at(s);
    if (std::holds_alternative<Maf>(spec)) return detail::max_age_first(s);
    if (const auto* maft = std::get_if<Maft>(&spec))
        return std::max(s.a1, s.a2) < maft->threshold ? Action::Idle : detail::max_age_first(s);
    if (std::holds_alternative<Tpo>(spec)) return detail::best_channel(params);
    const double u = rng.uniform();
    return u < 1.0 / 3 ? Action::Idle : (u < 2.0 / 3 ? Action::Tx1 : Action::Tx2);
}

/// Action distribution per state, for exact evaluation of any policy.
inline StochasticPolicy to_stochastic(const PolicySpec& spec, const ModelParams& params) {
    validate(spec, params);
    if (std::holds_alternative<RandomUniform>(spec)) return StochasticPolicy::uniform(params.a_max);
    PolicyTable table(params.a_max, Action::Idle);
    SplitMix64 unused(0);
    for (const AgeState s : enumerate_states(params)) table.set(s, decide(spec, s, params, unused));
    return StochasticPolicy::from(table);
}

/// Exact long-run average cost of `spec` from (1,1).
inline double evaluate_spec(const PolicySpec& spec, const ModelParams& params) {
    return evaluate_policy(to_stochastic(spec, params), params);
}

} // namespace gossip_aoi
