// Command-line front end: solve | analyze | simulate | sweep.

#include "gossip_aoi/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace gossip_aoi;

struct Overrides {
    std::string config_path;
    std::optional<double> p, p1, p2, pv, pv1, pv2, ctx, epsilon;
    std::optional<int> a_max, maft_threshold;
    std::optional<long> max_iter, horizon, warmup;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output, policy, axis, evaluation, values, policies;
};

void add_common(CLI::App& cmd, Overrides& o) {
    cmd.add_option("-c,--config", o.config_path, "JSON config file");
    cmd.add_option("--p", o.p, "direct success probability for both receivers");
    cmd.add_option("--p1", o.p1, "TX -> RX1 success probability");
    cmd.add_option("--p2", o.p2, "TX -> RX2 success probability");
    cmd.add_option("--pv", o.pv, "gossip success probability in both directions");
    cmd.add_option("--pv1", o.pv1, "RX1 -> RX2 gossip success probability");
    cmd.add_option("--pv2", o.pv2, "RX2 -> RX1 gossip success probability");
    cmd.add_option("--ctx", o.ctx, "transmission cost");
    cmd.add_option("--a-max", o.a_max, "age cap");
    cmd.add_option("--epsilon", o.epsilon, "RVI stopping tolerance (sup-norm)");
    cmd.add_option("--max-iter", o.max_iter, "RVI iteration limit");
    cmd.add_option("-o,--output", o.output, "output path");
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) values.push_back(parse_double(item));
    return values;
}

std::vector<std::string> parse_names(const std::string& text) {
    std::vector<std::string> names;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) names.push_back(item);
    return names;
}

Config build_config(const Overrides& o) {
    Config config = o.config_path.empty() ? Config{} : load_config(o.config_path);
    auto& params = config.params;
    if (o.p) params.p1 = params.p2 = *o.p;
    if (o.p1) params.p1 = *o.p1;
    if (o.p2) params.p2 = *o.p2;
    if (o.pv) params.pv1 = params.pv2 = *o.pv;
    if (o.pv1) params.pv1 = *o.pv1;
    if (o.pv2) params.pv2 = *o.pv2;
    if (o.ctx) params.c_tx = *o.ctx;
    if (o.a_max) params.a_max = *o.a_max;
    if (o.epsilon) config.solver.epsilon = *o.epsilon;
    if (o.max_iter) config.solver.max_iter = *o.max_iter;
    if (o.output) config.output = *o.output;
    if (o.policy) config.simulation.policy = *o.policy;
    if (o.maft_threshold) {
        config.simulation.maft_threshold = *o.maft_threshold;
        config.sweep.maft_threshold = *o.maft_threshold;
    }
    if (o.horizon) {
        config.simulation.horizon = *o.horizon;
        config.sweep.evaluation.horizon = *o.horizon;
    }
    if (o.warmup) config.simulation.warmup = *o.warmup;
    if (o.seed) {
        config.simulation.seed = *o.seed;
        config.sweep.evaluation.seed = *o.seed;
    }
    if (o.axis) {
        config.sweep.axis = parse_axis(*o.axis);
        if (!o.values) config.sweep.values = default_sweep_values(config.sweep.axis);
    }
    if (o.values) config.sweep.values = parse_values(*o.values);
    if (o.policies) config.sweep.policies = parse_names(*o.policies);
    if (o.evaluation) {
        if (*o.evaluation != "exact" && *o.evaluation != "simulate")
            throw InvalidParams("evaluation", "must be 'exact' or 'simulate'");
        config.sweep.evaluation.simulate = *o.evaluation == "simulate";
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transmit-or-idle scheduling for two gossiping receivers"};
    app.require_subcommand(1);
    Overrides o;

    auto* solve = app.add_subcommand("solve", "solve the MDP and write the policy grid and value table");
    auto* analyze = app.add_subcommand("analyze", "solve and certify the policy structure (exit 3 on failure)");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a policy's average cost");
    auto* sweep = app.add_subcommand("sweep", "evaluate all policies across a parameter sweep (CSV)");
    for (auto* cmd : {solve, analyze, simulate, sweep}) add_common(*cmd, o);

    for (auto* cmd : {simulate, sweep}) {
        cmd->add_option("--horizon", o.horizon, "simulated slots");
        cmd->add_option("--seed", o.seed, "random seed");
        cmd->add_option("--maft-threshold", o.maft_threshold, "MAFT activation threshold T (>= 1)");
    }
    simulate->add_option("--policy", o.policy, "aoi_optimal | maf | maft | tpo | random");
    simulate->add_option("--warmup", o.warmup, "discarded initial slots (default 1% of horizon)");
    sweep->add_option("--axis", o.axis, "p | pv | c_tx");
    sweep->add_option("--values", o.values, "comma-separated axis values");
    sweep->add_option("--policies", o.policies, "comma-separated policy names");
    sweep->add_option("--evaluation", o.evaluation, "exact | simulate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_success : exit_validation;
    }

    Config config;
    try {
        config = build_config(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    }

    if (*solve) return cmd_solve(config, std::cerr);
    if (*analyze) return cmd_analyze(config, std::cerr);
    if (*simulate) return cmd_simulate(config, std::cerr);
    return cmd_sweep(config, std::cerr);
}
