#pragma once

// Configuration, file formats and the solve / analyze / simulate / sweep
// commands behind the command-line tool.
//
// Config document:
//   {
//     "params":     {"p1", "p2", "pv1", "pv2", "c_tx", "a_max"},
//     "solver":     {"epsilon", "max_iter", "ref_state": [a1, a2], "tie_tol"},
//     "simulation": {"policy", "maft_threshold", "horizon", "warmup", "seed", "batches"},
//     "sweep":      {"axis": "p"|"pv"|"c_tx", "values": [...], "policies": [...],
//                    "maft_threshold", "evaluation": {"mode": "exact"|"simulate", "horizon", "seed"}},
//     "output": "path"
//   }
// Every section and field is optional; omitted fields keep their defaults.

#include "gossip_aoi/chain.hpp"
#include "gossip_aoi/errors.hpp"
#include "gossip_aoi/model.hpp"
#include "gossip_aoi/policies.hpp"
#include "gossip_aoi/rvi.hpp"
#include "gossip_aoi/simulator.hpp"
#include "gossip_aoi/structure.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

namespace gossip_aoi {

using json = nlohmann::json;

enum ExitCode : int { exit_success = 0, exit_validation = 1, exit_nonconvergence = 2, exit_structure_failure = 3 };

enum class SweepAxis { P, Pv, CTx };

inline std::string to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::P: return "p";
    case SweepAxis::Pv: return "pv";
    case SweepAxis::CTx: return "c_tx";
    }
    return "p";
}

inline SweepAxis parse_axis(const std::string& name) {
    if (name == "p") return SweepAxis::P;
    if (name == "pv") return SweepAxis::Pv;
    if (name == "c_tx" || name == "ctx") return SweepAxis::CTx;
    throw InvalidParams("sweep.axis", "unknown axis '" + name + "' (expected p, pv or c_tx)");
}

/// Axis grids: p and pv in 0.05..0.95 step 0.05, c_tx in 0..10 step 0.5.
inline std::vector<double> default_sweep_values(SweepAxis axis) {
    std::vector<double> values;
    if (axis == SweepAxis::CTx) {
        for (int k = 0; k <= 20; ++k) values.push_back(k / 2.0);
    } else {
        for (int k = 1; k <= 19; ++k) values.push_back(k / 20.0);
    }
    return values;
}

inline ModelParams with_axis(ModelParams params, SweepAxis axis, double value) {
    switch (axis) {
    case SweepAxis::P: params.p1 = params.p2 = value; break;
    case SweepAxis::Pv: params.pv1 = params.pv2 = value; break;
    case SweepAxis::CTx: params.c_tx = value; break;
    }
    return params;
}

struct SimulationConfig {
    std::string policy = "aoi_optimal";
    std::optional<int> maft_threshold;
    long horizon = 1'000'000;
    std::optional<long> warmup;
    std::uint64_t seed = 42;
    int batches = 50;
};

struct Evaluation {
    bool simulate = false;
    long horizon = 1'000'000;
    std::uint64_t seed = 42;
};

struct SweepSpec {
    ModelParams base;
    SweepAxis axis = SweepAxis::P;
    std::vector<double> values = default_sweep_values(SweepAxis::P);
    std::vector<std::string> policies{"aoi_optimal", "maf", "maft", "tpo", "random"};
    std::optional<int> maft_threshold;
    Evaluation evaluation;
    SolverOptions solver;
    std::string output_path = "sweep.csv";
};

struct Config {
    ModelParams params;
    SolverOptions solver;
    SimulationConfig simulation;
    SweepSpec sweep;
    std::optional<std::string> output;
};

inline const std::vector<std::string>& known_policies() {
    static const std::vector<std::string> names{"aoi_optimal", "maf", "maft", "tpo", "random"};
    return names;
}

inline std::string canonical_policy(const std::string& name) {
    if (name == "optimal") return "aoi_optimal";
    if (std::find(known_policies().begin(), known_policies().end(), name) == known_policies().end())
        throw InvalidParams("policy", "unknown policy '" + name + "'");
    return name;
}

/// Builds a PolicySpec; `optimal` is only consulted for aoi_optimal.
inline PolicySpec make_policy(const std::string& name, const ModelParams& params, std::optional<int> maft_threshold,
                              const PolicyTable* optimal) {
    const std::string canonical = canonical_policy(name);
    if (canonical == "aoi_optimal") {
        if (!optimal) throw InvalidParams("policy", "optimal policy table not available");
        return OptimalTable{*optimal};
    }
    if (canonical == "maf") return Maf{};
    if (canonical == "maft") {
        const int threshold = maft_threshold.value_or(default_maft_threshold(params));
        if (threshold < 1) throw InvalidParams("maft_threshold", "MAFT threshold must be at least 1");
        return Maft{threshold};
    }
    if (canonical == "tpo") return Tpo{};
    return RandomUniform{};
}

inline void validate(const SweepSpec& spec) {
    if (spec.values.empty()) throw InvalidParams("sweep.values", "must not be empty");
    for (std::size_t i = 1; i < spec.values.size(); ++i)
        if (!(spec.values[i] > spec.values[i - 1]))
            throw InvalidParams("sweep.values", "must be strictly increasing");
    for (double v : spec.values) {
        const bool prob_axis = spec.axis != SweepAxis::CTx;
        if (prob_axis && !(v >= 0.0 && v <= 1.0))
            throw InvalidParams("sweep.values", "probability axis value out of [0,1]");
        if (!prob_axis && !(v >= 0.0 && std::isfinite(v)))
            throw InvalidParams("sweep.values", "c_tx axis value must be non-negative");
    }
    if (spec.policies.empty()) throw InvalidParams("sweep.policies", "must not be empty");
    for (const auto& name : spec.policies) canonical_policy(name);
    if (spec.maft_threshold && *spec.maft_threshold < 1)
        throw InvalidParams("maft_threshold", "MAFT threshold must be at least 1");
    if (spec.evaluation.simulate && spec.evaluation.horizon < 2)
        throw InvalidParams("sweep.evaluation.horizon", "must be at least 2");
    validate(spec.base);
}

inline void validate(const Config& config) {
    validate(config.params);
    if (!(config.solver.epsilon > 0.0)) throw InvalidParams("solver.epsilon", "must be positive");
    if (config.solver.max_iter < 1) throw InvalidParams("solver.max_iter", "must be at least 1");
    if (!on_grid(config.solver.ref_state, config.params.a_max))
        throw InvalidParams("solver.ref_state", "reference state is off the working grid");
    if (config.simulation.maft_threshold && *config.simulation.maft_threshold < 1)
        throw InvalidParams("maft_threshold", "MAFT threshold must be at least 1");
    canonical_policy(config.simulation.policy);
    if (config.simulation.horizon < 1) throw InvalidParams("simulation.horizon", "must be positive");
    if (config.simulation.warmup &&
        (*config.simulation.warmup < 0 || *config.simulation.warmup >= config.simulation.horizon))
        throw InvalidParams("simulation.warmup", "must satisfy 0 <= warmup < horizon");
}

namespace detail {

template <class T>
void read_field(const json& object, const char* key, const std::string& section, T& target) {
    if (!object.contains(key)) return;
    try {
        target = object.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidParams(section + "." + key, "has the wrong type");
    }
}

template <class T>
void read_optional(const json& object, const char* key, const std::string& section, std::optional<T>& target) {
    if (!object.contains(key) || object.at(key).is_null()) return;
    T value{};
    read_field(object, key, section, value);
    target = value;
}

} // namespace detail

/// Parses a config document. Type errors and out-of-range values raise
/// InvalidParams naming the offending field.
inline Config parse_config(const json& doc) {
    if (!doc.is_object()) throw InvalidParams("config", "top level must be a JSON object");
    Config config;
    if (doc.contains("params")) {
        const json& p = doc.at("params");
        detail::read_field(p, "p1", "params", config.params.p1);
        detail::read_field(p, "p2", "params", config.params.p2);
        detail::read_field(p, "pv1", "params", config.params.pv1);
        detail::read_field(p, "pv2", "params", config.params.pv2);
        detail::read_field(p, "c_tx", "params", config.params.c_tx);
        detail::read_field(p, "a_max", "params", config.params.a_max);
    }
    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        detail::read_field(s, "epsilon", "solver", config.solver.epsilon);
        detail::read_field(s, "max_iter", "solver", config.solver.max_iter);
        detail::read_field(s, "tie_tol", "solver", config.solver.tie_tol);
        if (s.contains("ref_state")) {
            std::vector<int> ref;
            detail::read_field(s, "ref_state", "solver", ref);
            if (ref.size() != 2) throw InvalidParams("solver.ref_state", "must be [a1, a2]");
            config.solver.ref_state = {ref[0], ref[1]};
        }
    }
    if (doc.contains("simulation")) {
        const json& s = doc.at("simulation");
        detail::read_field(s, "policy", "simulation", config.simulation.policy);
        detail::read_optional(s, "maft_threshold", "simulation", config.simulation.maft_threshold);
        detail::read_field(s, "horizon", "simulation", config.simulation.horizon);
        detail::read_optional(s, "warmup", "simulation", config.simulation.warmup);
        detail::read_field(s, "seed", "simulation", config.simulation.seed);
        detail::read_field(s, "batches", "simulation", config.simulation.batches);
    }
    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        std::string axis = to_string(config.sweep.axis);
        detail::read_field(s, "axis", "sweep", axis);
        config.sweep.axis = parse_axis(axis);
        config.sweep.values = default_sweep_values(config.sweep.axis);
        detail::read_field(s, "values", "sweep", config.sweep.values);
        detail::read_field(s, "policies", "sweep", config.sweep.policies);
        detail::read_optional(s, "maft_threshold", "sweep", config.sweep.maft_threshold);
        if (s.contains("evaluation")) {
            const json& e = s.at("evaluation");
            std::string mode = "exact";
            detail::read_field(e, "mode", "sweep.evaluation", mode);
            if (mode != "exact" && mode != "simulate")
                throw InvalidParams("sweep.evaluation.mode", "must be 'exact' or 'simulate'");
            config.sweep.evaluation.simulate = mode == "simulate";
            detail::read_field(e, "horizon", "sweep.evaluation", config.sweep.evaluation.horizon);
            detail::read_field(e, "seed", "sweep.evaluation", config.sweep.evaluation.seed);
        }
    }
    if (doc.contains("output")) {
        std::string out;
        detail::read_field(doc, "output", "config", out);
        config.output = out;
    }
    return config;
}

inline Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParams("config", "cannot open " + path.string());
    try {
        return parse_config(json::parse(in));
    } catch (const json::parse_error& e) {
        throw InvalidParams("config", std::string("malformed JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Serialization

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

inline double parse_double(const std::string& text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw InvalidParams("csv", "not a number: '" + text + "'");
    return value;
}

inline json to_json(const ModelParams& p) {
    return {{"p1", p.p1}, {"p2", p.p2}, {"pv1", p.pv1}, {"pv2", p.pv2}, {"c_tx", p.c_tx}, {"a_max", p.a_max}};
}

inline json to_json(AgeState s) { return json::array({s.a1, s.a2}); }

inline json to_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

/// Text rows of the policy grid: row i is a1 = i+1, column j is a2 = j+1.
inline std::vector<std::string> policy_rows(const PolicyTable& policy) {
    std::vector<std::string> rows;
    for (int a1 = 1; a1 <= policy.a_max; ++a1) {
        std::string row;
        for (int a2 = 1; a2 <= policy.a_max; ++a2) row += symbol(policy(a1, a2));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Column-aligned grid with age labels; I = idle, 1 = Tx1, 2 = Tx2.
inline std::string policy_grid_text(const PolicyTable& policy) {
    const int width = static_cast<int>(std::to_string(policy.a_max).size()) + 1;
    const int label = std::max(width, 5);
    std::ostringstream out;
    out << std::setw(label) << "a1\\a2";
    for (int a2 = 1; a2 <= policy.a_max; ++a2) out << std::setw(width) << a2;
    out << '\n';
    for (int a1 = 1; a1 <= policy.a_max; ++a1) {
        out << std::setw(label) << a1;
        for (int a2 = 1; a2 <= policy.a_max; ++a2) out << std::setw(width) << symbol(policy(a1, a2));
        out << '\n';
    }
    return out.str();
}

inline json to_json(const PolicyTable& policy) {
    json ties = json::array();
    for (int a1 = 1; a1 <= policy.a_max; ++a1) {
        json row = json::array();
        for (int a2 = 1; a2 <= policy.a_max; ++a2) {
            json set = json::array();
            for (Action u : all_actions)
                if (policy.ties_at({a1, a2}).contains(u)) set.push_back(to_index(u));
            row.push_back(std::move(set));
        }
        ties.push_back(std::move(row));
    }
    return {{"a_max", policy.a_max},
            {"encoding", "I=idle 1=tx1 2=tx2; rows a1 ascending, columns a2 ascending"},
            {"rows", policy_rows(policy)},
            {"ties", std::move(ties)}};
}

inline std::string values_csv(const ValueTable& U) {
    std::string out = "a1,a2,value\n";
    for (int a1 = 1; a1 <= U.a_max(); ++a1)
        for (int a2 = 1; a2 <= U.a_max(); ++a2)
            out += std::to_string(a1) + "," + std::to_string(a2) + "," + format_double(U(a1, a2)) + "\n";
    return out;
}

inline json to_json(const SolverOptions& options) {
    return {{"epsilon", options.epsilon},
            {"max_iter", options.max_iter},
            {"ref_state", to_json(options.ref_state)},
            {"tie_tol", options.tie_tol}};
}

inline json to_json(const StructureReport& r) {
    json mono = json::array();
    for (const auto& v : r.monotone_violations)
        mono.push_back({{"lower", to_json(v.lower)}, {"higher", to_json(v.higher)}, {"excess", v.excess}});
    json older = json::array();
    for (const auto& s : r.serve_older_violations) older.push_back(to_json(s));
    json dv = json::array();
    for (const auto& [m, d] : r.delta_violations) dv.push_back({{"m", m}, {"d", d}});
    json thresholds = json::object();
    for (const auto& [m, d] : r.lateral_thresholds)
        thresholds[std::to_string(m)] = d ? json(*d) : json("no_switch");
    json mismatches = json::array();
    for (const auto& s : r.structure_mismatches) mismatches.push_back(to_json(s));

    return {{"params", to_json(r.params)},
            {"bellman_residual", r.bellman_residual},
            {"converged", to_string(r.converged)},
            {"monotone", {{"status", to_string(r.monotone)}, {"violations", std::move(mono)}}},
            {"symmetric", {{"status", to_string(r.symmetric)}, {"max_asymmetry", r.max_asymmetry}}},
            {"serve_older_holds", {{"status", to_string(r.serve_older_holds)}, {"violations", std::move(older)}}},
            {"delta_monotone", {{"status", to_string(r.delta_monotone)}, {"violations", std::move(dv)}}},
            {"delta_closed_form",
             {{"status", to_string(r.delta_closed_form)}, {"max_error", r.delta_closed_form_error}}},
            {"activation", {{"status", to_string(r.activation)}, {"note", r.activation_note}}},
            {"activation_age", to_json(r.activation_age)},
            {"lateral_thresholds", std::move(thresholds)},
            {"corollary_bound", to_json(r.corollary_bound)},
            {"corollary_holds", to_string(r.corollary_holds)},
            {"policy_structure", {{"status", to_string(r.policy_structure)}, {"mismatches", std::move(mismatches)}}},
            {"all_applicable_pass", r.all_applicable_pass()}};
}

inline json to_json(const SimResult& r, const std::string& policy, const ModelParams& params) {
    return {{"policy", policy},
            {"params", to_json(params)},
            {"avg_cost", r.avg_cost},
            {"std_error", r.std_error},
            {"horizon", r.horizon},
            {"warmup", r.warmup},
            {"seed", r.seed},
            {"action_frequencies",
             {{"idle", r.action_frequencies[0]}, {"tx1", r.action_frequencies[1]}, {"tx2", r.action_frequencies[2]}}}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    double axis_value = 0.0;
    std::string policy;
    double avg_cost = 0.0;
    double std_error = 0.0;
    std::string status = "ok";

    bool operator==(const SweepRow& other) const {
        auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
        return same(axis_value, other.axis_value) && policy == other.policy && same(avg_cost, other.avg_cost) &&
               same(std_error, other.std_error) && status == other.status;
    }
};

struct SweepResult {
    SweepAxis axis = SweepAxis::P;
    std::vector<SweepRow> rows;

    bool operator==(const SweepResult&) const = default;

    /// Row for (value, policy); nullptr if absent.
    const SweepRow* find(double value, const std::string& policy) const {
        for (const auto& row : rows)
            if (row.axis_value == value && row.policy == policy) return &row;
        return nullptr;
    }
};

namespace detail {

inline std::string sanitize_status(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return text;
}

} // namespace detail

/// Evaluates every requested policy at every axis value, re-solving the
/// optimal policy per point. A failing point yields error rows and the sweep
/// continues. Rows are ordered by (axis value, policy name).
inline SweepResult run_sweep(const SweepSpec& spec) {
    validate(spec);
    SweepResult result;
    result.axis = spec.axis;
    for (double value : spec.values) {
        const ModelParams params = with_axis(spec.base, spec.axis, value);
        std::optional<PolicyTable> optimal;
        std::string point_error;
        try {
            validate(params);
            if (std::find(spec.policies.begin(), spec.policies.end(), "aoi_optimal") != spec.policies.end() ||
                std::find(spec.policies.begin(), spec.policies.end(), "optimal") != spec.policies.end())
                optimal = rvi_solve(params, spec.solver).policy;
        } catch (const Error& e) {
            point_error = e.what();
        }
        for (const auto& name : spec.policies) {
            SweepRow row;
            row.axis_value = value;
            row.policy = canonical_policy(name);
            try {
                if (!point_error.empty()) throw Error(point_error);
                const PolicySpec policy = make_policy(name, params, spec.maft_threshold, optimal ? &*optimal : nullptr);
                if (spec.evaluation.simulate) {
                    const auto sim = run(policy, params, spec.evaluation.horizon,
                                         default_warmup(spec.evaluation.horizon), spec.evaluation.seed);
                    row.avg_cost = sim.avg_cost;
                    row.std_error = sim.std_error;
                } else {
                    row.avg_cost = evaluate_spec(policy, params);
                }
            } catch (const Error& e) {
                row.status = "error: " + detail::sanitize_status(e.what());
            }
            result.rows.push_back(std::move(row));
        }
    }
    std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.axis_value, a.policy) < std::tie(b.axis_value, b.policy);
    });
    return result;
}

inline constexpr const char* sweep_csv_header = "axis,axis_value,policy,avg_cost,std_error,status";

inline std::string sweep_csv(const SweepResult& result) {
    std::string out = std::string(sweep_csv_header) + "\n";
    for (const auto& row : result.rows)
        out += to_string(result.axis) + "," + format_double(row.axis_value) + "," + row.policy + "," +
               format_double(row.avg_cost) + "," + format_double(row.std_error) + "," + row.status + "\n";
    return out;
}

inline SweepResult parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != sweep_csv_header) throw InvalidParams("csv", "unexpected header");
    SweepResult result;
    bool axis_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (int k = 0; k < 5; ++k) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos) throw InvalidParams("csv", "too few columns: " + line);
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        cells.push_back(line.substr(start));
        const SweepAxis axis = parse_axis(cells[0]);
        if (axis_seen && axis != result.axis) throw InvalidParams("csv", "mixed axes in one file");
        result.axis = axis;
        axis_seen = true;
        result.rows.push_back({parse_double(cells[1]), cells[2], parse_double(cells[3]), parse_double(cells[4]), cells[5]});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Commands. Each returns a process exit code and reports problems on `log`.

inline std::filesystem::path output_or(const Config& config, const char* fallback) {
    return config.output ? std::filesystem::path(*config.output) : std::filesystem::path(fallback);
}

/// Writes policy.json, policy.txt, values.csv and solve.json into the output
/// directory.
inline int cmd_solve(const Config& config, std::ostream& log) {
    try {
        validate(config);
        const SolveResult result = rvi_solve(config.params, config.solver);
        const auto dir = output_or(config, "solve_out");
        std::filesystem::create_directories(dir);
        write_json(dir / "policy.json", to_json(result.policy));
        write_text(dir / "policy.txt", policy_grid_text(result.policy));
        write_text(dir / "values.csv", values_csv(result.u_table));
        write_json(dir / "solve.json", {{"params", to_json(config.params)},
                                        {"solver", to_json(config.solver)},
                                        {"rho_star", result.rho_star},
                                        {"iterations", result.iterations},
                                        {"final_residual", result.final_residual},
                                        {"final_span", result.final_span}});
        log << "rho* = " << format_double(result.rho_star) << " after " << result.iterations << " iterations\n";
        return exit_success;
    } catch (const NonConvergence& e) {
        log << "error: " << e.what() << "\n";
        return exit_nonconvergence;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

/// Solves, classifies the structure and writes the JSON report. Exit code 3
/// if any applicable check fails.
inline int cmd_analyze(const Config& config, std::ostream& log) {
    try {
        validate(config);
        const SolveResult result = rvi_solve(config.params, config.solver);
        const StructureReport report = classify_structure(result.policy, result.u_table, config.params);
        json doc = to_json(report);
        doc["rho_star"] = result.rho_star;
        doc["iterations"] = result.iterations;
        write_json(output_or(config, "report.json"), doc);
        if (!report.all_applicable_pass()) {
            log << "structure check failed\n";
            return exit_structure_failure;
        }
        return exit_success;
    } catch (const NonConvergence& e) {
        log << "error: " << e.what() << "\n";
        return exit_nonconvergence;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

inline int cmd_simulate(const Config& config, std::ostream& log) {
    try {
        validate(config);
        const auto& sim = config.simulation;
        std::optional<PolicyTable> optimal;
        if (canonical_policy(sim.policy) == "aoi_optimal") optimal = rvi_solve(config.params, config.solver).policy;
        const PolicySpec policy =
            make_policy(sim.policy, config.params, sim.maft_threshold, optimal ? &*optimal : nullptr);
        const long warmup = sim.warmup.value_or(default_warmup(sim.horizon));
        const SimResult result = run(policy, config.params, sim.horizon, warmup, sim.seed, sim.batches);
        write_json(output_or(config, "simulation.json"), to_json(result, policy_name(policy), config.params));
        return exit_success;
    } catch (const NonConvergence& e) {
        log << "error: " << e.what() << "\n";
        return exit_nonconvergence;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

/// Sweep spec built from a config: base params and solver come from the
/// config's params and solver sections.
inline SweepSpec sweep_spec(const Config& config) {
    SweepSpec spec = config.sweep;
    spec.base = config.params;
    spec.solver = config.solver;
    spec.output_path = output_or(config, "sweep.csv").string();
    return spec;
}

inline int cmd_sweep(const Config& config, std::ostream& log) {
    try {
        validate(config);
        const SweepSpec spec = sweep_spec(config);
        const SweepResult result = run_sweep(spec);
        write_text(spec.output_path, sweep_csv(result));
        return exit_success;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

} // namespace gossip_aoi
