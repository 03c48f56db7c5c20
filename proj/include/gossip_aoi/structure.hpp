#pragma once

// Numerical certification of the structure of a solved instance:
// monotonicity and symmetry of U, serve-the-older-receiver, monotonicity of
// the transmit advantage in the age difference, the diagonal activation age
// and the lateral thresholds.
//
// States are parameterized as (m, m+d): m is the smaller age, d >= 0 the
// difference. Checks that only make sense for symmetric channels with more
// reliable gossip (pv > p) raise or report NotApplicable elsewhere.

#include "gossip_aoi/errors.hpp"
#include "gossip_aoi/model.hpp"
#include "gossip_aoi/rvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gossip_aoi {

inline constexpr double value_tolerance = 1e-7;   ///< monotonicity / symmetry of U
inline constexpr double strict_tolerance = 1e-10; ///< floor for "strictly increasing"
inline constexpr double closed_form_tolerance = 1e-9;
inline constexpr double converged_residual = 1e-6;

/// Symmetric channels where gossip beats the direct link.
inline bool in_structure_regime(const ModelParams& params) {
    return symmetric(params) && params.pv1 > params.p1;
}

namespace detail {

inline void require_regime(const ModelParams& params, const char* what) {
    if (!in_structure_regime(params))
        throw NotApplicable(std::string(what) + " requires p1 == p2, pv1 == pv2 and pv > p");
}

inline double q_tie_slack(double q) { return 1e-8 * (std::abs(q) + 1.0); }

} // namespace detail

struct MonotonicityViolation {
    AgeState lower;  ///< state whose value is too large
    AgeState higher; ///< neighbour one age step up
    double excess = 0.0;
};

struct MonotonicityResult {
    bool holds = true;
    std::vector<MonotonicityViolation> violations;
};

/// U(a1,a2) <= U(a1+1,a2) and U(a1,a2) <= U(a1,a2+1) up to `tol`.
inline MonotonicityResult check_monotonicity(const ValueTable& U, double tol = value_tolerance) {
    MonotonicityResult result;
    const int n = U.a_max();
    for (int a1 = 1; a1 <= n; ++a1) {
        for (int a2 = 1; a2 <= n; ++a2) {
            const double here = U(a1, a2);
            if (a1 < n && here > U(a1 + 1, a2) + tol)
                result.violations.push_back({{a1, a2}, {a1 + 1, a2}, here - U(a1 + 1, a2)});
            if (a2 < n && here > U(a1, a2 + 1) + tol)
                result.violations.push_back({{a1, a2}, {a1, a2 + 1}, here - U(a1, a2 + 1)});
        }
    }
    result.holds = result.violations.empty();
    return result;
}

struct SymmetryResult {
    bool holds = true;
    double max_asymmetry = 0.0;
};

/// max |U(a1,a2) - U(a2,a1)| <= tol. Only defined for symmetric parameters.
inline SymmetryResult check_symmetry(const ValueTable& U, double tol = value_tolerance) {
    if (!symmetric(U.params)) throw NotApplicable("symmetry check requires p1 == p2 and pv1 == pv2");
    SymmetryResult result;
    const int n = U.a_max();
    for (int a1 = 1; a1 <= n; ++a1)
        for (int a2 = a1 + 1; a2 <= n; ++a2)
            result.max_asymmetry = std::max(result.max_asymmetry, std::abs(U(a1, a2) - U(a2, a1)));
    result.holds = result.max_asymmetry <= tol;
    return result;
}

struct ServeOlderResult {
    bool holds = true;
    std::vector<AgeState> violations;
};

/// Off the diagonal, serving the fresher receiver is never better:
/// a1 < a2 implies Q(s,1) > Q(s,2) - tol, mirrored for a1 > a2. On the
/// diagonal the two transmit actions must tie.
inline ServeOlderResult check_serve_older(const ValueTable& U, const ModelParams& params) {
    detail::require_regime(params, "serve-older check");
    ServeOlderResult result;
    const int n = params.a_max;
    for (int a1 = 1; a1 <= n; ++a1) {
        for (int a2 = 1; a2 <= n; ++a2) {
            const AgeState s{a1, a2};
            const double q1 = q_value(s, Action::Tx1, U, params);
            const double q2 = q_value(s, Action::Tx2, U, params);
            const double slack = detail::q_tie_slack(std::min(q1, q2));
            bool ok = true;
            if (a1 < a2)
                ok = q1 > q2 - slack;
            else if (a1 > a2)
                ok = q2 > q1 - slack;
            else
                ok = std::abs(q1 - q2) <= slack;
            if (!ok) result.violations.push_back(s);
        }
    }
    result.holds = result.violations.empty();
    return result;
}

/// Advantage of transmitting to the older receiver over idling at (m, m+d):
/// Q(s,Tx2) - Q(s,Idle). Negative means transmitting is better.
inline double delta(int m, int d, const ValueTable& U, const ModelParams& params) {
    if (!symmetric(params)) throw NotApplicable("delta requires symmetric channels");
    if (m < 1 || d < 0 || m + d > params.a_max)
        throw OutOfGrid("state (" + std::to_string(m) + "," + std::to_string(m + d) + ") is off the grid");
    const AgeState s{m, m + d};
    return q_value(s, Action::Tx2, U, params) - q_value(s, Action::Idle, U, params);
}

/// Expanded algebraic form of `delta`, valid only where no age saturates
/// (m + d + 1 <= a_max).
inline double delta_closed_form(int m, int d, const ValueTable& U, const ModelParams& params) {
    if (!symmetric(params)) throw NotApplicable("delta requires symmetric channels");
    if (m < 1 || d < 0 || m + d + 1 > params.a_max)
        throw OutOfGrid("closed form needs m + d + 1 <= a_max");
    const double p = params.p1, pv = params.pv1;
    return (pv - p) * d + (pv - p) * U(m + 1, m + d + 1) + params.c_tx - m * p + p * U(m + 1, 1) -
           pv * U(m + 1, m + 1);
}

struct DeltaMonotoneResult {
    bool holds = true;
    std::vector<std::pair<int, int>> violations; ///< (m, d) where delta(m,d+1) - delta(m,d) <= floor
};

/// delta(m, d) strictly increasing in d wherever m + d + 2 <= a_max.
inline DeltaMonotoneResult check_delta_monotone(const ValueTable& U, const ModelParams& params) {
    detail::require_regime(params, "delta monotonicity check");
    DeltaMonotoneResult result;
    const int n = params.a_max;
    for (int m = 1; m + 2 <= n; ++m) {
        double previous = delta(m, 0, U, params);
        for (int d = 0; m + d + 2 <= n; ++d) {
            const double current = delta(m, d + 1, U, params);
            if (!(current - previous > strict_tolerance)) result.violations.push_back({m, d});
            previous = current;
        }
    }
    result.holds = result.violations.empty();
    return result;
}

/// Largest d scanned for lateral thresholds at minimum age m.
inline int lateral_scan_limit(int m, int a_max) { return a_max - m - 1; }

/// Smallest d > 0 with delta(m, d) > 0, or nullopt if transmitting stays
/// better up to the scan limit. Throws NotActive when the diagonal at m idles.
inline std::optional<int> lateral_threshold(int m, const ValueTable& U, const ModelParams& params) {
    detail::require_regime(params, "lateral threshold");
    if (m < 1 || m > params.a_max) throw OutOfGrid("minimum age off the grid");
    if (delta(m, 0, U, params) >= 0.0)
        throw NotActive("transmission is not optimal at (" + std::to_string(m) + "," + std::to_string(m) + ")");
    for (int d = 1; d <= lateral_scan_limit(m, params.a_max); ++d)
        if (delta(m, d, U, params) > 0.0) return d;
    return std::nullopt;
}

/// Same threshold read off a policy grid: smallest d > 0 at which (m, m+d)
/// idles.
inline std::optional<int> policy_lateral_threshold(int m, const PolicyTable& policy) {
    for (int d = 1; d <= lateral_scan_limit(m, policy.a_max); ++d)
        if (policy(m, m + d) == Action::Idle) return d;
    return std::nullopt;
}

/// Diagonal activation test C_tx < p (m + U(m+1,m+1) - U(m+1,1)).
inline bool diagonal_transmits(int m, const ValueTable& U, const ModelParams& params) {
    return params.c_tx < params.p1 * (m + U(m + 1, m + 1) - U(m + 1, 1));
}

/// Smallest diagonal age m in [1, a_max-1] at which transmitting is optimal,
/// derived both from the activation inequality and from the policy grid.
/// Throws Inconsistent if the two disagree or if the diagonal stops
/// transmitting above the activation age.
inline std::optional<int> activation_age(const PolicyTable& policy, const ValueTable& U, const ModelParams& params) {
    detail::require_regime(params, "activation age");
    const int top = params.a_max - 1;
    std::optional<int> by_inequality, by_policy;
    for (int m = 1; m <= top && !by_inequality; ++m)
        if (diagonal_transmits(m, U, params)) by_inequality = m;
    for (int m = 1; m <= top && !by_policy; ++m)
        if (policy(m, m) != Action::Idle) by_policy = m;
    if (by_inequality != by_policy) {
        auto show = [](std::optional<int> v) { return v ? std::to_string(*v) : std::string("none"); };
        throw Inconsistent("activation age from inequality (" + show(by_inequality) + ") differs from policy (" +
                           show(by_policy) + ")");
    }
    if (by_policy) {
        for (int m = *by_policy; m <= top; ++m)
            if (policy(m, m) == Action::Idle)
                throw Inconsistent("diagonal idles at m=" + std::to_string(m) + " above the activation age");
    }
    return by_policy;
}

/// ceil(c_tx / p). The ratio is nudged down by a relative 1e-12 so that an
/// exact integer quotient like 1/0.2 is not pushed up by rounding.
inline int corollary_bound(const ModelParams& params) {
    const double p = params.p1;
    if (p <= 0.0) throw DivisionByZero("activation bound needs p > 0");
    const double ratio = params.c_tx / p;
    return static_cast<int>(std::ceil(ratio - 1e-12 * std::max(1.0, ratio)));
}

enum class CheckStatus { Pass, Fail, NotApplicable, Inconsistent };

inline const char* to_string(CheckStatus status) {
    switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not_applicable";
    case CheckStatus::Inconsistent: return "inconsistent";
    }
    return "unknown";
}

struct StructureReport {
    ModelParams params;

    double bellman_residual = 0.0;
    CheckStatus converged = CheckStatus::Pass;

    CheckStatus monotone = CheckStatus::Pass;
    std::vector<MonotonicityViolation> monotone_violations;

    CheckStatus symmetric = CheckStatus::NotApplicable;
    double max_asymmetry = 0.0;

    CheckStatus serve_older_holds = CheckStatus::NotApplicable;
    std::vector<AgeState> serve_older_violations;

    CheckStatus delta_monotone = CheckStatus::NotApplicable;
    std::vector<std::pair<int, int>> delta_violations;

    CheckStatus delta_closed_form = CheckStatus::NotApplicable;
    double delta_closed_form_error = 0.0;

    CheckStatus activation = CheckStatus::NotApplicable;
    std::optional<int> activation_age;
    std::string activation_note;

    /// m -> d_l(m) for every active m; nullopt means no switch within the grid.
    std::vector<std::pair<int, std::optional<int>>> lateral_thresholds;

    std::optional<int> corollary_bound;
    CheckStatus corollary_holds = CheckStatus::NotApplicable;

    CheckStatus policy_structure = CheckStatus::NotApplicable;
    std::vector<AgeState> structure_mismatches;

    /// True when no applicable check failed or was inconsistent.
    bool all_applicable_pass() const {
        for (CheckStatus s : {converged, monotone, symmetric, serve_older_holds, delta_monotone, delta_closed_form,
                              activation, corollary_holds, policy_structure})
            if (s == CheckStatus::Fail || s == CheckStatus::Inconsistent) return false;
        return true;
    }

    std::optional<int> threshold_at(int m) const {
        for (const auto& [mm, d] : lateral_thresholds)
            if (mm == m) return d;
        return std::nullopt;
    }
};

namespace detail {

inline CheckStatus pass_if(bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; }

/// Expected action at (m, m+d) under the threshold template.
inline Action template_action(int m, int d, std::optional<int> activation,
                              const std::vector<std::pair<int, std::optional<int>>>& thresholds) {
    if (!activation || m < *activation) return Action::Idle;
    if (d == 0) return Action::Tx1;
    for (const auto& [mm, dl] : thresholds)
        if (mm == m) return (!dl || d < *dl) ? Action::Tx2 : Action::Idle;
    return Action::Idle;
}

} // namespace detail

/// Runs every check applicable to `params` and compares the policy grid with
/// the threshold template built from the activation age and the lateral
/// thresholds. A state matches when the expected action is in its tie set.
/// Never throws for a failed check; failures are reported.
inline StructureReport classify_structure(const PolicyTable& policy, const ValueTable& U, const ModelParams& params) {
    StructureReport report;
    report.params = params;

    // Structural results presume a fixed point; measure how far U is from one.
    const AgeState start{1, 1};
    double rho = std::numeric_limits<double>::infinity();
    for (Action u : all_actions) rho = std::min(rho, q_value(start, u, U, params));
    rho -= U.at(start);
    report.bellman_residual = bellman_residual(U, rho);
    report.converged = report.bellman_residual <= converged_residual ? CheckStatus::Pass : CheckStatus::Inconsistent;

    const auto mono = check_monotonicity(U);
    report.monotone = detail::pass_if(mono.holds);
    report.monotone_violations = mono.violations;

    if (symmetric(params)) {
        const auto sym = check_symmetry(U);
        report.symmetric = detail::pass_if(sym.holds);
        report.max_asymmetry = sym.max_asymmetry;
    }

    if (params.p1 > 0.0) report.corollary_bound = corollary_bound(params);

    if (!in_structure_regime(params)) return report;

    const auto older = check_serve_older(U, params);
    report.serve_older_holds = detail::pass_if(older.holds);
    report.serve_older_violations = older.violations;

    const auto dm = check_delta_monotone(U, params);
    report.delta_monotone = detail::pass_if(dm.holds);
    report.delta_violations = dm.violations;

    for (int m = 1; m < params.a_max; ++m)
        for (int d = 0; m + d + 1 <= params.a_max; ++d)
            report.delta_closed_form_error = std::max(
                report.delta_closed_form_error, std::abs(delta(m, d, U, params) - delta_closed_form(m, d, U, params)));
    report.delta_closed_form = detail::pass_if(report.delta_closed_form_error <= closed_form_tolerance);

    try {
        report.activation_age = activation_age(policy, U, params);
        report.activation = CheckStatus::Pass;
    } catch (const Inconsistent& e) {
        report.activation = CheckStatus::Inconsistent;
        report.activation_note = e.what();
    }

    if (report.activation_age) {
        for (int m = *report.activation_age; m < params.a_max; ++m) {
            try {
                report.lateral_thresholds.emplace_back(m, lateral_threshold(m, U, params));
            } catch (const NotActive& e) {
                report.activation = CheckStatus::Inconsistent;
                report.activation_note = e.what();
            }
        }
    }

    // Ages start at 1, so a zero bound still allows activation at m = 1.
    if (report.activation != CheckStatus::Inconsistent && report.corollary_bound)
        report.corollary_holds = detail::pass_if(!report.activation_age ||
                                                 *report.activation_age <= std::max(*report.corollary_bound, 1));

    if (report.activation == CheckStatus::Inconsistent) {
        report.policy_structure = CheckStatus::Inconsistent;
        return report;
    }

    for (int m = 1; m < params.a_max; ++m) {
        for (int d = 0; d <= lateral_scan_limit(m, params.a_max); ++d) {
            const Action expected = detail::template_action(m, d, report.activation_age, report.lateral_thresholds);
            if (!policy.ties_at({m, m + d}).contains(expected)) report.structure_mismatches.push_back({m, m + d});
            if (d > 0 && !policy.ties_at({m + d, m}).contains(swapped(expected)))
                report.structure_mismatches.push_back({m + d, m});
        }
        if (report.activation_age && m >= *report.activation_age &&
            policy_lateral_threshold(m, policy) != report.threshold_at(m))
            report.structure_mismatches.push_back({m, m});
    }
    // The template covers rows below the cap; the rest only needs mirror
    // symmetry up to ties (at the saturated corner Tx1 and Tx2 coincide).
    for (int a1 = 1; a1 <= params.a_max; ++a1)
        for (int a2 = a1 + 1; a2 <= params.a_max; ++a2)
            if (!policy.ties_at({a2, a1}).contains(swapped(policy(a1, a2))))
                report.structure_mismatches.push_back({a2, a1});
    std::sort(report.structure_mismatches.begin(), report.structure_mismatches.end());
    report.structure_mismatches.erase(std::unique(report.structure_mismatches.begin(), report.structure_mismatches.end()),
                                      report.structure_mismatches.end());
    report.policy_structure = detail::pass_if(report.structure_mismatches.empty());
    return report;
}

} // namespace gossip_aoi
