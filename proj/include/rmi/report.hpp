#pragma once

// Reporting structures for sweep runs and their JSON / text emission.
// JSON uses the shortest round-trip representation for doubles, so a
// re-parsed report reproduces every residual exactly.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmi/common.hpp"

namespace rmi {

/// Fixed-or-random specification for a complex sweep parameter.
struct ParamSpec {
    bool random = true;
    cplx value{0.0, 0.0};
};

struct SweepConfig {
    std::vector<std::string> identities; // empty = full suite in default order
    std::vector<int> m_list;             // empty = per-identity default
    std::vector<int> n_list;             // empty = per-identity default
    std::vector<int> k_list;             // empty = all k in 1..N
    ParamSpec tau, hbar, eta;
    int trials = 1;
    double tolerance = -1.0; // negative = per-identity default
    std::uint64_t seed = 1;
    std::size_t dimension_cap = 4096;
    int workers = 1;
    bool timings = false;
};

struct IdentityReport {
    std::string identity;
    int M = 0;
    int N = 0;
    int k = 0;
    int trial = 0;
    cplx tau{0.0, 0.0};
    cplx hbar{0.0, 0.0};
    cplx eta{0.0, 0.0};
    bool eta_used = false;
    std::uint64_t seed = 0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double operand_norm = 0.0;
    double tolerance = 0.0;
    std::string verdict; // pass | fail | error
    std::string note;
    std::vector<cplx> xs, ys; // sampled points behind the reported residual
    double wall_ms = 0.0;
};

struct RunReport {
    SweepConfig config;
    std::vector<IdentityReport> checks;
    int passed = 0;
    int failed = 0;
    int errored = 0;
    double wall_ms_total = 0.0;

    bool all_pass() const { return failed == 0 && errored == 0; }
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json json_complex(cplx v) { return ordered_json::array({v.real(), v.imag()}); }

inline ordered_json json_points(const std::vector<cplx>& pts) {
    ordered_json arr = ordered_json::array();
    for (cplx p : pts) arr.push_back(json_complex(p));
    return arr;
}

inline ordered_json json_param(const ParamSpec& p) {
    if (p.random) return "random";
    return json_complex(p.value);
}

} // namespace detail

inline nlohmann::ordered_json report_to_json(const RunReport& report, bool timings) {
    using detail::ordered_json;
    ordered_json j;
    ordered_json cfg;
    cfg["identities"] = report.config.identities;
    cfg["m"] = report.config.m_list;
    cfg["n"] = report.config.n_list;
    cfg["k"] = report.config.k_list.empty() ? ordered_json("all")
                                            : ordered_json(report.config.k_list);
    cfg["tau"] = detail::json_param(report.config.tau);
    cfg["hbar"] = detail::json_param(report.config.hbar);
    cfg["eta"] = detail::json_param(report.config.eta);
    cfg["trials"] = report.config.trials;
    cfg["tolerance"] = report.config.tolerance < 0.0
                           ? ordered_json("default")
                           : ordered_json(report.config.tolerance);
    cfg["seed"] = report.config.seed;
    cfg["dimension_cap"] = report.config.dimension_cap;
    cfg["workers"] = report.config.workers;
    j["config"] = std::move(cfg);

    ordered_json checks = ordered_json::array();
    for (const IdentityReport& c : report.checks) {
        ordered_json e;
        e["identity"] = c.identity;
        ordered_json params;
        params["M"] = c.M;
        params["N"] = c.N;
        params["k"] = c.k;
        params["trial"] = c.trial;
        params["tau"] = detail::json_complex(c.tau);
        params["hbar"] = detail::json_complex(c.hbar);
        if (c.eta_used) params["eta"] = detail::json_complex(c.eta);
        e["params"] = std::move(params);
        e["abs_residual"] = c.abs_residual;
        e["rel_residual"] = c.rel_residual;
        e["operand_norm"] = c.operand_norm;
        e["tolerance"] = c.tolerance;
        e["verdict"] = c.verdict;
        if (!c.note.empty()) e["note"] = c.note;
        e["seed"] = c.seed;
        ordered_json pts;
        pts["xs"] = detail::json_points(c.xs);
        pts["ys"] = detail::json_points(c.ys);
        e["points"] = std::move(pts);
        if (timings) e["wall_ms"] = c.wall_ms;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);

    ordered_json summary;
    summary["pass"] = report.passed;
    summary["fail"] = report.failed;
    summary["error"] = report.errored;
    if (timings) summary["wall_ms_total"] = report.wall_ms_total;
    j["summary"] = std::move(summary);
    return j;
}

inline void emit_json(const RunReport& report, std::ostream& os, bool timings) {
    os << report_to_json(report, timings).dump(2) << "\n";
}

inline void emit_text(const RunReport& report, std::ostream& os) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-20s %2s %2s %2s %5s  %-12s %-9s %s\n", "identity",
                  "M", "N", "k", "trial", "rel_residual", "verdict", "wall_ms");
    os << line;
    for (const IdentityReport& c : report.checks) {
        std::snprintf(line, sizeof(line), "%-20s %2d %2d %2d %5d  %-12.3e %-9s %.1f\n",
                      c.identity.c_str(), c.M, c.N, c.k, c.trial, c.rel_residual,
                      c.verdict.c_str(), c.wall_ms);
        os << line;
        if (!c.note.empty()) os << "    note: " << c.note << "\n";
    }
    std::snprintf(line, sizeof(line), "summary: %d pass, %d fail, %d error (%.0f ms)\n",
                  report.passed, report.failed, report.errored, report.wall_ms_total);
    os << line;
}

} // namespace rmi
