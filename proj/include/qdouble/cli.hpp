// Copyright 2026 The qdouble Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QDOUBLE_CLI_HPP
#define QDOUBLE_CLI_HPP

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qdouble/qdouble.hpp"

namespace qdouble {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitPrecondition = 1, kExitTolerance = 2 };

/// Everything a command needs. workers, output and pretty never reach the report.
struct RunConfig {
    std::string command;
    std::vector<std::string> groups;
    std::vector<std::string> cells;
    std::string protocol = "solvable";
    std::string mode = "postselect";
    int seeds = 1;
    bool stabilizers = true;
    bool oracle = true;
    bool gsd = false;
    std::string suite = "identities";
    std::vector<std::string> identities;
    std::vector<std::string> queries;
    double tolerance = 0.0;

    int workers = 1;
    std::string output = "-";
    bool pretty = false;

    double effective_tolerance() const {
        if (tolerance > 0) {
            return tolerance;
        }
        return command == "verify" && suite == "identities" ? 1e-10 : 1e-9;
    }

    /// Report echo of the fields that determine the result.
    nlohmann::json to_json() const {
        return {
            {"command", command}, {"groups", groups},         {"cells", cells},       {"protocol", protocol},
            {"mode", mode},       {"seeds", seeds},           {"stabilizers", stabilizers},
            {"oracle", oracle},   {"gsd", gsd},               {"suite", suite},       {"identities", identities},
            {"queries", queries}, {"tolerance", effective_tolerance()},
        };
    }

    static RunConfig from_json(const nlohmann::json &j) {
        static const std::set<std::string> known = {
            "command", "groups", "cells", "protocol", "mode", "seeds", "stabilizers", "oracle", "gsd", "suite",
            "identities", "queries", "tolerance", "workers", "output", "pretty",
        };
        if (!j.is_object()) {
            throw std::invalid_argument("config must be a JSON object");
        }
        for (const auto &[key, value] : j.items()) {
            if (!known.count(key)) {
                throw std::invalid_argument("unknown config field '" + key + "'");
            }
        }
        RunConfig c;
        auto get = [&](const char *key, auto &dst) {
            if (j.contains(key)) {
                j.at(key).get_to(dst);
            }
        };
        get("command", c.command);
        get("groups", c.groups);
        get("cells", c.cells);
        get("protocol", c.protocol);
        get("mode", c.mode);
        get("seeds", c.seeds);
        get("stabilizers", c.stabilizers);
        get("oracle", c.oracle);
        get("gsd", c.gsd);
        get("suite", c.suite);
        get("identities", c.identities);
        get("queries", c.queries);
        get("tolerance", c.tolerance);
        get("workers", c.workers);
        get("output", c.output);
        get("pretty", c.pretty);
        return c;
    }
};

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::string summary;
};

/// "postselect", "sample:SEED" or "forced:FILE" (a JSON object label -> outcome).
inline KwMode parse_mode(const std::string &spec) {
    if (spec == "postselect") {
        return KwMode::postselect();
    }
    if (spec.rfind("sample:", 0) == 0) {
        std::string digits = spec.substr(7);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("sample mode needs a non-negative integer seed, got '" + digits + "'");
        }
        return KwMode::sample(std::stoull(digits));
    }
    if (spec.rfind("forced:", 0) == 0) {
        std::ifstream in(spec.substr(7));
        if (!in) {
            throw std::invalid_argument("cannot read forced-outcome file " + spec.substr(7));
        }
        return KwMode::forced_outcomes(nlohmann::json::parse(in).get<std::map<std::string, int>>());
    }
    throw std::invalid_argument("unknown mode '" + spec + "'");
}

namespace detail {

/// fn(k) for k in [0, n) on up to `workers` threads; results keep index order.
template <typename T, typename F>
std::vector<T> parallel_map(int n, int workers, F fn) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int k = next++; k < n; k = next++) {
            try {
                out[k] = fn(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    int w = std::max(1, std::min(workers, n));
    std::vector<std::thread> pool;
    for (int t = 1; t < w; t++) {
        pool.emplace_back(work);
    }
    work();
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

inline std::string fmt(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}

inline FactorSystem parented(const GroupRef &g, const Subgroup &n) {
    FactorSystem fs = factor_system_of(*g, n);
    fs.parent = g;
    return fs;
}

inline ProtocolTranscript run_protocol(
    const std::string &protocol, const GroupRef &g, const Cellulation &cell, const KwMode &mode) {
    if (protocol == "abelian") {
        return prepare_abelian_double(g, cell, mode);
    }
    if (protocol == "nil2") {
        return prepare_nil2_double(parented(g, center(*g)), cell, mode);
    }
    if (protocol == "metabelian") {
        return prepare_metabelian_double(parented(g, commutator_subgroup(*g)), cell, mode);
    }
    if (protocol == "solvable") {
        return prepare_solvable_double(g, cell, mode);
    }
    throw std::invalid_argument("unknown protocol '" + protocol + "' (abelian | nil2 | metabelian | solvable)");
}

inline void require_single(const std::vector<std::string> &v, const char *what) {
    if (v.size() != 1) {
        throw std::invalid_argument(std::string("prepare needs exactly one ") + what);
    }
}

}  // namespace detail

inline CommandResult cmd_prepare(const RunConfig &cfg) {
    detail::require_single(cfg.groups, "group");
    std::vector<std::string> cells = cfg.cells.empty() ? std::vector<std::string>{"hexagon"} : cfg.cells;
    detail::require_single(cells, "cellulation");
    if (cfg.seeds < 1) {
        throw std::invalid_argument("seeds must be at least 1");
    }
    GroupRef g = share(parse_group_spec(cfg.groups[0]));
    Cellulation cell = parse_cell_spec(cells[0]);
    KwMode base = parse_mode(cfg.mode);
    int runs = base.kind == KwMode::Kind::sample ? cfg.seeds : 1;
    double tol = cfg.effective_tolerance();

    std::optional<QuditRegister> oracle;
    std::string oracle_note;
    if (cfg.oracle) {
        try {
            oracle = oracle_double_state(g, cell);
        } catch (const BudgetExceeded &e) {
            oracle_note = e.what();
        }
    }

    auto one = [&](int k) {
        KwMode mode = base;
        if (mode.kind == KwMode::Kind::sample) {
            mode.seed = base.seed + static_cast<std::uint64_t>(k);
        }
        ProtocolTranscript t = detail::run_protocol(cfg.protocol, g, cell, mode);
        if (oracle) {
            t.fidelity_vs_oracle = fidelity(t.state, *oracle);
        }
        nlohmann::json run = {{"transcript", t.to_json()}};
        if (mode.kind == KwMode::Kind::sample) {
            run["seed"] = mode.seed;
        }
        if (cfg.stabilizers) {
            StabilizerReport rep = stabilizer_report(t.state, t.edge_ids, *g, cell);
            rep.fidelity = t.fidelity_vs_oracle;
            run["stabilizers"] = rep.to_json();
        }
        if (t.pre_correction) {
            FactorSystem fs = detail::parented(g, center(*g));
            std::vector<int> ids;
            for (int e = 0; e < cell.num_edges(); e++) {
                ids.push_back(t.pre_correction->find("e" + std::to_string(e)));
            }
            run["syndrome_mismatch"] = nil2_syndrome_mismatch(*t.pre_correction, ids, fs, cell, t.rounds[0].outcomes);
        }
        return run;
    };
    std::vector<nlohmann::json> results = detail::parallel_map<nlohmann::json>(runs, cfg.workers, one);

    double min_stab = 1.0, min_fid = 1.0, max_syn = 0.0;
    std::vector<int> shots;
    for (const nlohmann::json &r : results) {
        shots.push_back(r["transcript"]["shots"].get<int>());
        if (r.contains("stabilizers")) {
            min_stab = std::min(min_stab, r["stabilizers"]["min_expectation"].get<double>());
        }
        if (r["transcript"].contains("fidelity_vs_oracle")) {
            min_fid = std::min(min_fid, r["transcript"]["fidelity_vs_oracle"].get<double>());
        }
        if (r.contains("syndrome_mismatch")) {
            max_syn = std::max(max_syn, r["syndrome_mismatch"].get<double>());
        }
    }
    bool passed = min_stab >= 1 - tol && (!oracle || min_fid >= 1 - tol) && max_syn <= tol;
    nlohmann::json summary = {{"runs", runs}, {"shots", shots}, {"passed", passed}};
    if (cfg.stabilizers) {
        summary["min_stabilizer"] = min_stab;
    }
    if (oracle) {
        summary["min_fidelity_vs_oracle"] = min_fid;
    } else if (cfg.oracle) {
        summary["oracle_skipped"] = oracle_note;
    }
    if (cfg.protocol == "nil2") {
        summary["max_syndrome_mismatch"] = max_syn;
    }
    if (cfg.gsd) {
        try {
            summary["gsd"] = ground_state_degeneracy(*g, cell);
        } catch (const BudgetExceeded &e) {
            summary["gsd_skipped"] = e.what();
        }
    }

    CommandResult out;
    out.report = {
        {"schema_version", kSchemaVersion}, {"config", cfg.to_json()}, {"runs", results}, {"summary", summary}};
    out.exit_code = passed ? kExitOk : kExitTolerance;
    std::ostringstream s;
    s << cfg.protocol << " " << g->name() << " on " << cells[0] << ": " << runs << " run(s), shots";
    for (int x : shots) {
        s << " " << x;
    }
    if (cfg.stabilizers) {
        s << ", min stabilizer " << detail::fmt(min_stab);
    }
    if (oracle) {
        s << ", min fidelity " << detail::fmt(min_fid);
    }
    s << (passed ? ", PASS" : ", FAIL") << "\n";
    out.summary = s.str();
    return out;
}

inline CommandResult cmd_verify(const RunConfig &cfg) {
    std::vector<std::string> groups = cfg.groups.empty() ? catalog_names() : cfg.groups;
    std::vector<std::string> cells = cfg.cells;
    if (cells.empty()) {
        cells = cfg.suite == "identities" ? std::vector<std::string>{"edge", "hexagon"}
                                          : std::vector<std::string>{"hexagon"};
    }
    double tol = cfg.effective_tolerance();
    std::vector<std::pair<std::string, std::string>> jobs;
    for (const std::string &g : groups) {
        for (const std::string &c : cells) {
            jobs.emplace_back(g, c);
        }
    }
    std::vector<GroupRef> resolved;
    for (const std::string &g : groups) {
        resolved.push_back(share(parse_group_spec(g)));
    }
    std::vector<Cellulation> parsed;
    for (const std::string &c : cells) {
        parsed.push_back(parse_cell_spec(c));
    }

    std::vector<nlohmann::json> rows;
    bool passed = true;
    int failures = 0;
    std::ostringstream s;
    if (cfg.suite == "identities") {
        std::vector<std::string> ids = cfg.identities.empty() ? identity_ids() : cfg.identities;
        for (const std::string &id : ids) {
            if (std::find(identity_ids().begin(), identity_ids().end(), id) == identity_ids().end()) {
                throw std::invalid_argument("unknown identity '" + id + "'");
            }
        }
        struct Job {
            std::size_t g, c;
            std::string id;
        };
        std::vector<Job> work;
        for (std::size_t g = 0; g < groups.size(); g++) {
            for (std::size_t c = 0; c < cells.size(); c++) {
                for (const std::string &id : ids) {
                    work.push_back({g, c, id});
                }
            }
        }
        rows = detail::parallel_map<nlohmann::json>(static_cast<int>(work.size()), cfg.workers, [&](int k) {
            const Job &j = work[k];
            nlohmann::json row;
            try {
                IdentityCheck r = check_identity(j.id, resolved[j.g], parsed[j.c], cells[j.c]);
                row = r.to_json();
                row["passed"] = r.passed(tol);
            } catch (const BudgetExceeded &e) {
                row = {{"identity", j.id}, {"group", resolved[j.g]->name()}, {"graph", cells[j.c]},
                       {"applicable", false}, {"skipped", e.what()}, {"passed", true}};
            }
            return row;
        });
        for (const nlohmann::json &r : rows) {
            if (!r["passed"].get<bool>()) {
                passed = false;
                failures++;
                s << "FAIL " << r["identity"].get<std::string>() << " " << r["group"].get<std::string>() << " "
                  << r["graph"].get<std::string>() << " deviation " << detail::fmt(r["deviation"].get<double>()) << "\n";
            }
        }
    } else if (cfg.suite == "stabilizers" || cfg.suite == "gsd") {
        bool stab = cfg.suite == "stabilizers";
        rows = detail::parallel_map<nlohmann::json>(static_cast<int>(jobs.size()), cfg.workers, [&](int k) {
            const GroupRef &g = resolved[k / cells.size()];
            const Cellulation &cell = parsed[k % cells.size()];
            nlohmann::json row = {{"group", g->name()}, {"cell", jobs[k].second}};
            if (stab) {
                QuditRegister st = oracle_double_state(g, cell);
                std::vector<int> ids;
                for (int e = 0; e < cell.num_edges(); e++) {
                    ids.push_back(st.find("e" + std::to_string(e)));
                }
                StabilizerReport rep = stabilizer_report(st, ids, *g, cell);
                row["report"] = rep.to_json();
                row["passed"] = rep.min_expectation() >= 1 - tol && rep.loop_deviation() <= tol && rep.max_imag <= tol;
            } else {
                int gsd = ground_state_degeneracy(*g, cell);
                row["gsd"] = gsd;
                if (cell.surface && cell.genus == 1) {
                    int orbits = commuting_pair_orbit_count(*g);
                    row["commuting_pair_orbits"] = orbits;
                    row["passed"] = gsd == orbits;
                } else {
                    row["passed"] = true;
                }
            }
            return row;
        });
        for (const nlohmann::json &r : rows) {
            if (!r["passed"].get<bool>()) {
                passed = false;
                failures++;
                s << "FAIL " << r["group"].get<std::string>() << " " << r["cell"].get<std::string>() << "\n";
            }
        }
    } else {
        throw std::invalid_argument("unknown suite '" + cfg.suite + "' (identities | stabilizers | gsd)");
    }
    CommandResult out;
    out.report = {{"schema_version", kSchemaVersion},
                  {"config", cfg.to_json()},
                  {"rows", rows},
                  {"summary", {{"rows", rows.size()}, {"failures", failures}, {"passed", passed}}}};
    out.exit_code = passed ? kExitOk : kExitTolerance;
    s << cfg.suite << ": " << rows.size() << " row(s), " << failures << " failure(s)\n";
    out.summary = s.str();
    return out;
}

namespace detail {

inline nlohmann::json subgroup_json(const Subgroup &h) {
    return {{"order", h.order()}, {"members", h.members}};
}

}  // namespace detail

/// queries: derived-series, center, normal-subgroups, factor-systems.
inline CommandResult cmd_groups(const RunConfig &cfg) {
    if (cfg.groups.size() != cfg.queries.size() || cfg.groups.empty()) {
        throw std::invalid_argument("groups needs one group per query");
    }
    std::vector<nlohmann::json> results;
    std::ostringstream s;
    for (std::size_t k = 0; k < cfg.queries.size(); k++) {
        const std::string &q = cfg.queries[k];
        FiniteGroup g = parse_group_spec(cfg.groups[k]);
        nlohmann::json r = {{"query", q}, {"group", g.name()}, {"order", g.order()}};
        if (q == "derived-series") {
            DerivedSeries ds = derived_series(g);
            std::vector<int> orders;
            for (const Subgroup &t : ds.terms) {
                orders.push_back(t.order());
            }
            r["orders"] = orders;
            r["solvable"] = ds.solvable;
            if (ds.solvable) {
                r["derived_length"] = ds.derived_length;
            } else {
                r["perfect_core_order"] = ds.perfect_core().order();
                r["perfect_core"] = detail::perfect_core_name(g, ds.perfect_core());
            }
            s << g.name() << " derived series";
            for (int o : orders) {
                s << " " << o;
            }
            s << (ds.solvable ? ", l = " + std::to_string(ds.derived_length) : std::string(", not solvable")) << "\n";
        } else if (q == "center") {
            Subgroup z = center(g);
            r["center"] = detail::subgroup_json(z);
            s << g.name() << " center of order " << z.order() << "\n";
        } else if (q == "normal-subgroups") {
            nlohmann::json list = nlohmann::json::array();
            for (const Subgroup &n : normal_subgroups(g)) {
                list.push_back(detail::subgroup_json(n));
            }
            r["normal_subgroups"] = list;
            s << g.name() << " has " << list.size() << " normal subgroups\n";
        } else if (q == "factor-systems") {
            nlohmann::json list = nlohmann::json::array();
            for (const Subgroup &n : normal_subgroups(g)) {
                FactorSystem fs = factor_system_of(g, n);
                nlohmann::json j = factor_system_to_json(fs);
                j["normal_order"] = n.order();
                j["round_trip_isomorphic"] = is_isomorphic(extension_from_factor_system(fs), g);
                j["nil2"] = is_nil2_extension(fs);
                j["metabelian"] = is_metabelian_extension(fs);
                list.push_back(j);
            }
            r["factor_systems"] = list;
            s << g.name() << ": " << list.size() << " factor systems\n";
        } else {
            throw std::invalid_argument(
                "unknown query '" + q + "' (derived-series | center | normal-subgroups | factor-systems)");
        }
        results.push_back(r);
    }
    CommandResult out;
    out.report = {{"schema_version", kSchemaVersion}, {"config", cfg.to_json()}, {"results", results}};
    out.summary = s.str();
    return out;
}

/// Dispatches; every rejected precondition becomes exit 1 with an error report.
inline CommandResult run_command(const RunConfig &cfg) {
    auto fail = [&](const std::string &kind, const std::string &msg) {
        CommandResult r;
        r.exit_code = kExitPrecondition;
        r.report = {{"schema_version", kSchemaVersion},
                    {"config", cfg.to_json()},
                    {"error", {{"kind", kind}, {"message", msg}}}};
        r.summary = "error (" + kind + "): " + msg + "\n";
        return r;
    };
    try {
        if (cfg.command == "prepare") {
            return cmd_prepare(cfg);
        }
        if (cfg.command == "verify") {
            return cmd_verify(cfg);
        }
        if (cfg.command == "groups") {
            return cmd_groups(cfg);
        }
        return fail("usage", "unknown command '" + cfg.command + "'");
    } catch (const NonSolvableGroup &e) {
        return fail("non_solvable", e.what());
    } catch (const BudgetExceeded &e) {
        return fail("budget", e.what());
    } catch (const ZeroProbabilityOutcome &e) {
        return fail("zero_probability", e.what());
    } catch (const InvariantError &e) {
        return fail("invariant", e.what());
    } catch (const nlohmann::json::exception &e) {
        return fail("parse", e.what());
    } catch (const std::exception &e) {
        return fail("precondition", e.what());
    }
}

/// Writes text to path via a temporary file and rename; "-" is stdout.
inline void write_atomically(const std::string &path, const std::string &text) {
    if (path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << text;
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace qdouble

#endif
