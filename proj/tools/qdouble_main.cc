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

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qdouble/cli.hpp"

namespace {

void add_common(CLI::App *cmd, qdouble::RunConfig &cfg, std::string &config_file) {
    cmd->add_option("--config", config_file, "JSON RunConfig; flags given on the command line override it");
    cmd->add_option("--out,-o", cfg.output, "report path, '-' for stdout");
    cmd->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", cfg.tolerance, "override the default tolerance");
    cmd->add_flag("--pretty", cfg.pretty, "print a summary next to the report");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qdouble: measurement-based preparation of quantum double states"};
    app.require_subcommand(1);
    qdouble::RunConfig cfg;
    std::string config_file;

    auto *prepare = app.add_subcommand("prepare", "run a preparation protocol");
    std::string group, cell = "hexagon";
    prepare->add_option("--group,-g", group, "group spec");
    prepare->add_option("--cell,-c", cell, "hexagon | edge | triangle | square:LxL | sheared:N | sphere:N | file");
    prepare->add_option("--protocol,-p", cfg.protocol, "abelian | nil2 | metabelian | solvable");
    prepare->add_option("--mode,-m", cfg.mode, "postselect | sample:SEED | forced:FILE");
    prepare->add_option("--seeds", cfg.seeds, "consecutive seeds in sample mode")->check(CLI::PositiveNumber);
    bool no_stab = false, no_oracle = false;
    prepare->add_flag("--no-stabilizers", no_stab, "skip stabilizer expectations");
    prepare->add_flag("--no-oracle", no_oracle, "skip the oracle fidelity");
    prepare->add_flag("--gsd", cfg.gsd, "add the ground-state degeneracy");
    add_common(prepare, cfg, config_file);

    auto *verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite,-s", cfg.suite, "identities | stabilizers | gsd");
    verify->add_option("--group,-g", cfg.groups, "group spec (repeatable; default: catalog)");
    verify->add_option("--cell,-c", cfg.cells, "cellulation spec (repeatable)");
    verify->add_option("--identity,-i", cfg.identities, "identity id (repeatable; default: all)");
    add_common(verify, cfg, config_file);

    auto *groups = app.add_subcommand("groups", "group-theory queries");
    std::vector<std::string> q_derived, q_center, q_normal, q_fs;
    groups->add_option("--derived-series", q_derived, "derived series of a group");
    groups->add_option("--center", q_center, "center of a group");
    groups->add_option("--normal-subgroups", q_normal, "normal subgroups of a group");
    groups->add_option("--factor-systems", q_fs, "factor systems over every normal subgroup");
    add_common(groups, cfg, config_file);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : qdouble::kExitPrecondition;
    }

    qdouble::RunConfig merged = cfg;
    if (!config_file.empty()) {
        try {
            std::ifstream in(config_file);
            if (!in) {
                throw std::invalid_argument("cannot read config " + config_file);
            }
            merged = qdouble::RunConfig::from_json(nlohmann::json::parse(in));
        } catch (const std::exception &e) {
            std::cerr << "error (config): " << e.what() << "\n";
            return qdouble::kExitPrecondition;
        }
        auto given = [&](CLI::App *cmd, const char *name) {
            return cmd->count(name) > 0;
        };
        CLI::App *cmd = app.get_subcommands().front();
        if (given(cmd, "--out")) merged.output = cfg.output;
        if (given(cmd, "--workers")) merged.workers = cfg.workers;
        if (given(cmd, "--tolerance")) merged.tolerance = cfg.tolerance;
        if (cfg.pretty) merged.pretty = true;
    }
    if (prepare->parsed()) {
        merged.command = "prepare";
        if (prepare->count("--group")) {
            merged.groups = {group};
        }
        if (config_file.empty() || prepare->count("--cell")) {
            merged.cells = {cell};
        }
        if (!config_file.empty()) {
            if (prepare->count("--protocol")) merged.protocol = cfg.protocol;
            if (prepare->count("--mode")) merged.mode = cfg.mode;
            if (prepare->count("--seeds")) merged.seeds = cfg.seeds;
            if (cfg.gsd) merged.gsd = true;
        }
        if (no_stab) merged.stabilizers = false;
        if (no_oracle) merged.oracle = false;
    } else if (verify->parsed()) {
        merged.command = "verify";
        if (!config_file.empty()) {
            if (verify->count("--suite")) merged.suite = cfg.suite;
            if (verify->count("--group")) merged.groups = cfg.groups;
            if (verify->count("--cell")) merged.cells = cfg.cells;
            if (verify->count("--identity")) merged.identities = cfg.identities;
        }
    } else {
        merged.command = "groups";
        std::vector<std::pair<const char *, std::vector<std::string> *>> flags = {
            {"derived-series", &q_derived}, {"center", &q_center}, {"normal-subgroups", &q_normal},
            {"factor-systems", &q_fs}};
        if (!q_derived.empty() || !q_center.empty() || !q_normal.empty() || !q_fs.empty()) {
            merged.groups.clear();
            merged.queries.clear();
            for (auto &[name, list] : flags) {
                for (const std::string &g : *list) {
                    merged.queries.push_back(name);
                    merged.groups.push_back(g);
                }
            }
        }
    }

    qdouble::CommandResult r = qdouble::run_command(merged);
    try {
        qdouble::write_atomically(merged.output, r.report.dump() + "\n");
    } catch (const std::exception &e) {
        std::cerr << "error (io): " << e.what() << "\n";
        return qdouble::kExitPrecondition;
    }
    if (r.exit_code == qdouble::kExitPrecondition) {
        std::cerr << r.summary;
    } else if (merged.pretty) {
        (merged.output == "-" ? std::cerr : std::cout) << r.summary;
    }
    return r.exit_code;
}
