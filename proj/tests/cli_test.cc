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

#include "qdouble/cli.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

using namespace qdouble;

namespace {

struct CliRun {
    int code;
    std::string out;
};

CliRun run_cli(const std::string &args) {
    std::string cmd = std::string(QDOUBLE_CLI) + " " + args + " 2>/dev/null";
    FILE *p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) {
        out.append(buf, n);
    }
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

RunConfig prepare_config(const std::string &group, const std::string &cell, const std::string &protocol,
                         const std::string &mode) {
    RunConfig c;
    c.command = "prepare";
    c.groups = {group};
    c.cells = {cell};
    c.protocol = protocol;
    c.mode = mode;
    return c;
}

}  // namespace

TEST(cli, config_rejects_unknown_fields) {
    ASSERT_THROW(RunConfig::from_json({{"command", "prepare"}, {"colour", "red"}}), std::invalid_argument);
    ASSERT_THROW(RunConfig::from_json(json::array()), std::invalid_argument);
    RunConfig c = RunConfig::from_json({{"command", "prepare"}, {"groups", {"Z2"}}, {"seeds", 3}});
    ASSERT_EQ(c.seeds, 3);
    ASSERT_EQ(c.groups, std::vector<std::string>({"Z2"}));
}

TEST(cli, config_echo_omits_execution_details) {
    RunConfig c;
    c.command = "verify";
    c.workers = 4;
    c.output = "/tmp/x.json";
    json j = c.to_json();
    ASSERT_FALSE(j.contains("workers"));
    ASSERT_FALSE(j.contains("output"));
    ASSERT_EQ(j["tolerance"], 1e-10);
    ASSERT_EQ(RunConfig::from_json(j).to_json(), j);
}

TEST(cli, parse_mode) {
    ASSERT_EQ(parse_mode("postselect").kind, KwMode::Kind::postselect);
    KwMode s = parse_mode("sample:42");
    ASSERT_EQ(s.kind, KwMode::Kind::sample);
    ASSERT_EQ(s.seed, 42u);
    ASSERT_THROW(parse_mode("sample:"), std::invalid_argument);
    ASSERT_THROW(parse_mode("sample:-1"), std::invalid_argument);
    ASSERT_THROW(parse_mode("random"), std::invalid_argument);
    std::string path = (std::filesystem::temp_directory_path() / "qdouble_forced.json").string();
    std::ofstream(path) << R"({"v0": 1, "v1": 1})";
    KwMode f = parse_mode("forced:" + path);
    ASSERT_EQ(f.kind, KwMode::Kind::forced);
    ASSERT_EQ(f.forced.at("v1"), 1);
    std::filesystem::remove(path);
}

TEST(cli, prepare_toric_code) {
    CommandResult r = run_command(prepare_config("Z2", "square:2x2", "abelian", "postselect"));
    ASSERT_EQ(r.exit_code, kExitOk) << r.summary;
    ASSERT_EQ(r.report["schema_version"], kSchemaVersion);
    ASSERT_EQ(r.report["summary"]["shots"], json::array({1}));
    ASSERT_GE(r.report["summary"]["min_stabilizer"].get<double>(), 1 - 1e-9);
    ASSERT_GE(r.report["summary"]["min_fidelity_vs_oracle"].get<double>(), 1 - 1e-9);
}

TEST(cli, prepare_nil2_reports_syndromes) {
    RunConfig c = prepare_config("D4", "hexagon", "nil2", "sample:42");
    CommandResult r = run_command(c);
    json s = r.report["summary"];
    ASSERT_EQ(s["shots"], json::array({1}));
    ASSERT_GE(s["min_stabilizer"].get<double>(), 1 - 1e-9);
    ASSERT_LT(s["max_syndrome_mismatch"].get<double>(), 1e-9);
    // torus sector overlap, see protocols tests
    ASSERT_NEAR(s["min_fidelity_vs_oracle"].get<double>(), 0.25, 1e-9);
    ASSERT_EQ(r.exit_code, kExitTolerance);
    c.cells = {"sphere:3"};
    CommandResult sphere = run_command(c);
    ASSERT_EQ(sphere.exit_code, kExitOk) << sphere.summary;
}

TEST(cli, prepare_errors) {
    CommandResult a5 = run_command(prepare_config("A5", "hexagon", "solvable", "postselect"));
    ASSERT_EQ(a5.exit_code, kExitPrecondition);
    ASSERT_EQ(a5.report["error"]["kind"], "non_solvable");
    ASSERT_NE(a5.report["error"]["message"].get<std::string>().find("perfect core A5"), std::string::npos);
    CommandResult cell = run_command(prepare_config("Z2", "no-such-cell", "abelian", "postselect"));
    ASSERT_EQ(cell.exit_code, kExitPrecondition);
    CommandResult proto = run_command(prepare_config("Z2", "hexagon", "magic", "postselect"));
    ASSERT_EQ(proto.exit_code, kExitPrecondition);
    RunConfig none;
    none.command = "dance";
    ASSERT_EQ(run_command(none).report["error"]["kind"], "usage");
}

TEST(cli, oracle_budget_is_reported) {
    RunConfig c = prepare_config("S4", "square:3x3", "solvable", "postselect");
    c.stabilizers = false;
    c.oracle = true;
    // S4 on a 3x3 torus exceeds both the oracle and the register budget
    CommandResult r = run_command(c);
    ASSERT_EQ(r.exit_code, kExitPrecondition);
}

TEST(cli, groups_queries) {
    RunConfig c;
    c.command = "groups";
    c.groups = {"S4", "Z6", "A5", "D4"};
    c.queries = {"derived-series", "derived-series", "derived-series", "factor-systems"};
    CommandResult r = run_command(c);
    ASSERT_EQ(r.exit_code, kExitOk) << r.summary;
    json res = r.report["results"];
    ASSERT_EQ(res[0]["orders"], json::array({24, 12, 4, 1}));
    ASSERT_EQ(res[0]["derived_length"], 3);
    ASSERT_EQ(res[1]["derived_length"], 1);
    ASSERT_EQ(res[2]["solvable"], false);
    ASSERT_EQ(res[2]["perfect_core"], "A5");
    for (const json &fs : res[3]["factor_systems"]) {
        ASSERT_TRUE(fs["round_trip_isomorphic"].get<bool>());
    }
    c.queries = {"derived-series"};
    ASSERT_EQ(run_command(c).exit_code, kExitPrecondition);
}

TEST(cli, verify_identities_for_s3) {
    RunConfig c;
    c.command = "verify";
    c.groups = {"S3"};
    CommandResult r = run_command(c);
    ASSERT_EQ(r.exit_code, kExitOk) << r.summary;
}

TEST(cli, verify_gsd) {
    RunConfig c;
    c.command = "verify";
    c.suite = "gsd";
    c.groups = {"Z2", "S3"};
    CommandResult r = run_command(c);
    ASSERT_EQ(r.exit_code, kExitOk) << r.summary;
}

TEST(cli, reports_do_not_depend_on_workers) {
    RunConfig c = prepare_config("Z3", "hexagon", "abelian", "sample:5");
    c.seeds = 6;
    c.workers = 1;
    std::string one = run_command(c).report.dump();
    c.workers = 3;
    ASSERT_EQ(run_command(c).report.dump(), one);
}

TEST(cli, binary_round_trip) {
    CliRun a = run_cli("prepare --group Z2 --cell square:2x2 --protocol abelian --mode sample:3 --seeds 4 --workers 1");
    CliRun b = run_cli("prepare --group Z2 --cell square:2x2 --protocol abelian --mode sample:3 --seeds 4 --workers 2");
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(a.out, b.out);
    json j = json::parse(a.out);
    ASSERT_EQ(j["summary"]["runs"], 4);
    CliRun bad = run_cli("prepare --group A5 --protocol solvable");
    ASSERT_EQ(bad.code, 1);
    ASSERT_EQ(json::parse(bad.out)["error"]["kind"], "non_solvable");
    CliRun flag = run_cli("prepare --no-such-flag");
    ASSERT_EQ(flag.code, 1);
}

TEST(cli, binary_writes_report_file) {
    std::string dir = std::filesystem::temp_directory_path().string();
    std::string path = dir + "/qdouble_cli_test_report.json";
    std::string cfg = dir + "/qdouble_cli_test_config.json";
    std::ofstream(cfg) << R"({"groups": ["Z6"], "queries": ["derived-series"]})";
    CliRun r = run_cli("groups --config " + cfg + " --out " + path);
    ASSERT_EQ(r.code, 0);
    ASSERT_TRUE(r.out.empty());
    std::ifstream in(path);
    json j = json::parse(in);
    ASSERT_EQ(j["results"][0]["derived_length"], 1);
    ASSERT_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove(path);
    std::filesystem::remove(cfg);
}
