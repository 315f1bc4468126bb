// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hmflow/oracles.hpp"
#include "hmflow/scenario.hpp"

using namespace hmf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kGolden = R"(# minimal scenario: one Fourier mode relaxing on a cycle
[scenario]
name = "golden"
seed = 7

[domain]
kind = "cycle"
n = 8
length = 8.0

[target]
variant = "euclidean"
dim = 1

[initial]
preset = "fourier"
amplitude = 1.0
k = 1.0

[flow]
t_end = 0.5
steps = 5
tol = 1e-11

[check.energy-monotone]
tol = 1e-10
)";

const char* kSmoke = R"([scenario]
name = "smoke"
seed = 1

[domain]
kind = "interval-dirichlet"
n = 3
length = 2.0

[target]
variant = "euclidean"
dim = 1

[initial]
preset = "table"
table = ["0", "1", "0"]

[boundary]
preset = "constant"
value = "0"

[flow]
times = [0.0, 1.0]
m_per_interval = 1
tol = 1e-12

[check.energy-monotone]
tol = 1e-10

[check.evi]
tol = 1e-8
comparators = 20
)";

} // namespace

TEST_CASE("parse_config: golden file round trip and derived eps0") {
    ScenarioConfig cfg = parse_config_text(kGolden);
    CHECK(cfg.name == "golden");
    CHECK(cfg.seed == 7);
    CHECK(cfg.domain_kind == "cycle");
    CHECK(cfg.n == 8);
    CHECK(cfg.initial.preset == "fourier");
    CHECK(cfg.checks.size() == 1);
    // R = half diameter = 2, eps0 = R^2 / (8 M0) = 0.5
    CHECK(cfg.eps0 == doctest::Approx(0.5));

    ScenarioConfig again = parse_config_text(serialize_config(cfg));
    CHECK(again == cfg);
    CHECK(config_hash(again) == config_hash(cfg));
}

TEST_CASE("parse_config: semantic errors carry field paths and name the eps0 bound") {
    std::string bad = std::string(kGolden) + "\n[constants]\neps = [5.0]\n";
    try {
        parse_config_text(bad);
        CHECK(false);
    } catch (const ConfigError& e) {
        REQUIRE(e.issues().size() == 1);
        CHECK(e.issues()[0].path == "constants.eps[0]");
        CHECK(e.issues()[0].message.find("eps0") != std::string::npos);
    }

    std::string cyclic = R"([scenario]
name = "bad-tree"
[domain]
kind = "cycle"
n = 8
length = 8.0
[target]
variant = "tree"
vertices = ["a", "b", "c"]
edges = [["a", "b", 1.0], ["b", "c", 1.0], ["c", "a", 1.0]]
[initial]
preset = "constant"
value = "0:0.5"
)";
    try {
        parse_config_text(cyclic);
        CHECK(false);
    } catch (const ConfigError& e) {
        bool found = false;
        for (const auto& issue : e.issues())
            found = found || issue.message.find("target tree is not acyclic") != std::string::npos;
        CHECK(found);
    }

    std::string unknown = std::string(kGolden);
    unknown.replace(unknown.find("fourier"), 7, "warped!");
    try {
        parse_config_text(unknown);
        CHECK(false);
    } catch (const ConfigError& e) {
        bool found = false;
        for (const auto& issue : e.issues())
            found = found || issue.message.find("unknown preset") != std::string::npos;
        CHECK(found);
    }
}

TEST_CASE("parse_config: syntax errors report line numbers, all validation issues collected") {
    try {
        parse_config_text("[scenario]\nname \"oops\"\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        REQUIRE(!e.issues().empty());
        CHECK(e.issues()[0].line == 2);
    }

    // several independent problems in one file are all reported
    std::string multi = R"([scenario]
name = "multi"
[domain]
kind = "interval-dirichlet"
n = 2
length = -1.0
[target]
variant = "euclidean"
dim = 1
[initial]
preset = "mystery"
[flow]
tol = -1.0
)";
    try {
        parse_config_text(multi);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.issues().size() >= 3);
    }
}

TEST_CASE("run_scenario: smoke values, reports, determinism") {
    ScenarioConfig cfg = parse_config_text(kSmoke);
    fs::path out_a = fs::temp_directory_path() / "hmf_smoke_a";
    fs::path out_b = fs::temp_directory_path() / "hmf_smoke_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);

    auto artifacts = run_scenario(cfg, out_a.string());
    CHECK(artifacts.all_pass);
    CHECK(artifacts.reports.size() == 2);
    for (const auto& rep : artifacts.reports) {
        CHECK(rep.pass);
        CHECK(rep.scenario == "smoke");
        CHECK(!rep.anchor.empty());
    }

    // trace.csv holds the h=1 resolvent closed form 1/3 at the center vertex
    std::string trace = slurp((out_a / "trace.csv").string());
    CHECK(trace.find("1,1,0.33333333333333") != std::string::npos);
    CHECK(trace.rfind("t,vertex_id,point,energy_density\n", 0) == 0);

    // two resolvent steps give 1/4
    ScenarioConfig cfg2 = cfg;
    cfg2.m_per_interval = 2;
    auto artifacts2 = run_scenario(cfg2, out_b.string());
    std::string trace2 = slurp((out_b / "trace.csv").string());
    CHECK(trace2.find("1,1,0.25") != std::string::npos);

    // byte-identical rerun
    fs::path out_c = fs::temp_directory_path() / "hmf_smoke_c";
    fs::remove_all(out_c);
    run_scenario(cfg, out_c.string());
    for (const char* name : {"trace.csv", "field_lip.csv", "reports.json", "manifest.json"}) {
        CHECK(slurp((out_a / name).string()) == slurp((out_c / name).string()));
    }
}

TEST_CASE("run_scenario: twin tripod scenario with subsolution and contraction checks") {
    std::string twin = R"([scenario]
name = "twin"
seed = 3

[domain]
kind = "cycle"
n = 12
length = 12.0

[target]
variant = "tripod"
leg = 2.0

[initial]
preset = "tripod-wave"
amplitude = 1.1
offset = 0.3

[initial2]
preset = "tripod-wave"
amplitude = 0.8
offset = 0.5
phase = 1

[flow]
t_end = 0.25
steps = 8
tol = 1e-11

[constants]
M0 = 2.0
P0 = "0:0"

[check.subsolution]
C = 2.0

[check.contraction]
tol = 1e-9

[check.r-bound]

[check.confinement]
tol = 1e-9

[check.energy-monotone]
)";
    ScenarioConfig cfg = parse_config_text(twin);
    fs::path out = fs::temp_directory_path() / "hmf_twin";
    fs::remove_all(out);
    auto artifacts = run_scenario(cfg, out.string());
    for (const auto& rep : artifacts.reports) {
        INFO(rep.check, " min=", rep.min, " tol=", rep.tolerance);
        CHECK(rep.pass);
    }
    CHECK(fs::exists(out / "trace2.csv"));
    CHECK(fs::exists(out / "field_w.csv"));
    CHECK(fs::exists(out / "field_R.csv"));
}

TEST_CASE("verify suites: reduced cat0 battery plus flow and regularity") {
    auto cat0 = verify_cat0(11, 300);
    CHECK(cat0.size() == 60);
    for (const auto& rep : cat0) {
        INFO(rep.scenario, "/", rep.check, " min=", rep.min);
        CHECK(rep.pass);
    }
    for (const auto& rep : verify_flow(11)) {
        INFO(rep.scenario, "/", rep.check, " min=", rep.min, " max=", rep.max);
        CHECK(rep.pass);
    }
    for (const auto& rep : verify_regularity(11)) {
        INFO(rep.scenario, "/", rep.check, " min=", rep.min, " max=", rep.max);
        CHECK(rep.pass);
    }
    CHECK_THROWS_AS(verify_suite("nope", 1), Error);
}

TEST_CASE("oracle commands write reference CSVs") {
    fs::path out = fs::temp_directory_path() / "hmf_oracle";
    fs::remove_all(out);

    auto heat = oracle("euclidean-heat",
                       {{"kind", "interval-dirichlet"}, {"n", "3"}, {"length", "2"}, {"t", "1"},
                        {"u0", "0;1;0"}},
                       out.string());
    std::string csv = slurp(heat);
    double center = std::stod(csv.substr(csv.find("\n1,") + 3));
    CHECK(center == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

    auto tree = oracle("tree-brute-barycenter",
                       {{"leg", "2"}, {"points", "0:1;1:1;2:1"}, {"weights", "1;1;1"}, {"grid", "200"}},
                       out.string());
    CHECK(slurp(tree).find("\n0:0,") != std::string::npos); // center vertex, canonical encoding

    auto hj = oracle("grid-hj-closedform",
                     {{"n", "257"}, {"length", "1"}, {"slope", "1"}, {"eps", "0.03125"}, {"p", "2"}},
                     out.string());
    std::string hj_csv = slurp(hj);
    double mid = std::stod(hj_csv.substr(hj_csv.find("\n128,") + 5));
    CHECK(mid == doctest::Approx(-0.015625).epsilon(1e-13));

    CHECK_THROWS_AS(oracle("nope", {}, out.string()), Error);
}
