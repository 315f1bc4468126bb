// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmflow/regularity.hpp"

namespace hmf {

struct ConfigIssue {
    std::string path; // dotted field path, e.g. "constants.eps[0]"
    std::string message;
    int line = 0;
    int col = 0;
};

/// Configuration failure carrying every issue found, not just the first.
class ConfigError : public Error {
  public:
    ConfigError(std::string what, std::vector<ConfigIssue> issues)
        : Error(Errc::config, std::move(what)), issues_(std::move(issues)) {}
    const std::vector<ConfigIssue>& issues() const { return issues_; }

  private:
    std::vector<ConfigIssue> issues_;
};

struct TargetSpec {
    std::string variant = "euclidean"; // euclidean | tree | tripod | hyperbolic | product
    int dim = 1;                       // euclidean
    double leg = 1.0;                  // tripod
    std::vector<std::string> vertices; // tree
    std::vector<TreeEdgeSpec> edges;   // tree
    std::vector<std::string> factors;  // product, compact factor strings like "tripod:1.5"

    bool operator==(const TargetSpec&) const = default;
};

struct MapSpec {
    std::string preset = "constant"; // constant | table | expression | coordinate | fourier |
                                     // circle | tripod-wave | random-ball | from-initial | none
    std::string value;               // constant: encoded point
    std::vector<std::string> table;  // per-vertex encoded points
    std::vector<std::string> exprs;  // expression preset, one per Euclidean coordinate
    double amplitude = 1.0;
    double k = 1.0;
    double phase = 0.0;
    double offset = 0.0;
    double radius = 1.0;
    std::string center; // random-ball center (encoded point)

    bool operator==(const MapSpec&) const = default;
};

struct CheckSpec {
    std::string name;
    std::map<std::string, std::string> params;

    bool operator==(const CheckSpec&) const = default;
    double num(const std::string& key, double fallback) const;
    std::string str(const std::string& key, const std::string& fallback) const;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    std::string out_dir; // optional default output directory

    std::string domain_kind = "cycle";
    int n = 8;
    double length = 8.0;

    TargetSpec target;
    MapSpec initial;
    std::optional<MapSpec> initial2; // twin flow for pair checks
    MapSpec boundary;                // full-map spec restricted to the boundary set

    std::vector<double> times; // explicit grid; empty means uniform from t_end/steps
    double t_end = 1.0;
    int steps = 10;
    int m_per_interval = 1;
    double h_max = 0.0;
    double tol = 1e-10;
    int max_sweeps = 10000;

    double K = 0.0;
    double M0 = 1.0;
    std::string P0; // encoded point, optional
    double t_star = 0.0;
    double T = 1.0;
    std::vector<double> eps;
    std::vector<int> p = {2};

    std::vector<CheckSpec> checks;

    double eps0 = 0.0; // computed during validation

    bool operator==(const ScenarioConfig&) const = default;
    std::vector<double> time_grid() const;
};

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
ScenarioConfig parse_config_file(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);
std::string config_hash(const ScenarioConfig& cfg);

TargetSpace build_target(const TargetSpec& spec);
std::shared_ptr<const MeshDomain> build_config_domain(const ScenarioConfig& cfg);
/// Evaluate a map spec into per-vertex points (the full map; boundary specs are
/// restricted afterwards).
std::vector<Point> build_map_values(const MapSpec& spec, const MeshDomain& dom, const TargetSpace& space,
                                    Rng& rng, const std::vector<Point>* initial_values = nullptr);

struct RunArtifacts {
    std::vector<CheckReport> reports;
    bool all_pass = true;
    std::vector<std::string> files_written;
};

/// Execute the configured flow and checks, writing trace/field CSVs and the
/// JSON report bundle into out_dir. Rerunning with an identical config and
/// seed produces byte-identical artifacts.
RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

/// Property-check batteries: "cat0" (comparison inequalities, metric axioms,
/// barycenter and projection properties over the space zoo), "flow"
/// (Euclidean oracle equivalence, semigroup and EVI checks), "regularity"
/// (interpolation, Hamilton-Jacobi and Bochner families), or "all".
std::vector<CheckReport> verify_suite(const std::string& suite, std::uint64_t seed);

std::vector<CheckReport> verify_cat0(std::uint64_t seed, int quadruples);
std::vector<CheckReport> verify_flow(std::uint64_t seed);
std::vector<CheckReport> verify_regularity(std::uint64_t seed);

/// Write verify results as JSON; returns the file path.
std::string write_reports_json(const std::vector<CheckReport>& reports, const std::string& out_dir,
                               const std::string& filename);

/// Reference-value generators backing the derived expectations:
///   euclidean-heat        dense matrix exponential / resolvent solves
///   tree-brute-barycenter exhaustive scan over a fine edge discretization
///   grid-hj-closedform    exhaustive inf-convolution on a 1-D lattice
/// Writes a CSV into out_dir and returns its path.
std::string oracle(const std::string& case_name, const std::map<std::string, std::string>& params,
                   const std::string& out_dir);

const char* tool_version();

} // namespace hmf
