// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "hmflow/scenario.hpp"

namespace hmf {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
    out << text;
}

ordered_json report_to_json(const CheckReport& rep) {
    ordered_json j;
    j["check"] = rep.check;
    j["paper_anchor"] = rep.anchor;
    j["tolerance"] = rep.tolerance;
    j["min"] = rep.min;
    j["mean"] = rep.mean;
    j["max"] = rep.max;
    j["pass"] = rep.pass;
    j["scenario"] = rep.scenario;
    j["seed"] = rep.seed;
    return j;
}

struct BuiltScenario {
    std::shared_ptr<const MeshDomain> domain;
    TargetSpace space;
    MapState u0;
    std::optional<MapState> u0_twin;
    std::optional<MapState> psi_full; // full-map extension of the boundary data
};

BuiltScenario build_scenario(const ScenarioConfig& cfg, Rng& rng) {
    auto domain = build_config_domain(cfg);
    TargetSpace space = build_target(cfg.target);
    std::vector<Point> u0_values = build_map_values(cfg.initial, *domain, space, rng);

    std::optional<std::vector<Point>> psi;
    std::optional<MapState> psi_full;
    if (cfg.boundary.preset != "none") {
        std::vector<Point> full = build_map_values(cfg.boundary, *domain, space, rng, &u0_values);
        psi = std::vector<Point>();
        for (int b : domain->boundary) psi->push_back(full[b]);
        psi_full.emplace(domain, space, full);
    }
    MapState u0(domain, space, u0_values, psi);
    std::optional<MapState> twin;
    if (cfg.initial2) {
        std::vector<Point> twin_values = build_map_values(*cfg.initial2, *domain, space, rng, &u0_values);
        twin.emplace(domain, space, twin_values, psi);
    }
    return BuiltScenario{domain, space, std::move(u0), std::move(twin), std::move(psi_full)};
}

std::string trace_csv(const FlowTrace& trace) {
    std::string out = "t,vertex_id,point,energy_density\n";
    for (int k = 0; k < trace.size(); ++k) {
        auto density = energy(trace.states[k]).density;
        for (int i = 0; i < trace.initial.domain->vertex_count(); ++i) {
            out += format_double(trace.times[k]);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += trace.initial.space.encode_point(trace.states[k].values[i]);
            out += ',';
            out += format_double(density[i]);
            out += '\n';
        }
    }
    return out;
}

std::string field_csv(const std::vector<double>& times, const std::vector<std::vector<double>>& rows) {
    std::string out = "t,vertex_id,value\n";
    for (size_t k = 0; k < times.size(); ++k) {
        for (size_t i = 0; i < rows[k].size(); ++i) {
            if (std::isnan(rows[k][i])) continue;
            out += format_double(times[k]);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += format_double(rows[k][i]);
            out += '\n';
        }
    }
    return out;
}

// dense interior solve of (M/h + L) u = M u0 / h with pinned boundary,
// per Euclidean coordinate
double dense_resolvent_gap(const MapState& u0, const MapState& j_state, double h) {
    const MeshDomain& dom = *u0.domain;
    const int dim = u0.space.euclidean_dim();
    const int n = dom.vertex_count();
    double gap = 0.0;
    for (int c = 0; c < dim; ++c) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            double ui = std::get<EuclideanVec>(u0.values[i].value).coords[c];
            if (dom.is_boundary[i] && u0.psi) {
                A(i, i) = 1.0;
                rhs[i] = ui;
                continue;
            }
            A(i, i) = dom.measure[i] / h;
            rhs[i] = dom.measure[i] * ui / h;
            for (const auto& [jj, w] : dom.adjacency[i]) {
                A(i, i) += w;
                A(i, jj) -= w;
            }
        }
        Eigen::VectorXd x = A.partialPivLu().solve(rhs);
        for (int i = 0; i < n; ++i)
            gap = std::max(gap,
                           std::fabs(x[i] - std::get<EuclideanVec>(j_state.values[i].value).coords[c]));
    }
    return gap;
}

} // namespace

RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    Rng rng(cfg.seed);
    BuiltScenario built = build_scenario(cfg, rng);

    auto grid = cfg.time_grid();
    FlowTrace trace =
        flow_run(built.u0, grid, cfg.m_per_interval, cfg.tol, cfg.max_sweeps, cfg.h_max);
    if (built.psi_full)
        trace.admissible_energy = energy(built.u0).total <= energy(*built.psi_full).total + 1e-12;
    std::optional<FlowTrace> twin;
    if (built.u0_twin)
        twin = flow_run(*built.u0_twin, grid, cfg.m_per_interval, cfg.tol, cfg.max_sweeps, cfg.h_max);

    RunArtifacts artifacts;
    auto add_report = [&](CheckReport rep) {
        rep.scenario = cfg.name;
        rep.seed = cfg.seed;
        artifacts.all_pass = artifacts.all_pass && rep.pass;
        artifacts.reports.push_back(std::move(rep));
    };
    const double grid_step = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
    auto tests = default_test_functions(built.domain);

    for (const auto& check : cfg.checks) {
        if (check.name == "energy-monotone") {
            double tol = check.num("tol", 1e-10);
            std::vector<double> residuals;
            for (int k = 1; k < trace.size(); ++k)
                residuals.push_back((trace.energies[k - 1] - trace.energies[k]) /
                                    (1.0 + trace.energies[k - 1]));
            add_report(CheckReport::lower_bound("energy-monotone", "energy monotonicity of the semigroup",
                                                tol, residuals));
        } else if (check.name == "evi") {
            double tol = check.num("tol", 1e-8);
            int count = static_cast<int>(check.num("comparators", 100));
            std::vector<double> residuals;
            for (int c = 0; c < count; ++c) {
                std::vector<Point> vv;
                for (int i = 0; i < built.domain->vertex_count(); ++i)
                    vv.push_back(random_point(built.space, rng, cfg.M0));
                MapState v(built.domain, built.space, vv, built.u0.psi);
                double ev = energy(v).total;
                for (int k = 1; k < trace.size(); ++k) {
                    double s = trace.times[k] - trace.times[k - 1];
                    residuals.push_back(evi_residual(trace, v, k, s) / (1.0 + ev));
                }
            }
            add_report(CheckReport::lower_bound("evi", "evolution variational inequality", tol, residuals));
        } else if (check.name == "confinement") {
            double tol = check.num("tol", 1e-9);
            Point P0 = built.space.decode_point(cfg.P0);
            double excess = confinement_check(trace, P0, cfg.M0);
            add_report(CheckReport::upper_bound("confinement", "convex ball confinement", tol, {excess}));
        } else if (check.name == "contraction") {
            double tol = check.num("tol", 1e-9);
            std::vector<double> residuals;
            for (int k = 1; k < trace.size(); ++k)
                residuals.push_back(l2_distance(trace.states[k - 1], twin->states[k - 1]) -
                                    l2_distance(trace.states[k], twin->states[k]));
            add_report(
                CheckReport::lower_bound("contraction", "L2 contraction of the flow", tol, residuals));
        } else if (check.name == "resolvent-minimality") {
            double tol = check.num("tol", 1e-9);
            int trials = static_cast<int>(check.num("trials", 64));
            std::vector<double> residuals;
            for (int k = 1; k < trace.size(); ++k) {
                double h = trace.inner_steps[k];
                MapState j = resolvent(trace.states[k - 1], h, cfg.tol, cfg.max_sweeps);
                residuals.push_back(
                    resolvent_perturbation_margin(j, trace.states[k - 1], h, trials, 10.0 * cfg.tol, rng));
            }
            add_report(CheckReport::lower_bound("resolvent-minimality", "resolvent minimality certificate",
                                                tol, residuals));
        } else if (check.name == "oracle-euclidean") {
            double tol = check.num("tol", 1e-8);
            double h = trace.inner_steps.size() > 1 ? trace.inner_steps[1] : grid_step;
            MapState j = resolvent(built.u0, h, cfg.tol, cfg.max_sweeps);
            double gap = dense_resolvent_gap(built.u0, j, h);
            add_report(CheckReport::upper_bound("oracle-euclidean", "Euclidean linear-solve equivalence",
                                                tol, {gap}));
        } else if (check.name == "semigroup") {
            double t = check.num("t", 0.5);
            double s = check.num("s", 0.25);
            int m = static_cast<int>(check.num("m", 8));
            double r1 = semigroup_residual(built.u0, t, s, m, cfg.tol, cfg.max_sweeps);
            double r2 = semigroup_residual(built.u0, t, s, 2 * m, cfg.tol, cfg.max_sweeps);
            CheckReport rep;
            rep.check = "semigroup";
            rep.anchor = "semigroup composition property";
            rep.tolerance = check.num("floor", 1e-12);
            rep.min = r2;
            rep.max = r1;
            rep.mean = 0.5 * (r1 + r2);
            rep.count = 2;
            rep.pass = r2 < r1 || r1 <= rep.tolerance;
            add_report(rep);
        } else if (check.name == "r-bound") {
            double tol = check.num("tol", 1e-12);
            std::vector<double> residuals;
            for (int k = 0; k < trace.size(); ++k) {
                const MapState& a = trace.states[k];
                const MapState& b = twin ? twin->states[k]
                                         : trace.states[std::max(0, k - 1)];
                ScalarField R = r_density(a, b);
                ScalarField ea = energy(a).density, eb = energy(b).density;
                for (int i = 0; i < built.domain->vertex_count(); ++i) {
                    residuals.push_back(R[i]);
                    residuals.push_back(2.0 * ea[i] + 2.0 * eb[i] - R[i]);
                }
            }
            add_report(CheckReport::lower_bound("r-bound", "R-density bounded by energy densities", tol,
                                                residuals));
        } else if (check.name == "phi-interpolation") {
            double tol = check.num("tol", 1e-9);
            int count = static_cast<int>(check.num("count", 200));
            std::vector<double> residuals;
            for (int c = 0; c < count; ++c) {
                std::vector<Point> a, b;
                for (int i = 0; i < built.domain->vertex_count(); ++i) {
                    a.push_back(random_point(built.space, rng, cfg.M0));
                    b.push_back(random_point(built.space, rng, cfg.M0));
                }
                MapState u(built.domain, built.space, a), v(built.domain, built.space, b);
                ScalarField phi(built.domain, 0.0);
                for (int i : built.domain->interior) phi[i] = rng.uniform();
                auto res = phi_interpolation_residuals(u, v, phi);
                residuals.insert(residuals.end(), res.per_edge.begin(), res.per_edge.end());
            }
            add_report(CheckReport::lower_bound("phi-interpolation", "interpolation energy comparison", tol,
                                                residuals));
        } else if (check.name == "subsolution") {
            double C = check.num("C", 1.0);
            add_report(subsolution_residuals(trace, *twin, tests, C * grid_step));
        } else if (check.name == "distance-subsolution") {
            double C = check.num("C", 1.0);
            Point P0 = built.space.decode_point(cfg.P0);
            auto reports = distance_subsolution_residuals(trace, P0, tests, C * grid_step);
            add_report(reports.squared);
            add_report(reports.plain);
        } else if (check.name == "lip") {
            double tol = check.num("tol", 1e-9);
            double floor = check.num("floor", 1e-9);
            std::vector<double> residuals;
            for (int i = 0; i < built.domain->vertex_count(); ++i) {
                double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                for (int a = 0; a < trace.size(); ++a) {
                    if (trace.times[a] < cfg.t_star - 1e-12) continue;
                    for (int b = a + 1; b < trace.size(); ++b) {
                        double s = trace.times[b] - trace.times[a];
                        double ratio = built.space.distance(trace.states[a].values[i],
                                                            trace.states[b].values[i]) /
                                       s;
                        lo = std::min(lo, ratio);
                        hi = std::max(hi, ratio);
                    }
                }
                if (hi > floor && std::isfinite(lo)) residuals.push_back(2.0 - hi / std::max(lo, floor));
            }
            if (residuals.empty()) residuals.push_back(2.0);
            add_report(CheckReport::lower_bound("lip", "time Lipschitz bound", tol, residuals));
        } else if (check.name == "mean-value") {
            double C = check.num("C", 10.0);
            Point P0 = built.space.decode_point(cfg.P0.empty() ? built.space.encode_point(
                                                                     trace.states[0].values[0])
                                                               : cfg.P0);
            std::vector<ScalarField> g_series, f_series;
            for (int k = 0; k < trace.size(); ++k) {
                ScalarField g(built.domain, 0.0), f(built.domain, 0.0);
                auto e = energy(trace.states[k]).density;
                for (int i = 0; i < built.domain->vertex_count(); ++i) {
                    double d = built.space.distance(P0, trace.states[k].values[i]);
                    g[i] = -d * d;
                    f[i] = -2.0 * e[i];
                }
                g_series.push_back(std::move(g));
                f_series.push_back(std::move(f));
            }
            int x0 = static_cast<int>(check.num("x0", built.domain->vertex_count() / 2));
            int back = static_cast<int>(check.num("steps_back", (trace.size() - 1) / 2));
            back = std::max(1, back);
            double res = mean_value_residual(g_series, f_series, grid_step, x0, trace.size() - 1, back);
            add_report(CheckReport::upper_bound("mean-value", "asymptotic mean value inequality",
                                                C * grid_step, {res}));
        } else if (check.name == "hj") {
            double super_C = check.num("C", 10.0);
            double grad_tol = check.num("grad_tol", 1e-9);
            double super_tol = super_C * (grid_step + built.domain->spacing);
            for (int p : cfg.p) {
                auto set = hj_checks(trace, cfg.eps, p, cfg.K, cfg.M0, cfg.T, tests, super_tol, grad_tol);
                add_report(set.supersolution);
                add_report(set.gradient_bound);
                add_report(set.limit_trend);
            }
        } else if (check.name == "bochner") {
            double C = check.num("C", 1.0);
            add_report(bochner_residuals(trace, cfg.K, tests, C * (grid_step + built.domain->spacing)));
        } else if (check.name == "ks-profile") {
            double eps = check.num("eps", 1e-2);
            double expected = check.num("expected", 1.0);
            double tol = check.num("tol", 1e-3);
            int lattice_n = static_cast<int>(check.num("lattice_n", 1001));
            LatticeMap lattice(built.space);
            lattice.dim = 1;
            lattice.nx = lattice_n;
            lattice.spacing = cfg.length / (lattice_n - 1);
            // sample the initial map preset on the fine lattice
            auto fine_dom = build_domain(DomainKind::interval_dirichlet, lattice_n, cfg.length);
            Rng lattice_rng(cfg.seed);
            lattice.values = build_map_values(cfg.initial, *fine_dom, built.space, lattice_rng);
            auto profile = ks_energy_profile(lattice, eps);
            std::vector<double> residuals;
            for (size_t i = 0; i < profile.e.size(); ++i)
                if (profile.valid[i]) residuals.push_back(tol - std::fabs(profile.e[i] - expected));
            add_report(CheckReport::lower_bound("ks-profile", "epsilon-approximate energy consistency", 0.0,
                                                residuals));
        } else {
            throw Error(Errc::config, "unknown check '" + check.name + "'");
        }
    }

    // -----------------------------------------------------------------
    // artifacts
    // -----------------------------------------------------------------
    auto emit = [&](const std::string& filename, const std::string& text) {
        std::string path = (fs::path(out_dir) / filename).string();
        write_text(path, text);
        artifacts.files_written.push_back(path);
    };
    emit("trace.csv", trace_csv(trace));
    if (twin) emit("trace2.csv", trace_csv(*twin));

    {
        std::vector<std::vector<double>> lip_rows;
        for (int k = 0; k < trace.size(); ++k)
            lip_rows.push_back(lip_field(trace.states[k], built.domain->spacing * (1.0 + 1e-12)).values);
        emit("field_lip.csv", field_csv(trace.times, lip_rows));
    }
    if (twin) {
        std::vector<std::vector<double>> w_rows, r_rows;
        for (int k = 0; k < trace.size(); ++k) {
            std::vector<double> w(built.domain->vertex_count());
            for (int i = 0; i < built.domain->vertex_count(); ++i) {
                double d = built.space.distance(trace.states[k].values[i], twin->states[k].values[i]);
                w[i] = d * d;
            }
            w_rows.push_back(std::move(w));
            r_rows.push_back(r_density(trace.states[k], twin->states[k]).values);
        }
        emit("field_w.csv", field_csv(trace.times, w_rows));
        emit("field_R.csv", field_csv(trace.times, r_rows));
    }
    for (const auto& check : cfg.checks) {
        if (check.name != "hj" || cfg.eps.empty()) continue;
        auto hj = hj_flow(trace, cfg.eps.front(), cfg.p.front(), cfg.K, cfg.M0, cfg.T);
        emit("field_f_eps.csv", field_csv(hj.times, hj.values));
        break;
    }

    ordered_json reports = ordered_json::array();
    for (const auto& rep : artifacts.reports) reports.push_back(report_to_json(rep));
    emit("reports.json", reports.dump(2) + "\n");

    ordered_json manifest;
    manifest["scenario"] = cfg.name;
    manifest["config_hash"] = config_hash(cfg);
    manifest["version"] = tool_version();
    manifest["seed"] = cfg.seed;
    manifest["admissible_energy"] = trace.admissible_energy;
    emit("manifest.json", manifest.dump(2) + "\n");

    return artifacts;
}

std::string write_reports_json(const std::vector<CheckReport>& reports, const std::string& out_dir,
                               const std::string& filename) {
    fs::create_directories(out_dir);
    ordered_json arr = ordered_json::array();
    for (const auto& rep : reports) arr.push_back(report_to_json(rep));
    std::string path = (fs::path(out_dir) / filename).string();
    write_text(path, arr.dump(2) + "\n");
    return path;
}

} // namespace hmf
