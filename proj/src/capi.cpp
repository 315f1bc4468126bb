// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include "hmflow/hmflow.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <sstream>

#include "hmflow/scenario.hpp"

using ordered_json = nlohmann::ordered_json;

namespace {

thread_local std::string g_last_error;

hmf_status status_of(const hmf::Error& e) {
    switch (e.code()) {
        case hmf::Errc::config: return HMF_CONFIG_ERROR;
        case hmf::Errc::io: return HMF_IO_ERROR;
        case hmf::Errc::non_convergence:
        case hmf::Errc::numeric: return HMF_NUMERIC_ERROR;
        default: return HMF_INVALID_ARGUMENT;
    }
}

hmf_status record(const std::exception& e, hmf_status status) {
    g_last_error = e.what();
    return status;
}

template <typename Fn>
hmf_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const hmf::ConfigError& e) {
        std::string msg = e.what();
        for (const auto& issue : e.issues()) {
            msg += "\n  ";
            if (!issue.path.empty()) msg += issue.path + ": ";
            msg += issue.message;
            if (issue.line > 0) msg += " (line " + std::to_string(issue.line) + ")";
        }
        g_last_error = msg;
        return HMF_CONFIG_ERROR;
    } catch (const hmf::Error& e) {
        return record(e, status_of(e));
    } catch (const std::exception& e) {
        return record(e, HMF_INVALID_ARGUMENT);
    }
}

template <typename Fn>
auto guarded_ptr(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

hmf_status copy_out(const std::string& s, char* buf, size_t buflen) {
    if (!buf || buflen == 0 || s.size() + 1 > buflen) {
        g_last_error = "output buffer too small (" + std::to_string(s.size() + 1) + " bytes needed)";
        return HMF_INVALID_ARGUMENT;
    }
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return HMF_OK;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ordered_json report_json(const hmf::CheckReport& rep) {
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

} // namespace

extern "C" {

struct hmf_space {
    hmf::TargetSpace space;
};
struct hmf_domain {
    std::shared_ptr<const hmf::MeshDomain> domain;
};
struct hmf_state {
    hmf::MapState state;
};

const char* hmf_version(void) { return hmf::tool_version(); }
const char* hmf_last_error(void) { return g_last_error.c_str(); }
void hmf_string_free(char* s) { std::free(s); }

hmf_space* hmf_space_euclidean(int dim) {
    return guarded_ptr([&]() { return new hmf_space{hmf::TargetSpace::euclidean(dim)}; });
}

hmf_space* hmf_space_tripod(double leg_length) {
    return guarded_ptr([&]() { return new hmf_space{hmf::TargetSpace::tripod(leg_length)}; });
}

hmf_space* hmf_space_hyperbolic(void) {
    return guarded_ptr([]() { return new hmf_space{hmf::TargetSpace::hyperbolic_plane()}; });
}

hmf_space* hmf_space_tree(const char* const* vertices, size_t n_vertices, const char* const* edge_a,
                          const char* const* edge_b, const double* edge_length, size_t n_edges) {
    return guarded_ptr([&]() {
        std::vector<std::string> names(vertices, vertices + n_vertices);
        std::vector<hmf::TreeEdgeSpec> edges;
        for (size_t k = 0; k < n_edges; ++k) edges.push_back({edge_a[k], edge_b[k], edge_length[k]});
        return new hmf_space{hmf::TargetSpace::metric_tree(std::move(names), std::move(edges))};
    });
}

hmf_space* hmf_space_product2(const hmf_space* a, const hmf_space* b) {
    return guarded_ptr([&]() -> hmf_space* {
        if (!a || !b) throw hmf::Error(hmf::Errc::invalid_argument, "product factors must be non-NULL");
        return new hmf_space{hmf::TargetSpace::product({a->space, b->space})};
    });
}

void hmf_space_free(hmf_space* space) { delete space; }

hmf_status hmf_distance(const hmf_space* space, const char* p, const char* q, double* out) {
    return guarded([&]() {
        *out = space->space.distance(space->space.decode_point(p), space->space.decode_point(q));
        return HMF_OK;
    });
}

hmf_status hmf_geodesic_point(const hmf_space* space, const char* p, const char* q, double t, char* buf,
                              size_t buflen) {
    return guarded([&]() {
        hmf::Point g =
            space->space.geodesic_point(space->space.decode_point(p), space->space.decode_point(q), t);
        return copy_out(space->space.encode_point(g), buf, buflen);
    });
}

hmf_status hmf_weighted_barycenter(const hmf_space* space, const char* const* points,
                                   const double* weights, size_t n, double tol, char* buf, size_t buflen) {
    return guarded([&]() {
        std::vector<hmf::Point> pts;
        for (size_t i = 0; i < n; ++i) pts.push_back(space->space.decode_point(points[i]));
        std::vector<double> w(weights, weights + n);
        hmf::Point b = space->space.weighted_barycenter(pts, w, tol);
        return copy_out(space->space.encode_point(b), buf, buflen);
    });
}

hmf_status hmf_project_to_ball(const hmf_space* space, const char* p, const char* center, double radius,
                               char* buf, size_t buflen) {
    return guarded([&]() {
        hmf::Point out = space->space.project_to_ball(space->space.decode_point(p),
                                                      space->space.decode_point(center), radius);
        return copy_out(space->space.encode_point(out), buf, buflen);
    });
}

hmf_status hmf_comparison_residuals(const hmf_space* space, const char* P, const char* Q, const char* R,
                                    const char* S, double lambda, double mu, double t, double out[5]) {
    return guarded([&]() {
        auto res = space->space.comparison_residuals(space->space.decode_point(P),
                                                     space->space.decode_point(Q),
                                                     space->space.decode_point(R),
                                                     space->space.decode_point(S), lambda, mu, t);
        for (int i = 0; i < 5; ++i) out[i] = res[i];
        return HMF_OK;
    });
}

hmf_domain* hmf_domain_build(const char* kind, int n, double length) {
    return guarded_ptr([&]() {
        return new hmf_domain{hmf::build_domain(hmf::domain_kind_from_string(kind), n, length)};
    });
}

void hmf_domain_free(hmf_domain* domain) { delete domain; }
int hmf_domain_vertex_count(const hmf_domain* domain) { return domain->domain->vertex_count(); }
int hmf_domain_boundary_count(const hmf_domain* domain) {
    return static_cast<int>(domain->domain->boundary.size());
}
double hmf_domain_spacing(const hmf_domain* domain) { return domain->domain->spacing; }

hmf_state* hmf_state_create(const hmf_domain* domain, const hmf_space* space, const char* const* points,
                            size_t n_points, const char* const* psi, size_t n_psi) {
    return guarded_ptr([&]() -> hmf_state* {
        std::vector<hmf::Point> pts;
        for (size_t i = 0; i < n_points; ++i) pts.push_back(space->space.decode_point(points[i]));
        std::optional<std::vector<hmf::Point>> boundary;
        if (psi) {
            boundary = std::vector<hmf::Point>();
            for (size_t i = 0; i < n_psi; ++i) boundary->push_back(space->space.decode_point(psi[i]));
        }
        return new hmf_state{
            hmf::MapState(domain->domain, space->space, std::move(pts), std::move(boundary))};
    });
}

void hmf_state_free(hmf_state* state) { delete state; }

hmf_status hmf_state_get_point(const hmf_state* state, int vertex, char* buf, size_t buflen) {
    return guarded([&]() {
        if (vertex < 0 || vertex >= state->state.domain->vertex_count())
            throw hmf::Error(hmf::Errc::invalid_argument, "vertex index out of range");
        return copy_out(state->state.space.encode_point(state->state.values[vertex]), buf, buflen);
    });
}

hmf_status hmf_energy(const hmf_state* state, double* total) {
    return guarded([&]() {
        *total = hmf::energy(state->state).total;
        return HMF_OK;
    });
}

hmf_status hmf_l2_distance(const hmf_state* a, const hmf_state* b, double* out) {
    return guarded([&]() {
        *out = hmf::l2_distance(a->state, b->state);
        return HMF_OK;
    });
}

hmf_state* hmf_resolvent(const hmf_state* u0, double h, double tol, int max_sweeps) {
    return guarded_ptr(
        [&]() { return new hmf_state{hmf::resolvent(u0->state, h, tol, max_sweeps)}; });
}

hmf_state* hmf_crandall_liggett(const hmf_state* u0, double t, int m, double tol, int max_sweeps) {
    return guarded_ptr(
        [&]() { return new hmf_state{hmf::crandall_liggett(u0->state, t, m, tol, max_sweeps)}; });
}

hmf_status hmf_run_scenario(const char* config_path, const char* out_dir, char** summary_json) {
    return guarded([&]() {
        hmf::ScenarioConfig cfg = hmf::parse_config_file(config_path);
        hmf::RunArtifacts artifacts = hmf::run_scenario(cfg, out_dir);
        if (summary_json) {
            ordered_json j;
            j["scenario"] = cfg.name;
            j["all_pass"] = artifacts.all_pass;
            j["reports"] = ordered_json::array();
            for (const auto& rep : artifacts.reports) j["reports"].push_back(report_json(rep));
            j["files"] = artifacts.files_written;
            *summary_json = dup_string(j.dump(2));
        }
        return artifacts.all_pass ? HMF_OK : HMF_CHECK_FAILED;
    });
}

hmf_status hmf_verify_suite(const char* suite, uint64_t seed, const char* out_dir, char** summary_json) {
    return guarded([&]() {
        auto reports = hmf::verify_suite(suite, seed);
        bool all_pass = true;
        for (const auto& rep : reports) all_pass = all_pass && rep.pass;
        if (out_dir && *out_dir)
            hmf::write_reports_json(reports, out_dir, std::string("verify_") + suite + ".json");
        if (summary_json) {
            ordered_json j;
            j["suite"] = suite;
            j["seed"] = seed;
            j["all_pass"] = all_pass;
            j["reports"] = ordered_json::array();
            for (const auto& rep : reports) j["reports"].push_back(report_json(rep));
            *summary_json = dup_string(j.dump(2));
        }
        return all_pass ? HMF_OK : HMF_CHECK_FAILED;
    });
}

hmf_status hmf_oracle(const char* case_name, const char* params, const char* out_dir, char** path_out) {
    return guarded([&]() {
        std::map<std::string, std::string> kv;
        if (params) {
            std::istringstream ss(params);
            std::string tok;
            while (ss >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos)
                    throw hmf::Error(hmf::Errc::invalid_argument,
                                     "oracle parameters must be k=v pairs, got '" + tok + "'");
                kv[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
        }
        std::string path = hmf::oracle(case_name, kv, out_dir);
        if (path_out) *path_out = dup_string(path);
        return HMF_OK;
    });
}

} // extern "C"
