// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include "hmflow/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmf {

namespace {

void fill_stats(CheckReport& rep, const std::vector<double>& residuals) {
    rep.count = static_cast<long>(residuals.size());
    if (residuals.empty()) {
        rep.min = rep.mean = rep.max = 0.0;
        return;
    }
    double lo = residuals[0], hi = residuals[0], acc = 0.0;
    for (double r : residuals) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        acc += r;
    }
    rep.min = lo;
    rep.max = hi;
    rep.mean = acc / static_cast<double>(residuals.size());
}

// uniform grid step of a trace; throws if the grid is not uniform
double uniform_step(const FlowTrace& trace) {
    if (trace.size() < 2) throw Error(Errc::invalid_argument, "check needs at least two recorded times");
    double s = trace.times[1] - trace.times[0];
    for (int k = 1; k < trace.size(); ++k)
        if (std::fabs(trace.times[k] - trace.times[k - 1] - s) > 1e-9 * std::max(1.0, s))
            throw Error(Errc::invalid_argument, "check needs a uniform time grid");
    return s;
}

double integer_power(double base, int p) {
    double out = 1.0;
    for (int k = 0; k < p; ++k) out *= base;
    return out;
}

ScalarField squared_distance_field(const MapState& u, const MapState& v) {
    ScalarField w(u.domain, 0.0);
    for (int i = 0; i < u.domain->vertex_count(); ++i) {
        double d = u.space.distance(u.values[i], v.values[i]);
        w[i] = d * d;
    }
    return w;
}

} // namespace

CheckReport CheckReport::lower_bound(std::string check, std::string anchor, double tolerance,
                                     const std::vector<double>& residuals) {
    CheckReport rep;
    rep.check = std::move(check);
    rep.anchor = std::move(anchor);
    rep.tolerance = tolerance;
    fill_stats(rep, residuals);
    rep.pass = !residuals.empty() && rep.min >= -tolerance;
    return rep;
}

CheckReport CheckReport::upper_bound(std::string check, std::string anchor, double tolerance,
                                     const std::vector<double>& residuals) {
    CheckReport rep;
    rep.check = std::move(check);
    rep.anchor = std::move(anchor);
    rep.tolerance = tolerance;
    fill_stats(rep, residuals);
    rep.pass = !residuals.empty() && rep.max <= tolerance;
    return rep;
}

ScalarField r_density(const MapState& u, const MapState& v) {
    if (u.domain != v.domain || !u.space.same_space(v.space))
        throw Error(Errc::domain_mismatch, "r_density needs matching domain and target");
    const MeshDomain& dom = *u.domain;
    ScalarField out(u.domain, 0.0);
    std::vector<double> acc(dom.vertex_count(), 0.0);
    for (const auto& e : dom.edges) {
        double du = u.space.distance(u.values[e.i], u.values[e.j]);
        double dv = v.space.distance(v.values[e.i], v.values[e.j]);
        double contrib = e.weight * (du - dv) * (du - dv);
        acc[e.i] += contrib;
        acc[e.j] += contrib;
    }
    for (int i = 0; i < dom.vertex_count(); ++i) out[i] = acc[i] / (2.0 * dom.measure[i]);
    return out;
}

PhiInterpolationResult phi_interpolation_residuals(const MapState& u, const MapState& v,
                                                   const ScalarField& phi) {
    if (u.domain != v.domain || !u.space.same_space(v.space))
        throw Error(Errc::domain_mismatch, "phi_interpolation needs matching domain and target");
    if (phi.domain != u.domain) throw Error(Errc::domain_mismatch, "phi lives on a different domain");
    const MeshDomain& dom = *u.domain;
    for (int i = 0; i < dom.vertex_count(); ++i) {
        if (!(phi[i] >= 0.0 && phi[i] <= 1.0))
            throw Error(Errc::invalid_argument, "phi must take values in [0,1]");
        if (dom.is_boundary[i] && phi[i] != 0.0)
            throw Error(Errc::invalid_argument, "phi must vanish on the boundary");
    }

    const TargetSpace& Y = u.space;
    const int n = dom.vertex_count();
    std::vector<Point> u_phi(u.values), v_phi(v.values);
    std::vector<double> w(n, 0.0); // w_i = d^2(u_i, v_i)
    for (int i = 0; i < n; ++i) {
        double d = Y.distance(u.values[i], v.values[i]);
        w[i] = d * d;
        u_phi[i] = Y.geodesic_point(u.values[i], v.values[i], phi[i]);
        v_phi[i] = Y.geodesic_point(u.values[i], v.values[i], 1.0 - phi[i]);
    }

    PhiInterpolationResult out;
    out.per_edge.reserve(dom.edges.size());
    for (const auto& e : dom.edges) {
        double du = Y.distance(u.values[e.i], u.values[e.j]);
        double dv = Y.distance(v.values[e.i], v.values[e.j]);
        double dup = Y.distance(u_phi[e.i], u_phi[e.j]);
        double dvp = Y.distance(v_phi[e.i], v_phi[e.j]);
        double delta_e = dup * dup + dvp * dvp - du * du - dv * dv;

        double fi = phi[e.i], fj = phi[e.j];
        double gap = dv - du;
        double rhs_e = -(fi - fj) * ((1.0 - 2.0 * fi) * w[e.i] - (1.0 - 2.0 * fj) * w[e.j]) -
                       ((fi - fi * fi) + (fj - fj * fj)) * gap * gap + std::fabs(fi - fj) * gap * gap;
        out.per_edge.push_back(e.weight * (rhs_e - delta_e));
        out.lhs += e.weight * delta_e;
        out.rhs += e.weight * rhs_e;
    }
    out.residual = out.rhs - out.lhs;
    return out;
}

std::vector<ScalarField> default_test_functions(const std::shared_ptr<const MeshDomain>& dom) {
    std::vector<ScalarField> tests;
    for (int c : dom->interior) {
        ScalarField hat(dom, 0.0);
        hat[c] = 1.0;
        for (const auto& [j, w] : dom->adjacency[c])
            if (!dom->is_boundary[j]) hat[j] = 0.5;
        tests.push_back(std::move(hat));
    }
    ScalarField bulk(dom, 0.0);
    for (int i : dom->interior) bulk[i] = 1.0;
    tests.push_back(std::move(bulk));
    return tests;
}

namespace {

// Pair every test with a per-vertex integrand; appends one residual per test.
void pair_tests(const MeshDomain& dom, const std::vector<ScalarField>& tests,
                const std::vector<double>& integrand, std::vector<double>& out) {
    for (const auto& phi : tests) {
        double acc = 0.0;
        for (int i = 0; i < dom.vertex_count(); ++i)
            if (phi[i] != 0.0) acc += dom.measure[i] * phi[i] * integrand[i];
        out.push_back(acc);
    }
}

} // namespace

CheckReport subsolution_residuals(const FlowTrace& u_trace, const FlowTrace& v_trace,
                                  const std::vector<ScalarField>& tests, double tolerance) {
    if (u_trace.size() != v_trace.size())
        throw Error(Errc::domain_mismatch, "subsolution check needs traces on the same grid");
    for (int k = 0; k < u_trace.size(); ++k)
        if (std::fabs(u_trace.times[k] - v_trace.times[k]) > 1e-12)
            throw Error(Errc::domain_mismatch, "subsolution check needs traces on the same grid");
    double s = uniform_step(u_trace);
    const MeshDomain& dom = *u_trace.initial.domain;

    std::vector<double> residuals;
    ScalarField w_prev = squared_distance_field(u_trace.states[0], v_trace.states[0]);
    for (int k = 1; k < u_trace.size(); ++k) {
        ScalarField w_cur = squared_distance_field(u_trace.states[k], v_trace.states[k]);
        ScalarField lap = laplacian(w_cur);
        ScalarField R = r_density(u_trace.states[k], v_trace.states[k]);
        std::vector<double> integrand(dom.vertex_count());
        for (int i = 0; i < dom.vertex_count(); ++i)
            integrand[i] = lap[i] - (w_cur[i] - w_prev[i]) / s - 2.0 * R[i];
        pair_tests(dom, tests, integrand, residuals);
        w_prev = std::move(w_cur);
    }
    return CheckReport::lower_bound("subsolution", "distance-squared subsolution inequality", tolerance,
                                    residuals);
}

DistanceSubsolutionReports distance_subsolution_residuals(const FlowTrace& trace, const Point& P,
                                                          const std::vector<ScalarField>& tests,
                                                          double tolerance) {
    const MeshDomain& dom = *trace.initial.domain;
    const TargetSpace& Y = trace.initial.space;
    Y.validate(P);
    double s = uniform_step(trace);

    std::vector<double> res_sq, res_plain;
    std::vector<double> dist_prev(dom.vertex_count());
    for (int i = 0; i < dom.vertex_count(); ++i) dist_prev[i] = Y.distance(P, trace.states[0].values[i]);
    for (int k = 1; k < trace.size(); ++k) {
        std::vector<double> dist(dom.vertex_count());
        for (int i = 0; i < dom.vertex_count(); ++i) dist[i] = Y.distance(P, trace.states[k].values[i]);
        ScalarField w2(trace.initial.domain, 0.0), w1(trace.initial.domain, 0.0);
        for (int i = 0; i < dom.vertex_count(); ++i) {
            w2[i] = dist[i] * dist[i];
            w1[i] = dist[i];
        }
        ScalarField lap2 = laplacian(w2), lap1 = laplacian(w1);
        ScalarField e = energy(trace.states[k]).density;
        std::vector<double> integrand2(dom.vertex_count()), integrand1(dom.vertex_count());
        for (int i = 0; i < dom.vertex_count(); ++i) {
            integrand2[i] = lap2[i] - (w2[i] - dist_prev[i] * dist_prev[i]) / s - 2.0 * e[i];
            integrand1[i] = lap1[i] - (w1[i] - dist_prev[i]) / s;
        }
        pair_tests(dom, tests, integrand2, res_sq);
        pair_tests(dom, tests, integrand1, res_plain);
        dist_prev = std::move(dist);
    }
    DistanceSubsolutionReports out;
    out.squared = CheckReport::lower_bound("distance-subsolution-squared",
                                           "squared distance-to-point subsolution inequality", tolerance,
                                           res_sq);
    out.plain = CheckReport::lower_bound("distance-subsolution",
                                         "distance-to-point supercaloric inequality", tolerance, res_plain);
    return out;
}

ScalarField lip_field(const MapState& u, double radius) {
    const MeshDomain& dom = *u.domain;
    ScalarField out(u.domain, 0.0);
    for (int i = 0; i < dom.vertex_count(); ++i) {
        const auto& dist = dom.distances_from(i);
        double best = 0.0;
        for (int j = 0; j < dom.vertex_count(); ++j) {
            if (j == i || dist[j] > radius || dist[j] == 0.0) continue;
            best = std::max(best, u.space.distance(u.values[i], u.values[j]) / dist[j]);
        }
        out[i] = best;
    }
    return out;
}

LipReport lip_report(const FlowTrace& trace, double t_star, const std::vector<double>& radii) {
    const MeshDomain& dom = *trace.initial.domain;
    for (double r : radii)
        if (r < dom.spacing - 1e-12)
            throw Error(Errc::invalid_argument, "lip radii must be at least the graph spacing");
    LipReport rep;
    rep.radii = radii;
    double smallest = radii.empty() ? dom.spacing : *std::min_element(radii.begin(), radii.end());

    for (int k = 0; k < trace.size(); ++k) {
        if (trace.times[k] < t_star - 1e-12) continue;
        rep.report_times.push_back(trace.times[k]);
        std::vector<std::vector<double>> per_radius;
        for (double r : radii) per_radius.push_back(lip_field(trace.states[k], r).values);
        rep.spatial.push_back(std::move(per_radius));
    }

    rep.temporal_sup.assign(dom.vertex_count(), 0.0);
    for (int a = 0; a < trace.size(); ++a) {
        if (trace.times[a] < t_star - 1e-12) continue;
        for (int b = a + 1; b < trace.size(); ++b) {
            double s = trace.times[b] - trace.times[a];
            for (int i = 0; i < dom.vertex_count(); ++i) {
                double ratio =
                    trace.initial.space.distance(trace.states[a].values[i], trace.states[b].values[i]) / s;
                rep.temporal_sup[i] = std::max(rep.temporal_sup[i], ratio);
            }
        }
    }
    for (double v : rep.temporal_sup) rep.fitted_time_constant = std::max(rep.fitted_time_constant, v);
    for (size_t k = 0; k < rep.spatial.size(); ++k) {
        for (size_t r = 0; r < radii.size(); ++r) {
            if (radii[r] != smallest) continue;
            for (double v : rep.spatial[k][r]) rep.fitted_space_constant = std::max(rep.fitted_space_constant, v);
        }
    }
    return rep;
}

double temporal_ratio(const FlowTrace& trace, int vertex, int t_index, double s) {
    int j = trace.index_of_time(trace.times[t_index] + s);
    if (j < 0) throw Error(Errc::invalid_argument, "temporal_ratio: t + s is not a recorded time");
    return trace.initial.space.distance(trace.states[t_index].values[vertex],
                                        trace.states[j].values[vertex]) /
           s;
}

double mean_value_residual(const std::vector<ScalarField>& g_series,
                           const std::vector<ScalarField>& f_series, double series_dt, int x0,
                           int t0_index, int steps_back) {
    if (g_series.size() != f_series.size() || g_series.empty())
        throw Error(Errc::invalid_argument, "mean_value_residual needs matching nonempty series");
    if (t0_index - steps_back < 0 || t0_index >= static_cast<int>(g_series.size()) || steps_back < 1)
        throw Error(Errc::invalid_argument, "mean_value_residual: series too short for the requested window");
    const double s = steps_back * series_dt;

    // H_s applied to g(., t0 - s) by implicit Euler steps of the series spacing
    ScalarField evolved = heat_evolve(g_series[t0_index - steps_back], s, steps_back);
    double lead = evolved[x0] - g_series[t0_index][x0];

    // trapezoid over tau_j = j dt of H_tau [f(., t0 - tau)](x0)
    double integral = 0.0;
    for (int j = 0; j <= steps_back; ++j) {
        double weight = (j == 0 || j == steps_back) ? 0.5 : 1.0;
        double value;
        if (j == 0) {
            value = f_series[t0_index][x0];
        } else {
            ScalarField hf = heat_evolve(f_series[t0_index - j], j * series_dt, j);
            value = hf[x0];
        }
        integral += weight * series_dt * value;
    }
    return lead - integral;
}

HJField hj_flow(const FlowTrace& trace, double eps, int p, double K, double M0, double T) {
    if (p < 2) throw Error(Errc::invalid_argument, "hj_flow needs integer p >= 2");
    if (!(M0 > 0.0) || !(T > 0.0)) throw Error(Errc::invalid_argument, "hj_flow needs M0 > 0 and T > 0");
    const MeshDomain& dom = *trace.initial.domain;
    HJField out;
    out.eps = eps;
    out.p = p;
    out.K = K;
    out.M0 = M0;
    out.T = T;
    double R = dom.confinement_radius();
    out.eps0 = std::exp(-2.0 * std::fabs(K) * T) * R * R / (8.0 * M0);
    out.c1 = std::sqrt(6.0 * M0 * std::exp(2.0 * std::fabs(K) * T));
    if (!(eps > 0.0) || eps >= out.eps0)
        throw Error(Errc::invalid_argument, "hj_flow needs eps in (0, eps0); eps0 = " + std::to_string(out.eps0));
    const double ball = out.c1 * std::sqrt(eps);
    out.admissible = dom.vertices_with_clear_ball(ball);
    if (out.admissible.empty())
        throw Error(Errc::invalid_argument, "hj_flow: no vertex has a boundary-free search ball");

    out.times = trace.times;
    out.values.assign(trace.size(),
                      std::vector<double>(dom.vertex_count(), std::numeric_limits<double>::quiet_NaN()));
    const TargetSpace& Y = trace.initial.space;
    for (int k = 0; k < trace.size(); ++k) {
        double scale = std::exp(-static_cast<double>(p) * K * trace.times[k]);
        double denom = static_cast<double>(p) * integer_power(eps, p - 1);
        for (int i : out.admissible) {
            const auto& dist = dom.distances_from(i);
            double best = 0.0; // j = i contributes 0
            double best_dist = 0.0;
            for (int j = 0; j < dom.vertex_count(); ++j) {
                if (dist[j] > ball || j == i) continue;
                double val = scale * integer_power(dist[j], p) / denom -
                             Y.distance(trace.states[k].values[i], trace.states[k].values[j]);
                if (val < best) {
                    best = val;
                    best_dist = dist[j];
                }
            }
            out.values[k][i] = best;
            out.max_minimizer_distance = std::max(out.max_minimizer_distance, best_dist);
        }
    }
    return out;
}

HJCheckSet hj_checks(const FlowTrace& trace, const std::vector<double>& eps_list, int p, double K,
                     double M0, double T, const std::vector<ScalarField>& tests,
                     double supersolution_tolerance, double gradient_tolerance) {
    if (eps_list.empty()) throw Error(Errc::invalid_argument, "hj_checks needs at least one eps");
    const MeshDomain& dom = *trace.initial.domain;
    double s = uniform_step(trace);
    HJCheckSet out;

    // (a) supersolution weak residual at the first (largest) eps
    {
        HJField hj = hj_flow(trace, eps_list.front(), p, K, M0, T);
        std::vector<double> residuals;
        for (int k = 1; k < trace.size(); ++k) {
            // extend by zero off the admissible set; tests are assumed to be
            // supported there for a faithful reading
            ScalarField f(trace.initial.domain, 0.0);
            ScalarField fp(trace.initial.domain, 0.0);
            for (int i : hj.admissible) {
                f[i] = hj.values[k][i];
                fp[i] = hj.values[k - 1][i];
            }
            ScalarField lap = laplacian(f);
            std::vector<double> integrand(dom.vertex_count(), 0.0);
            for (int i : hj.admissible) integrand[i] = lap[i] - (f[i] - fp[i]) / s;
            std::vector<double> per_test;
            pair_tests(dom, tests, integrand, per_test);
            residuals.insert(residuals.end(), per_test.begin(), per_test.end());
        }
        out.supersolution = CheckReport::upper_bound(
            "hj-supersolution", "inf-convolution supersolution of the heat equation",
            supersolution_tolerance, residuals);
    }

    // (b) gradient bound over every eps
    {
        std::vector<double> residuals;
        double amp = 2.0 * std::exp(2.0 * std::fabs(K) * T);
        for (double eps : eps_list) {
            HJField hj = hj_flow(trace, eps, p, K, M0, T);
            double ball = hj.c1 * std::sqrt(eps);
            for (int k = 0; k < trace.size(); ++k) {
                ScalarField lip = lip_field(trace.states[k], ball);
                for (int i : hj.admissible)
                    residuals.push_back(amp * lip[i] * lip[i] - (-hj.values[k][i] / eps));
            }
        }
        out.gradient_bound = CheckReport::lower_bound(
            "hj-gradient-bound", "inf-convolution bound by the local Lipschitz constant",
            gradient_tolerance, residuals);
    }

    // (c) limit trend: f_{eps,p}/eps -> -(e^{Kt} lip)^q / q along decreasing eps
    {
        double q = static_cast<double>(p) / (p - 1.0);
        for (double eps : eps_list) {
            HJField hj = hj_flow(trace, eps, p, K, M0, T);
            double gap = 0.0;
            for (int k = 0; k < trace.size(); ++k) {
                ScalarField lip = lip_field(trace.states[k], dom.spacing * (1.0 + 1e-12));
                double scale = std::exp(K * trace.times[k]);
                for (int i : hj.admissible) {
                    double target = -std::pow(scale * lip[i], q) / q;
                    gap = std::max(gap, std::fabs(hj.values[k][i] / eps - target));
                }
            }
            out.trend_gaps.push_back(gap);
        }
        std::vector<double> diffs;
        for (size_t k = 1; k < out.trend_gaps.size(); ++k)
            diffs.push_back(out.trend_gaps[k - 1] - out.trend_gaps[k]);
        if (diffs.empty()) diffs.push_back(0.0);
        out.limit_trend = CheckReport::lower_bound(
            "hj-limit-trend", "small-eps limit of the inf-convolution encodes the Lipschitz constant", 1e-12,
            diffs);
    }
    return out;
}

CheckReport bochner_residuals(const FlowTrace& trace, double K, const std::vector<ScalarField>& tests,
                              double tolerance) {
    const MeshDomain& dom = *trace.initial.domain;
    double s = uniform_step(trace);
    double r = dom.spacing * (1.0 + 1e-12);

    std::vector<double> residuals;
    ScalarField lip_prev = lip_field(trace.states[0], r);
    for (int k = 1; k < trace.size(); ++k) {
        ScalarField lip = lip_field(trace.states[k], r);
        ScalarField lip_sq(trace.initial.domain, 0.0);
        for (int i = 0; i < dom.vertex_count(); ++i) lip_sq[i] = lip[i] * lip[i];
        ScalarField lap = laplacian(lip_sq);
        std::vector<double> integrand(dom.vertex_count());
        for (int i = 0; i < dom.vertex_count(); ++i) {
            double grad_sq = 0.0;
            for (const auto& [j, w] : dom.adjacency[i]) grad_sq += w * (lip[j] - lip[i]) * (lip[j] - lip[i]);
            grad_sq /= 2.0 * dom.measure[i];
            double dt = (lip_sq[i] - lip_prev[i] * lip_prev[i]) / s;
            integrand[i] = lap[i] - dt - 2.0 * grad_sq - 2.0 * K * lip_sq[i];
        }
        pair_tests(dom, tests, integrand, residuals);
        lip_prev = std::move(lip);
    }
    return CheckReport::lower_bound("bochner", "Eells-Sampson Bochner inequality", tolerance, residuals);
}

} // namespace hmf
