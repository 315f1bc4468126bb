// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include "hmflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmf {

double resolvent_objective(const MapState& u, const MapState& u0, double h) {
    double d = l2_distance(u, u0);
    return 0.5 * energy(u).total + d * d / (2.0 * h);
}

MapState resolvent(const MapState& u0, double h, double tol, int max_sweeps, SweepDiagnostics* diag,
                   std::vector<double>* objective_log) {
    if (!(h > 0.0)) throw Error(Errc::invalid_argument, "resolvent needs h > 0");
    if (!u0.domain->boundary.empty() && !u0.psi)
        throw Error(Errc::invalid_argument, "resolvent needs a pinned boundary map on Dirichlet domains");
    const MeshDomain& dom = *u0.domain;
    MapState u = u0;

    const double bary_tol = std::min(1e-12, 0.1 * tol);
    std::vector<Point> pts;
    std::vector<double> wts;
    double displacement = 0.0;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        displacement = 0.0;
        for (int i = 0; i < dom.vertex_count(); ++i) {
            if (u.pinned(i)) continue;
            pts.clear();
            wts.clear();
            for (const auto& [j, w] : dom.adjacency[i]) {
                pts.push_back(u.values[j]);
                wts.push_back(w);
            }
            pts.push_back(u0.values[i]);
            wts.push_back(dom.measure[i] / h);
            Point next = u.space.weighted_barycenter(pts, wts, bary_tol);
            displacement = std::max(displacement, u.space.distance(u.values[i], next));
            u.values[i] = std::move(next);
        }
        if (objective_log) objective_log->push_back(resolvent_objective(u, u0, h));
        if (displacement < tol) {
            if (diag) {
                diag->sweeps = sweep;
                diag->final_displacement = displacement;
                diag->objective = resolvent_objective(u, u0, h);
            }
            return u;
        }
    }
    throw SweepCapError("resolvent exceeded the sweep cap (" + std::to_string(max_sweeps) +
                            " sweeps, displacement " + std::to_string(displacement) + ")",
                        std::move(u), displacement);
}

MapState crandall_liggett(const MapState& u0, double t, int m, double tol, int max_sweeps) {
    if (t < 0.0) throw Error(Errc::invalid_argument, "crandall_liggett needs t >= 0");
    if (m < 1) throw Error(Errc::invalid_argument, "crandall_liggett needs m >= 1");
    if (t == 0.0) return u0;
    const double h = t / m;
    MapState u = u0;
    for (int step = 0; step < m; ++step) {
        try {
            u = resolvent(u, h, tol, max_sweeps);
        } catch (SweepCapError& e) {
            throw SweepCapError("step " + std::to_string(step + 1) + "/" + std::to_string(m) + ": " +
                                    e.what(),
                                e.last_iterate(), e.displacement());
        } catch (ConvergenceError& e) {
            throw ConvergenceError("step " + std::to_string(step + 1) + "/" + std::to_string(m) + ": " +
                                       e.what(),
                                   e.last_iterate(), e.residual());
        }
    }
    return u;
}

int FlowTrace::index_of_time(double t, double tol) const {
    for (int k = 0; k < size(); ++k)
        if (std::fabs(times[k] - t) <= tol) return k;
    return -1;
}

FlowTrace flow_run(const MapState& u0, const std::vector<double>& times, int m_per_interval, double tol,
                   int max_sweeps, double h_max) {
    if (times.empty()) throw Error(Errc::invalid_argument, "flow_run needs a nonempty time grid");
    if (times.front() < 0.0) throw Error(Errc::invalid_argument, "flow_run needs times >= 0");
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw Error(Errc::invalid_argument, "flow_run needs a strictly increasing time grid");
    if (m_per_interval < 1) throw Error(Errc::invalid_argument, "flow_run needs m_per_interval >= 1");

    auto steps_for = [&](double dt) {
        int m = m_per_interval;
        if (h_max > 0.0) m = std::max(m, static_cast<int>(std::ceil(dt / h_max - 1e-12)));
        return m;
    };

    FlowTrace trace{u0, {}, {}, {}, {}, {}};
    auto record = [&](double t, MapState state, SweepDiagnostics diag, double h) {
        trace.energies.push_back(energy(state).total);
        trace.times.push_back(t);
        trace.states.push_back(std::move(state));
        trace.diagnostics.push_back(diag);
        trace.inner_steps.push_back(h);
    };

    MapState current = u0;
    double prev_t = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
        if (k == 0 && times[0] == 0.0) {
            record(0.0, current, SweepDiagnostics{}, 0.0);
            continue;
        }
        double dt = times[k] - prev_t;
        int m = steps_for(dt);
        const double h = dt / m;
        SweepDiagnostics diag;
        MapState stepped = current;
        for (int j = 0; j < m; ++j) stepped = resolvent(stepped, h, tol, max_sweeps, &diag);
        current = std::move(stepped);
        record(times[k], current, diag, h);
        prev_t = times[k];
    }
    return trace;
}

double evi_residual(const FlowTrace& trace, const MapState& v, int t_index, double s) {
    if (t_index < 1 || t_index >= trace.size())
        throw Error(Errc::invalid_argument, "evi_residual needs 1 <= t_index < trace size");
    const MapState& ut = trace.states[t_index];
    if (!v.same_boundary(ut)) throw Error(Errc::domain_mismatch, "evi_residual: mismatched boundary data");
    int j = trace.index_of_time(trace.times[t_index] - s);
    if (j < 0) throw Error(Errc::invalid_argument, "evi_residual: t - s is not a recorded time");
    double ev = energy(v).total;
    double dt = l2_distance(v, ut);
    double dprev = l2_distance(v, trace.states[j]);
    return s * (ev - trace.energies[t_index]) - (dt * dt - dprev * dprev);
}

double semigroup_residual(const MapState& u0, double t, double s, int m, double tol, int max_sweeps) {
    if (!(t > 0.0) || s < 0.0) throw Error(Errc::invalid_argument, "semigroup_residual needs t > 0, s >= 0");
    MapState via = crandall_liggett(crandall_liggett(u0, s, m, tol, max_sweeps), t, m, tol, max_sweeps);
    int m_direct = std::max(1, static_cast<int>(std::lround(m * (t + s) / t)));
    MapState direct = crandall_liggett(u0, t + s, m_direct, tol, max_sweeps);
    return l2_distance(direct, via);
}

double confinement_check(const FlowTrace& trace, const Point& P0, double M0) {
    const MapState& u0 = trace.initial;
    u0.space.validate(P0);
    for (const auto& p : u0.values)
        if (u0.space.distance(p, P0) > M0 + 1e-12)
            throw Error(Errc::invalid_argument,
                        "confinement_check: initial map leaves the ball, the check is vacuous");
    double excess = -std::numeric_limits<double>::infinity();
    for (const auto& state : trace.states)
        for (const auto& p : state.values)
            excess = std::max(excess, state.space.distance(p, P0) - M0);
    return excess;
}

double resolvent_perturbation_margin(const MapState& J, const MapState& u0, double h, int trials,
                                     double size, Rng& rng) {
    double base = resolvent_objective(J, u0, h);
    double margin = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        MapState probe = J;
        for (int i = 0; i < J.domain->vertex_count(); ++i) {
            if (probe.pinned(i)) continue;
            Point dir = random_point(J.space, rng, 1.0);
            double d = J.space.distance(probe.values[i], dir);
            if (d <= size) continue;
            probe.values[i] = J.space.geodesic_point(probe.values[i], dir, size / d);
        }
        margin = std::min(margin, resolvent_objective(probe, u0, h) - base);
    }
    return margin;
}

} // namespace hmf
