// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "hmflow/oracles.hpp"
#include "hmflow/scenario.hpp"

namespace hmf {

namespace {

struct NamedSpace {
    std::string label;
    TargetSpace space;
    double scale;
};

std::vector<NamedSpace> comparison_zoo(Rng& rng) {
    std::vector<NamedSpace> zoo;
    zoo.push_back({"euclidean-r2", TargetSpace::euclidean(2), 1.2});
    zoo.push_back({"euclidean-r3", TargetSpace::euclidean(3), 1.2});
    zoo.push_back({"tripod", TargetSpace::tripod(2.0), 1.5});
    // random 20-edge tree: vertex k+1 hangs off a uniformly chosen earlier vertex
    {
        std::vector<std::string> names{"v0"};
        std::vector<TreeEdgeSpec> edges;
        for (int k = 1; k <= 20; ++k) {
            names.push_back("v" + std::to_string(k));
            int parent = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            edges.push_back({names[parent], names[k], rng.uniform(0.5, 2.0)});
        }
        zoo.push_back({"random-tree-20", TargetSpace::metric_tree(names, edges), 1.5});
    }
    zoo.push_back({"hyperboloid", TargetSpace::hyperbolic_plane(), 1.5});
    zoo.push_back({"tree-x-r", TargetSpace::product({TargetSpace::tripod(1.5), TargetSpace::euclidean(1)}),
                   1.2});
    return zoo;
}

void set_scenario(std::vector<CheckReport>& reports, size_t from, const std::string& label,
                  std::uint64_t seed) {
    for (size_t i = from; i < reports.size(); ++i) {
        reports[i].scenario = label;
        reports[i].seed = seed;
    }
}

MapState interval_scalar_state(std::shared_ptr<const MeshDomain> dom, const std::vector<double>& vals,
                               bool pin_zero) {
    auto r1 = TargetSpace::euclidean(1);
    std::vector<Point> pts;
    for (double v : vals) pts.push_back(Point::euclidean({v}));
    std::optional<std::vector<Point>> psi;
    if (pin_zero) psi = std::vector<Point>(dom->boundary.size(), Point::euclidean({0.0}));
    return MapState(std::move(dom), r1, std::move(pts), std::move(psi));
}

double scalar_of(const MapState& u, int i) { return std::get<EuclideanVec>(u.values[i].value).coords[0]; }

} // namespace

std::vector<CheckReport> verify_cat0(std::uint64_t seed, int quadruples) {
    std::vector<CheckReport> reports;
    Rng zoo_rng(seed);
    for (auto& [label, space, scale] : comparison_zoo(zoo_rng)) {
        size_t start = reports.size();
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);

        std::vector<double> cn, q1, q2, q3, q4;
        for (int it = 0; it < quadruples; ++it) {
            Point P = random_point(space, rng, scale), Q = random_point(space, rng, scale);
            Point R = random_point(space, rng, scale), S = random_point(space, rng, scale);
            auto res = space.comparison_residuals(P, Q, R, S, rng.uniform(0.01, 0.99),
                                                  rng.uniform(0.01, 0.99), rng.uniform());
            cn.push_back(res[0]);
            q1.push_back(res[1]);
            q2.push_back(res[2]);
            q3.push_back(res[3]);
            q4.push_back(res[4]);
        }
        reports.push_back(CheckReport::lower_bound("cn", "CN comparison inequality", 1e-9, cn));
        reports.push_back(CheckReport::lower_bound("quad-1", "quadrilateral comparison (1)", 1e-9, q1));
        reports.push_back(CheckReport::lower_bound("quad-2", "quadrilateral comparison (2)", 1e-9, q2));
        reports.push_back(CheckReport::lower_bound("quad-3", "quadrilateral comparison (3)", 1e-9, q3));
        reports.push_back(CheckReport::lower_bound("quad-4", "quadrilateral comparison (4)", 1e-9, q4));

        std::vector<double> sym, tri, geo, bary, proj;
        for (int it = 0; it < quadruples; ++it) {
            Point p = random_point(space, rng, scale), q = random_point(space, rng, scale);
            Point r = random_point(space, rng, scale);
            double dpq = space.distance(p, q);
            sym.push_back(-std::fabs(dpq - space.distance(q, p)));
            tri.push_back(space.distance(p, r) <= dpq + space.distance(q, r) + 1e-12
                              ? 0.0
                              : dpq + space.distance(q, r) + 1e-12 - space.distance(p, r));
            double a = rng.uniform(), b = rng.uniform();
            geo.push_back(-std::fabs(space.distance(space.geodesic_point(p, q, a),
                                                    space.geodesic_point(p, q, b)) -
                                     std::fabs(a - b) * dpq));
        }
        for (int it = 0; it < 200; ++it) {
            int count = 2 + static_cast<int>(rng.below(4));
            std::vector<Point> pts;
            std::vector<double> w;
            double W = 0.0;
            for (int i = 0; i < count; ++i) {
                pts.push_back(random_point(space, rng, scale));
                w.push_back(rng.uniform(0.1, 2.0));
                W += w.back();
            }
            Point bcenter = space.weighted_barycenter(pts, w, 1e-12);
            double fb = 0.0;
            for (int i = 0; i < count; ++i) {
                double d = space.distance(bcenter, pts[i]);
                fb += w[i] * d * d;
            }
            Point probe = random_point(space, rng, scale);
            double fq = 0.0;
            for (int i = 0; i < count; ++i) {
                double d = space.distance(probe, pts[i]);
                fq += w[i] * d * d;
            }
            double dqb = space.distance(probe, bcenter);
            bary.push_back((fq - fb - W * dqb * dqb) / std::max(1.0, fb) + 1e-6);

            Point center = random_point(space, rng, 0.5 * scale);
            double radius = rng.uniform(0.1, scale);
            Point pp = random_point(space, rng, scale), qq = random_point(space, rng, scale);
            proj.push_back(space.distance(pp, qq) + 1e-10 -
                           space.distance(space.project_to_ball(pp, center, radius),
                                          space.project_to_ball(qq, center, radius)));
        }
        reports.push_back(CheckReport::lower_bound("metric-symmetry", "metric symmetry", 0.0, sym));
        reports.push_back(CheckReport::lower_bound("metric-triangle", "triangle inequality", 0.0, tri));
        reports.push_back(CheckReport::lower_bound("geodesic-speed", "constant-speed geodesics", 1e-9, geo));
        reports.push_back(
            CheckReport::lower_bound("barycenter-variance", "barycenter variance inequality", 0.0, bary));
        reports.push_back(
            CheckReport::lower_bound("projection-lipschitz", "ball projection is 1-Lipschitz", 0.0, proj));
        set_scenario(reports, start, label, seed);
    }
    return reports;
}

std::vector<CheckReport> verify_flow(std::uint64_t seed) {
    std::vector<CheckReport> reports;
    Rng rng(seed);

    // Euclidean oracle equivalence on the interval, n = 33 with unit spacing
    // (the lowest Dirichlet eigenvalue is ~0.0096, so t = 1 sits in the
    // first-order regime of the implicit scheme for every m in the ladder)
    {
        size_t start = reports.size();
        auto dom = build_domain(DomainKind::interval_dirichlet, 33, 32.0);
        std::vector<double> vals(dom->vertex_count());
        for (double& v : vals) v = rng.uniform(-1.0, 1.0);
        vals.front() = vals.back() = 0.0;
        auto u0 = interval_scalar_state(dom, vals, true);

        double h = 0.25;
        auto j = resolvent(u0, h, 1e-12, 200000);
        auto dense = dense_resolvent_solve(*dom, vals, {0.0, 0.0}, h);
        double gap = 0.0;
        for (int i = 0; i < dom->vertex_count(); ++i)
            gap = std::max(gap, std::fabs(dense[i] - scalar_of(j, i)));
        reports.push_back(CheckReport::upper_bound("resolvent-vs-dense",
                                                   "Euclidean linear-solve equivalence", 1e-8, {gap}));

        auto exact = dense_heat_exact(*dom, vals, 1.0);
        std::vector<double> ratios;
        double prev_err = -1.0;
        bool decreasing = true;
        for (int m : {8, 16, 32, 64}) {
            auto um = crandall_liggett(u0, 1.0, m, 1e-12, 200000);
            double err = 0.0;
            for (int i = 0; i < dom->vertex_count(); ++i)
                err = std::max(err, std::fabs(scalar_of(um, i) - exact[i]));
            if (prev_err > 0.0) {
                decreasing = decreasing && err < prev_err;
                ratios.push_back(prev_err / err);
            }
            prev_err = err;
        }
        CheckReport rep;
        rep.check = "semigroup-rate";
        rep.anchor = "first-order convergence of the iterated resolvent";
        rep.tolerance = 0.0;
        rep.count = static_cast<long>(ratios.size());
        rep.min = *std::min_element(ratios.begin(), ratios.end());
        rep.max = *std::max_element(ratios.begin(), ratios.end());
        rep.mean = (ratios[0] + ratios[1] + ratios[2]) / 3.0;
        rep.pass = decreasing && rep.min >= 1.6 && rep.max <= 2.4;
        reports.push_back(rep);
        set_scenario(reports, start, "interval-n33", seed);
    }

    // exact small-instance closed forms
    {
        size_t start = reports.size();
        auto dom = build_domain(DomainKind::interval_dirichlet, 3, 2.0);
        auto u0 = interval_scalar_state(dom, {0.0, 1.0, 0.0}, true);
        double m1 = scalar_of(crandall_liggett(u0, 1.0, 1, 1e-13, 100000), 1);
        double m2 = scalar_of(crandall_liggett(u0, 1.0, 2, 1e-13, 100000), 1);
        reports.push_back(CheckReport::upper_bound("resolvent-closed-form",
                                                   "implicit step closed form 1/(1+2h)", 1e-12,
                                                   {std::fabs(m1 - 1.0 / 3.0), std::fabs(m2 - 0.25)}));
        set_scenario(reports, start, "interval-n3", seed);
    }

    // semigroup residual decay, Euclidean and tripod targets
    {
        size_t start = reports.size();
        auto dom = build_domain(DomainKind::cycle, 8, 8.0);
        std::vector<double> vals(8);
        for (int i = 0; i < 8; ++i) vals[i] = std::cos(2.0 * M_PI * i / 8.0);
        auto u0 = interval_scalar_state(dom, vals, false);
        double r1 = semigroup_residual(u0, 0.5, 0.25, 8, 1e-12);
        double r2 = semigroup_residual(u0, 0.5, 0.25, 16, 1e-12);
        CheckReport rep;
        rep.check = "semigroup-composition";
        rep.anchor = "semigroup composition property";
        rep.tolerance = 0.0;
        rep.min = r2;
        rep.max = r1;
        rep.mean = 0.5 * (r1 + r2);
        rep.count = 2;
        double ratio = r1 / std::max(r2, 1e-300);
        rep.pass = r2 < r1 && ratio >= 1.6 && ratio <= 2.4;
        reports.push_back(rep);

        auto tri = TargetSpace::tripod(2.0);
        std::vector<Point> tvals;
        Rng trng(seed + 1);
        for (int i = 0; i < 8; ++i) tvals.push_back(random_point(tri, trng, 1.0));
        MapState tv(dom, tri, tvals);
        double t8 = semigroup_residual(tv, 0.5, 0.25, 8, 1e-12);
        double t64 = semigroup_residual(tv, 0.5, 0.25, 64, 1e-12);
        reports.push_back(CheckReport::upper_bound("semigroup-tripod",
                                                   "semigroup composition property", 0.0,
                                                   {t64 - t8})); // strict decrease
        set_scenario(reports, start, "cycle-n8", seed);
    }
    return reports;
}

std::vector<CheckReport> verify_regularity(std::uint64_t seed) {
    std::vector<CheckReport> reports;

    // interpolation comparison battery, 1e3 triples per target variant
    {
        std::vector<NamedSpace> zoo{
            {"euclidean-r2", TargetSpace::euclidean(2), 1.0},
            {"tripod", TargetSpace::tripod(2.0), 1.0},
            {"hyperboloid", TargetSpace::hyperbolic_plane(), 1.0},
            {"tree-x-r", TargetSpace::product({TargetSpace::tripod(1.0), TargetSpace::euclidean(1)}), 1.0},
        };
        auto dom = build_domain(DomainKind::interval_dirichlet, 8, 1.0);
        for (auto& [label, space, scale] : zoo) {
            size_t start = reports.size();
            Rng rng(seed ^ 0xabcddcba12344321ull);
            std::vector<double> residuals;
            for (int trial = 0; trial < 1000; ++trial) {
                std::vector<Point> a, b;
                for (int i = 0; i < dom->vertex_count(); ++i) {
                    a.push_back(random_point(space, rng, scale));
                    b.push_back(random_point(space, rng, scale));
                }
                MapState u(dom, space, a), v(dom, space, b);
                ScalarField phi(dom, 0.0);
                for (int i : dom->interior) phi[i] = rng.uniform();
                auto res = phi_interpolation_residuals(u, v, phi);
                residuals.insert(residuals.end(), res.per_edge.begin(), res.per_edge.end());
            }
            reports.push_back(CheckReport::lower_bound("phi-interpolation",
                                                       "interpolation energy comparison", 1e-9, residuals));
            set_scenario(reports, start, label, seed);
        }
    }

    // Hamilton-Jacobi p-consistency and gradient bound on the stationary linear field
    {
        size_t start = reports.size();
        auto r1 = TargetSpace::euclidean(1);
        auto dom = build_domain(DomainKind::interval_dirichlet, 257, 1.0);
        std::vector<Point> pts;
        for (int i = 0; i < dom->vertex_count(); ++i) pts.push_back(Point::euclidean({dom->coords[i][0]}));
        std::optional<std::vector<Point>> psi =
            std::vector<Point>{Point::euclidean({0.0}), Point::euclidean({1.0})};
        MapState u0(dom, r1, pts, psi);
        auto trace = flow_run(u0, {0.0, 0.01, 0.02}, 1, 1e-12);

        const double eps = 8.0 * dom->spacing;
        std::vector<double> exact, grad;
        for (int p : {2, 3, 4}) {
            auto hj = hj_flow(trace, eps, p, 0.0, 0.5, 1.0);
            double q = static_cast<double>(p) / (p - 1.0);
            auto closed = grid_hj_closedform(dom->vertex_count(), dom->spacing, 1.0, eps, p);
            for (int k = 0; k < trace.size(); ++k)
                for (int i : hj.admissible) {
                    exact.push_back(1e-12 - std::fabs(hj.values[k][i] - (-eps / q)));
                    exact.push_back(1e-12 - std::fabs(hj.values[k][i] - closed[i]));
                }
            auto set = hj_checks(trace, {eps}, p, 0.0, 0.5, 1.0, default_test_functions(dom), 1e9, 1e-9);
            grad.push_back(set.gradient_bound.min);
        }
        reports.push_back(CheckReport::lower_bound(
            "hj-p-consistency", "inf-convolution closed form -eps/q on linear data", 0.0, exact));
        reports.push_back(CheckReport::lower_bound(
            "hj-gradient-bound", "inf-convolution bound by the local Lipschitz constant", 1e-9, grad));
        set_scenario(reports, start, "linear-interval-n257", seed);
    }

    // gradient bound and range on a tripod flow over a cycle
    {
        size_t start = reports.size();
        auto dom = build_domain(DomainKind::cycle, 16, 16.0);
        auto tri = TargetSpace::tripod(2.0);
        Rng rng(seed + 7);
        std::vector<Point> pts;
        for (int i = 0; i < 16; ++i) pts.push_back(random_point(tri, rng, 1.5));
        MapState u0(dom, tri, pts);
        std::vector<double> times;
        for (int k = 0; k <= 8; ++k) times.push_back(0.05 * k);
        auto trace = flow_run(u0, times, 1, 1e-11);
        const double M0 = 2.0, T = 1.0;
        auto set = hj_checks(trace, {0.5, 0.25}, 2, 0.0, M0, T, default_test_functions(dom), 1e9, 1e-9);
        reports.push_back(set.gradient_bound);
        std::vector<double> range;
        for (double eps : {0.5, 0.25}) {
            auto hj = hj_flow(trace, eps, 2, 0.0, M0, T);
            for (int k = 0; k < trace.size(); ++k)
                for (int i : hj.admissible) {
                    range.push_back(-hj.values[k][i]);                // <= 0 side
                    range.push_back(hj.values[k][i] + 2.0 * M0);      // >= -2 M0 side
                }
            range.push_back(hj.c1 * std::sqrt(eps) - hj.max_minimizer_distance);
        }
        reports.push_back(
            CheckReport::lower_bound("hj-range", "inf-convolution range and search radius", 1e-12, range));
        set_scenario(reports, start, "tripod-cycle-n16", seed);
    }

    // Bochner: stationary harmonic map has an exactly vanishing residual
    {
        size_t start = reports.size();
        auto dom = build_domain(DomainKind::interval_dirichlet, 9, 1.0);
        std::vector<double> linear;
        for (int i = 0; i < 9; ++i) linear.push_back(dom->coords[i][0]);
        auto u0 = interval_scalar_state(dom, linear, false);
        std::optional<std::vector<Point>> psi =
            std::vector<Point>{Point::euclidean({0.0}), Point::euclidean({1.0})};
        MapState pinned(dom, TargetSpace::euclidean(1), u0.values, psi);
        auto trace = flow_run(pinned, {0.0, 0.05, 0.1}, 1, 1e-12);
        auto rep = bochner_residuals(trace, 0.0, default_test_functions(dom), 1e-12);
        reports.push_back(rep);
        set_scenario(reports, start, "stationary-linear", seed);
    }
    return reports;
}

std::vector<CheckReport> verify_suite(const std::string& suite, std::uint64_t seed) {
    if (suite == "cat0") return verify_cat0(seed, 10000);
    if (suite == "flow") return verify_flow(seed);
    if (suite == "regularity") return verify_regularity(seed);
    if (suite == "all") {
        auto all = verify_cat0(seed, 10000);
        auto f = verify_flow(seed);
        auto r = verify_regularity(seed);
        all.insert(all.end(), f.begin(), f.end());
        all.insert(all.end(), r.begin(), r.end());
        return all;
    }
    throw Error(Errc::invalid_argument, "unknown suite '" + suite + "' (cat0 | flow | regularity | all)");
}

} // namespace hmf
