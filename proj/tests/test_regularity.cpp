// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hmflow/regularity.hpp"

using namespace hmf;

namespace {

MapState scalar_state(std::shared_ptr<const MeshDomain> dom, std::vector<double> vals, bool pin = false) {
    auto r1 = TargetSpace::euclidean(1);
    std::vector<Point> pts;
    for (double v : vals) pts.push_back(Point::euclidean({v}));
    std::optional<std::vector<Point>> psi;
    if (pin) {
        psi = std::vector<Point>();
        for (int b : dom->boundary) psi->push_back(Point::euclidean({vals[b]}));
    }
    return MapState(std::move(dom), r1, std::move(pts), std::move(psi));
}

MapState random_tree_state(std::shared_ptr<const MeshDomain> dom, const TargetSpace& tri, Rng& rng,
                           double scale = 1.0) {
    std::vector<Point> pts;
    for (int i = 0; i < dom->vertex_count(); ++i) pts.push_back(random_point(tri, rng, scale));
    return MapState(std::move(dom), tri, std::move(pts));
}

} // namespace

TEST_CASE("r_density: degenerate, constant-comparator identity, frozen value") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 3, 2.0);
    auto u = scalar_state(dom, {0, 1, 0});
    auto R_same = r_density(u, u);
    for (double v : R_same.values) CHECK(v == 0.0);

    auto v = scalar_state(dom, {0, 0, 0});
    auto R = r_density(u, v);
    CHECK(R[1] == doctest::Approx(1.0).epsilon(1e-15));

    // v constant: R coincides with the energy density of u
    auto tri = TargetSpace::tripod(2.0);
    auto cyc = build_domain(DomainKind::cycle, 10, 10.0);
    Rng rng(3);
    auto tu = random_tree_state(cyc, tri, rng);
    std::vector<Point> cvals(cyc->vertex_count(), Point::tree(0, 0.7));
    MapState tv(cyc, tri, cvals);
    auto Rt = r_density(tu, tv);
    auto eu = energy(tu).density;
    for (int i = 0; i < cyc->vertex_count(); ++i) CHECK(Rt[i] == doctest::Approx(eu[i]).epsilon(1e-14));
}

TEST_CASE("r_density bound: 0 <= R <= 2 e_u + 2 e_v") {
    auto tri = TargetSpace::tripod(2.0);
    auto cyc = build_domain(DomainKind::cycle, 12, 12.0);
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto u = random_tree_state(cyc, tri, rng);
        auto v = random_tree_state(cyc, tri, rng);
        auto R = r_density(u, v);
        auto eu = energy(u).density, ev = energy(v).density;
        for (int i = 0; i < cyc->vertex_count(); ++i) {
            CHECK(R[i] >= 0.0);
            CHECK(R[i] <= 2.0 * eu[i] + 2.0 * ev[i] + 1e-12);
        }
    }
}

TEST_CASE("phi interpolation: degenerate cases") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 8, 1.0);
    auto tri = TargetSpace::tripod(2.0);
    Rng rng(11);
    auto u = random_tree_state(dom, tri, rng);
    auto v = random_tree_state(dom, tri, rng);

    ScalarField zero(dom, 0.0);
    auto r0 = phi_interpolation_residuals(u, v, zero);
    CHECK(std::fabs(r0.lhs) <= 1e-12);
    CHECK(std::fabs(r0.residual - r0.rhs) <= 1e-12);

    ScalarField hat(dom, 0.0);
    for (int i : dom->interior) hat[i] = 0.5 * (1.0 - std::fabs(dom->coords[i][0] - 0.5) * 2.0);
    auto ru = phi_interpolation_residuals(u, u, hat);
    CHECK(std::fabs(ru.lhs) <= 1e-12);
    CHECK(ru.residual >= -1e-12);

    ScalarField bad(dom, 0.0);
    bad[0] = 0.5; // nonzero on the boundary
    CHECK_THROWS_AS(phi_interpolation_residuals(u, v, bad), Error);
    ScalarField big(dom, 0.0);
    big[2] = 1.5;
    CHECK_THROWS_AS(phi_interpolation_residuals(u, v, big), Error);
}

TEST_CASE("phi interpolation battery: per-edge residuals nonnegative across variants") {
    std::vector<TargetSpace> zoo{
        TargetSpace::euclidean(2),
        TargetSpace::tripod(2.0),
        TargetSpace::hyperbolic_plane(),
        TargetSpace::product({TargetSpace::tripod(1.0), TargetSpace::euclidean(1)}),
    };
    auto dom = build_domain(DomainKind::interval_dirichlet, 8, 1.0);
    for (const auto& space : zoo) {
        Rng rng(13);
        for (int trial = 0; trial < 250; ++trial) {
            std::vector<Point> a, b;
            for (int i = 0; i < dom->vertex_count(); ++i) {
                a.push_back(random_point(space, rng, 1.0));
                b.push_back(random_point(space, rng, 1.0));
            }
            MapState u(dom, space, a), v(dom, space, b);
            ScalarField phi(dom, 0.0);
            for (int i : dom->interior) phi[i] = rng.uniform();
            auto res = phi_interpolation_residuals(u, v, phi);
            for (double pe : res.per_edge) CHECK(pe >= -1e-9);
            CHECK(res.residual >= -1e-9);
        }
    }
}

TEST_CASE("phi interpolation: Euclidean dense-algebra cross-check") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 8, 1.0);
    auto r2 = TargetSpace::euclidean(2);
    Rng rng(17);
    std::vector<Point> a, b;
    for (int i = 0; i < dom->vertex_count(); ++i) {
        a.push_back(random_point(r2, rng, 1.0));
        b.push_back(random_point(r2, rng, 1.0));
    }
    MapState u(dom, r2, a), v(dom, r2, b);
    ScalarField phi(dom, 0.0);
    for (int i : dom->interior) phi[i] = rng.uniform();

    auto res = phi_interpolation_residuals(u, v, phi);

    // independent expansion: u_phi = (1-phi) u + phi v componentwise
    auto lerp = [&](const Point& pa, const Point& pb, double t) {
        const auto& ca = std::get<EuclideanVec>(pa.value).coords;
        const auto& cb = std::get<EuclideanVec>(pb.value).coords;
        return Point::euclidean({(1 - t) * ca[0] + t * cb[0], (1 - t) * ca[1] + t * cb[1]});
    };
    std::vector<Point> up, vp;
    for (int i = 0; i < dom->vertex_count(); ++i) {
        up.push_back(lerp(a[i], b[i], phi[i]));
        vp.push_back(lerp(a[i], b[i], 1.0 - phi[i]));
    }
    double lhs = energy(MapState(dom, r2, up)).total + energy(MapState(dom, r2, vp)).total -
                 energy(u).total - energy(v).total;
    CHECK(res.lhs == doctest::Approx(lhs).epsilon(1e-10));
    CHECK(res.residual >= -1e-9);
}

TEST_CASE("subsolution: identical traces give zero residuals") {
    auto cyc = build_domain(DomainKind::cycle, 8, 8.0);
    auto tri = TargetSpace::tripod(2.0);
    Rng rng(19);
    auto u0 = random_tree_state(cyc, tri, rng);
    auto trace = flow_run(u0, {0.0, 0.1, 0.2}, 1, 1e-11);
    auto rep = subsolution_residuals(trace, trace, default_test_functions(cyc), 1e-12);
    CHECK(rep.pass);
    CHECK(std::fabs(rep.min) <= 1e-12);
    CHECK(std::fabs(rep.max) <= 1e-12);
}

TEST_CASE("subsolution: Euclidean pointwise identity on a 5-vertex instance") {
    // semi-discrete identity: (Delta w - w_dot - 2R)_i
    //   = sum_j w_ij (|e_j - e_i|^2 - (|du|-|dv|)^2_e) / mu_i,  e = u - v
    auto dom = build_domain(DomainKind::cycle, 5, 5.0);
    auto r2 = TargetSpace::euclidean(2);
    Rng rng(23);
    std::vector<Point> a, b;
    for (int i = 0; i < 5; ++i) {
        a.push_back(random_point(r2, rng, 1.0));
        b.push_back(random_point(r2, rng, 1.0));
    }
    MapState u(dom, r2, a), v(dom, r2, b);

    auto coords = [&](const MapState& m, int i) { return std::get<EuclideanVec>(m.values[i].value).coords; };
    ScalarField w(dom, 0.0);
    for (int i = 0; i < 5; ++i) {
        double d = r2.distance(u.values[i], v.values[i]);
        w[i] = d * d;
    }
    auto lap_w = laplacian(w);
    auto R = r_density(u, v);

    // w_dot for the semi-discrete flow udot = Delta u, vdot = Delta v
    for (int i = 0; i < 5; ++i) {
        std::array<double, 2> lap_e{0.0, 0.0};
        std::array<double, 2> e_i{coords(u, i)[0] - coords(v, i)[0], coords(u, i)[1] - coords(v, i)[1]};
        double rhs = 0.0;
        for (const auto& [j, wij] : dom->adjacency[i]) {
            std::array<double, 2> e_j{coords(u, j)[0] - coords(v, j)[0], coords(u, j)[1] - coords(v, j)[1]};
            lap_e[0] += wij * (e_j[0] - e_i[0]);
            lap_e[1] += wij * (e_j[1] - e_i[1]);
            double diff2 = (e_j[0] - e_i[0]) * (e_j[0] - e_i[0]) + (e_j[1] - e_i[1]) * (e_j[1] - e_i[1]);
            double du = r2.distance(u.values[i], u.values[j]);
            double dv = r2.distance(v.values[i], v.values[j]);
            rhs += wij * (diff2 - (du - dv) * (du - dv));
        }
        lap_e[0] /= dom->measure[i];
        lap_e[1] /= dom->measure[i];
        rhs /= dom->measure[i];
        double w_dot = 2.0 * (e_i[0] * lap_e[0] + e_i[1] * lap_e[1]);
        double lhs = lap_w[i] - w_dot - 2.0 * R[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        CHECK(lhs >= -1e-12);
    }
}

TEST_CASE("subsolution: tripod twin flows, deficit shrinks with the step") {
    auto cyc = build_domain(DomainKind::cycle, 16, 16.0);
    auto tri = TargetSpace::tripod(2.0);
    auto make_initial = [&](int phase) {
        std::vector<Point> pts;
        for (int i = 0; i < 16; ++i) {
            int leg = (i + phase) % 3;
            double off = 0.3 + 1.1 * std::fabs(std::sin(2.0 * M_PI * (i + phase) / 16.0));
            pts.push_back(Point::tree(leg, off));
        }
        return MapState(cyc, tri, pts);
    };
    auto u0 = make_initial(0);
    auto v0 = make_initial(5);
    auto tests = default_test_functions(cyc);

    auto run = [&](double s) {
        std::vector<double> times;
        for (int k = 0; static_cast<double>(k) * s <= 0.5 + 1e-12; ++k) times.push_back(k * s);
        auto ut = flow_run(u0, times, 1, 1e-12);
        auto vt = flow_run(v0, times, 1, 1e-12);
        return subsolution_residuals(ut, vt, tests, 1.0);
    };
    auto coarse = run(1.0 / 16.0);
    auto fine = run(1.0 / 32.0);
    double deficit_c = std::max(0.0, -coarse.min);
    double deficit_f = std::max(0.0, -fine.min);
    CHECK(deficit_c <= 2.0 * (1.0 / 16.0)); // first order in the step
    if (deficit_c > 1e-10) {
        CHECK(deficit_f / deficit_c >= 0.3);
        CHECK(deficit_f / deficit_c <= 0.7);
    }

    // grid mismatch is a typed error
    auto short_trace = flow_run(u0, {0.0, 0.25}, 1, 1e-11);
    auto long_trace = flow_run(v0, {0.0, 0.25, 0.5}, 1, 1e-11);
    CHECK_THROWS_AS(subsolution_residuals(short_trace, long_trace, tests, 1.0), Error);
}

TEST_CASE("distance subsolution: constant trace and flowing tripod") {
    auto cyc = build_domain(DomainKind::cycle, 8, 8.0);
    auto tri = TargetSpace::tripod(2.0);
    Point P = tri.tree_vertex_point(tri.tree_vertex("o"));
    std::vector<Point> cfix(8, P);
    MapState constant(cyc, tri, cfix);
    auto flat = flow_run(constant, {0.0, 0.1, 0.2}, 1, 1e-11);
    auto reps = distance_subsolution_residuals(flat, P, default_test_functions(cyc), 1e-12);
    CHECK(reps.squared.pass);
    CHECK(std::fabs(reps.squared.min) <= 1e-12);
    CHECK(reps.plain.pass);

    Rng rng(29);
    auto u0 = random_tree_state(cyc, tri, rng);
    double s = 1.0 / 32.0;
    std::vector<double> times;
    for (int k = 0; k <= 16; ++k) times.push_back(k * s);
    auto trace = flow_run(u0, times, 1, 1e-12);
    auto moving = distance_subsolution_residuals(trace, P, default_test_functions(cyc), 0.5 * s);
    CHECK(moving.squared.min >= -0.5 * s);
    CHECK(moving.plain.min >= -0.5 * s);

    // Euclidean identity: P = 0, d^2 = u^2, equality in the squared report
    auto dom = build_domain(DomainKind::cycle, 6, 6.0);
    std::vector<double> vals{0.3, -0.2, 0.8, -0.5, 0.1, 0.4};
    auto eu = scalar_state(dom, vals);
    auto etrace = flow_run(eu, {0.0, 0.01, 0.02}, 16, 1e-13);
    auto erep = distance_subsolution_residuals(etrace, Point::euclidean({0.0}),
                                               default_test_functions(dom), 5e-3);
    CHECK(erep.squared.pass);
    CHECK(erep.plain.pass);
}

TEST_CASE("lip_report: constants, linear map, Fourier decay against the eigen oracle") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 9, 1.0);
    std::vector<double> linear;
    for (int i = 0; i < 9; ++i) linear.push_back(dom->coords[i][0]);
    auto u0 = scalar_state(dom, linear, true); // u(x) = x is harmonic, flow is stationary
    auto trace = flow_run(u0, {0.0, 0.1, 0.2, 0.3}, 1, 1e-12);
    auto rep = lip_report(trace, 0.05, {dom->spacing, 2.0 * dom->spacing, 0.5});
    for (const auto& per_radius : rep.spatial)
        for (const auto& field : per_radius)
            for (double v : field) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.fitted_space_constant == doctest::Approx(1.0).epsilon(1e-10));
    // stationary flow: no temporal movement
    CHECK(rep.fitted_time_constant <= 1e-9);

    // cycle Fourier mode: temporal ratio at max-amplitude vertex tracks lambda_1 e^{-lambda_1 t}
    auto cyc = build_domain(DomainKind::cycle, 32, 32.0);
    std::vector<double> mode(32);
    for (int i = 0; i < 32; ++i) mode[i] = std::cos(2.0 * M_PI * i / 32.0);
    auto m0 = scalar_state(cyc, mode);
    std::vector<double> times;
    for (int k = 0; k <= 48; ++k) times.push_back(k / 128.0);
    auto mtrace = flow_run(m0, times, 1, 1e-12);
    double lambda = 2.0 - 2.0 * std::cos(2.0 * M_PI / 32.0);
    int t_idx = mtrace.index_of_time(13.0 / 128.0);
    REQUIRE(t_idx >= 0);
    double ratio = temporal_ratio(mtrace, 0, t_idx, 0.125);
    double oracle = lambda * std::exp(-lambda * 13.0 / 128.0);
    CHECK(std::fabs(ratio - oracle) <= 0.1 * oracle);

    CHECK_THROWS_AS(lip_report(trace, 0.05, {0.01}), Error); // radius below spacing
}

TEST_CASE("mean_value_residual: constants, heat consistency, subsolution composition") {
    auto cyc = build_domain(DomainKind::cycle, 12, 12.0);
    const double dt = 0.05;

    std::vector<ScalarField> g_const(9, ScalarField(cyc, 0.7));
    std::vector<ScalarField> f_zero(9, ScalarField(cyc, 0.0));
    CHECK(std::fabs(mean_value_residual(g_const, f_zero, dt, 3, 6, 4)) <= 1e-12);

    // g evolved by the same implicit Euler scheme reproduces itself
    Rng rng(31);
    ScalarField seed(cyc);
    for (int i = 0; i < 12; ++i) seed[i] = rng.uniform(-1, 1);
    std::vector<ScalarField> g_series{seed};
    for (int k = 1; k < 9; ++k) g_series.push_back(heat_evolve(g_series.back(), dt, 1));
    CHECK(std::fabs(mean_value_residual(g_series, f_zero, dt, 5, 8, 6)) <= 1e-9);

    // g = -d^2(P, u), f = -2 e_u along a tripod flow: residual <= C dt
    auto tri = TargetSpace::tripod(2.0);
    auto u0 = random_tree_state(cyc, tri, rng);
    std::vector<double> times;
    for (int k = 0; k <= 8; ++k) times.push_back(k * dt);
    auto trace = flow_run(u0, times, 2, 1e-12);
    Point P = tri.tree_vertex_point(tri.tree_vertex("o"));
    std::vector<ScalarField> g_dist, f_energy;
    for (int k = 0; k < trace.size(); ++k) {
        ScalarField g(cyc, 0.0), f(cyc, 0.0);
        auto e = energy(trace.states[k]).density;
        for (int i = 0; i < 12; ++i) {
            double d = tri.distance(P, trace.states[k].values[i]);
            g[i] = -d * d;
            f[i] = -2.0 * e[i];
        }
        g_dist.push_back(std::move(g));
        f_energy.push_back(std::move(f));
    }
    double res = mean_value_residual(g_dist, f_energy, dt, 4, 8, 6);
    CHECK(res <= 10.0 * dt);

    CHECK_THROWS_AS(mean_value_residual(g_dist, f_energy, dt, 4, 2, 6), Error);
}

TEST_CASE("hj_flow: constant map, exact closed forms, range and ball invariants") {
    auto r1 = TargetSpace::euclidean(1);
    auto dom = build_domain(DomainKind::interval_dirichlet, 257, 1.0);

    // stationary linear field u(x) = x with pinned boundary
    std::vector<Point> pts;
    for (int i = 0; i < dom->vertex_count(); ++i) pts.push_back(Point::euclidean({dom->coords[i][0]}));
    std::optional<std::vector<Point>> psi =
        std::vector<Point>{Point::euclidean({0.0}), Point::euclidean({1.0})};
    MapState u0(dom, r1, pts, psi);
    auto trace = flow_run(u0, {0.0, 0.01, 0.02}, 1, 1e-12);

    const double M0 = 0.5, T = 1.0, K = 0.0;
    const double eps = 8.0 * dom->spacing; // 1/32, an exact multiple of the spacing
    for (int p : {2, 3, 4}) {
        auto hj = hj_flow(trace, eps, p, K, M0, T);
        double q = static_cast<double>(p) / (p - 1.0);
        for (int k = 0; k < trace.size(); ++k)
            for (int i : hj.admissible) {
                CHECK(std::fabs(hj.values[k][i] - (-eps / q)) <= 1e-12);
                CHECK(hj.values[k][i] <= 0.0);
                CHECK(hj.values[k][i] >= -2.0 * M0);
            }
        CHECK(hj.max_minimizer_distance <= hj.c1 * std::sqrt(eps) + 1e-12);
    }

    // constant map: the minimum sits at j = i and vanishes
    std::vector<Point> cpts(dom->vertex_count(), Point::euclidean({0.25}));
    MapState c0(dom, r1, cpts, std::optional<std::vector<Point>>{
                                   std::vector<Point>{Point::euclidean({0.25}), Point::euclidean({0.25})}});
    auto ctrace = flow_run(c0, {0.0, 0.01}, 1, 1e-12);
    auto chj = hj_flow(ctrace, eps, 2, K, M0, T);
    for (int i : chj.admissible) CHECK(chj.values[0][i] == 0.0);

    // eps out of range and bad p are typed errors
    CHECK_THROWS_AS(hj_flow(trace, 1.0, 2, K, M0, T), Error);
    CHECK_THROWS_AS(hj_flow(trace, eps, 1, K, M0, T), Error);
}

TEST_CASE("hj_flow: ball-restricted search agrees with a full scan") {
    auto cyc = build_domain(DomainKind::cycle, 16, 16.0);
    auto tri = TargetSpace::tripod(2.0);
    Rng rng(37);
    auto u0 = random_tree_state(cyc, tri, rng, 1.0);
    auto trace = flow_run(u0, {0.0, 0.05, 0.1}, 1, 1e-11);
    double M0 = 2.0, T = 0.5, K = 0.0;
    double eps = 0.45;
    auto hj = hj_flow(trace, eps, 2, K, M0, T);
    for (int k = 0; k < trace.size(); ++k) {
        for (int i : hj.admissible) {
            double full = 0.0;
            for (int j = 0; j < 16; ++j) {
                if (j == i) continue;
                double dist = cyc->graph_distance(i, j);
                double val = dist * dist / (2.0 * eps) -
                             tri.distance(trace.states[k].values[i], trace.states[k].values[j]);
                full = std::min(full, val);
            }
            CHECK(hj.values[k][i] == doctest::Approx(full).epsilon(1e-14));
        }
    }
}

TEST_CASE("hj_checks: gradient bound, supersolution smoke, limit trend on a linear field") {
    auto r1 = TargetSpace::euclidean(1);
    auto dom = build_domain(DomainKind::interval_dirichlet, 257, 1.0);
    std::vector<Point> pts;
    for (int i = 0; i < dom->vertex_count(); ++i) pts.push_back(Point::euclidean({dom->coords[i][0]}));
    std::optional<std::vector<Point>> psi =
        std::vector<Point>{Point::euclidean({0.0}), Point::euclidean({1.0})};
    MapState u0(dom, r1, pts, psi);
    auto trace = flow_run(u0, {0.0, 0.01, 0.02}, 1, 1e-12);

    double delta = dom->spacing;
    std::vector<double> eps_list{12.0 * delta, 8.0 * delta, 4.0 * delta};
    auto checks = hj_checks(trace, eps_list, 2, 0.0, 0.5, 1.0, default_test_functions(dom), 1.0, 1e-9);
    CHECK(checks.gradient_bound.pass);
    // lip = 1 and v_eps/eps = 1/2, so the bound holds with slack 2 - 1/2
    CHECK(checks.gradient_bound.min == doctest::Approx(1.5).epsilon(1e-10));
    // linear field: f/eps = -1/q exactly at every eps; gaps identically zero
    for (double g : checks.trend_gaps) CHECK(std::fabs(g) <= 1e-12);
    CHECK(checks.limit_trend.pass);

    // tripod flow on a cycle: supersolution residual shrinks when (s, delta) halve
    auto tri = TargetSpace::tripod(2.0);
    auto coarse_dom = build_domain(DomainKind::cycle, 16, 16.0);
    auto fine_dom = build_domain(DomainKind::cycle, 32, 16.0);
    auto fill = [&](std::shared_ptr<const MeshDomain> d) {
        std::vector<Point> v;
        int n = d->vertex_count();
        for (int i = 0; i < n; ++i) {
            double x = d->coords[i][0];
            v.push_back(Point::tree(static_cast<int>(x * 3.0 / 16.0) % 3,
                                    0.3 + 1.2 * std::fabs(std::sin(2.0 * M_PI * x / 16.0))));
        }
        return MapState(std::move(d), tri, v);
    };
    auto run_super = [&](std::shared_ptr<const MeshDomain> d, double s) {
        auto u = fill(d);
        std::vector<double> times;
        for (int k = 0; k <= 4; ++k) times.push_back(0.2 + k * s);
        auto tr = flow_run(u, times, 1, 1e-11);
        auto cs = hj_checks(tr, {0.4}, 2, 0.0, 2.0, 1.0, default_test_functions(d), 1e9, 1e-9);
        return cs.supersolution.max;
    };
    double coarse = run_super(coarse_dom, 0.05);
    double fine = run_super(fine_dom, 0.025);
    CHECK((fine < coarse || fine <= 0.0));
}

TEST_CASE("bochner: stationary harmonic map gives exactly zero; K enters linearly") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 9, 1.0);
    std::vector<double> linear;
    for (int i = 0; i < 9; ++i) linear.push_back(dom->coords[i][0]);
    auto u0 = scalar_state(dom, linear, true);
    auto trace = flow_run(u0, {0.0, 0.1, 0.2}, 1, 1e-12);
    auto tests = default_test_functions(dom);
    auto rep = bochner_residuals(trace, 0.0, tests, 1e-12);
    CHECK(rep.pass);
    CHECK(std::fabs(rep.min) <= 1e-12);
    CHECK(std::fabs(rep.max) <= 1e-12);

    // K linearity: residual difference is exactly 2 sum mu phi l^2 = 2 sum mu phi
    auto repK = bochner_residuals(trace, -1.0, tests, 10.0);
    ScalarField lip1(dom, 1.0);
    // compare the minima achieved per test on the stationary trace
    double shift = repK.min - rep.min;
    double smallest_mass = std::numeric_limits<double>::infinity();
    for (const auto& phi : tests) {
        double m = 0.0;
        for (int i = 0; i < dom->vertex_count(); ++i) m += dom->measure[i] * phi[i];
        smallest_mass = std::min(smallest_mass, m);
    }
    CHECK(shift == doctest::Approx(2.0 * smallest_mass).epsilon(1e-10));
}
