// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hmflow/flow.hpp"

using namespace hmf;

namespace {

MapState scalar_state(std::shared_ptr<const MeshDomain> dom, std::vector<double> vals, bool pin_zero = false) {
    auto r1 = TargetSpace::euclidean(1);
    std::vector<Point> pts;
    for (double v : vals) pts.push_back(Point::euclidean({v}));
    std::optional<std::vector<Point>> psi;
    if (pin_zero) psi = std::vector<Point>(dom->boundary.size(), Point::euclidean({0.0}));
    return MapState(std::move(dom), r1, std::move(pts), std::move(psi));
}

std::vector<double> scalar_values(const MapState& u) {
    std::vector<double> out;
    for (const auto& p : u.values) out.push_back(std::get<EuclideanVec>(p.value).coords[0]);
    return out;
}

// Dense oracle: one implicit Euler step solves (M/h + L) u = M u0 / h on the
// interior, boundary rows pinned to psi.
std::vector<double> dense_resolvent(const MeshDomain& dom, const std::vector<double>& u0,
                                    const std::vector<double>& psi_bdry, double h) {
    const int n = dom.vertex_count();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (dom.is_boundary[i]) {
            A(i, i) = 1.0;
        } else {
            A(i, i) = dom.measure[i] / h;
            rhs[i] = dom.measure[i] * u0[i] / h;
            for (const auto& [j, w] : dom.adjacency[i]) {
                A(i, i) += w;
                A(i, j) -= w;
            }
        }
    }
    for (size_t k = 0; k < dom.boundary.size(); ++k) rhs[dom.boundary[k]] = psi_bdry[k];
    Eigen::VectorXd x = A.partialPivLu().solve(rhs);
    return std::vector<double>(x.data(), x.data() + n);
}

// Dense oracle: exact heat semigroup u(t) = exp(t Delta) u0 with pinned zero
// boundary, via the symmetric eigen-decomposition of the interior block.
std::vector<double> dense_heat_exact(const MeshDomain& dom, const std::vector<double>& u0, double t) {
    const auto& interior = dom.interior;
    const int ni = static_cast<int>(interior.size());
    std::vector<int> pos(dom.vertex_count(), -1);
    for (int k = 0; k < ni; ++k) pos[interior[k]] = k;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(ni, ni); // M^{-1/2} L M^{-1/2}
    for (int k = 0; k < ni; ++k) {
        int i = interior[k];
        double diag = 0.0;
        for (const auto& [j, w] : dom.adjacency[i]) {
            diag += w;
            if (pos[j] >= 0)
                B(k, pos[j]) -= w / std::sqrt(dom.measure[i] * dom.measure[j]);
        }
        B(k, k) += diag / dom.measure[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    Eigen::VectorXd y(ni);
    for (int k = 0; k < ni; ++k) y[k] = std::sqrt(dom.measure[interior[k]]) * u0[interior[k]];
    Eigen::VectorXd z = eig.eigenvectors().transpose() * y;
    for (int k = 0; k < ni; ++k) z[k] *= std::exp(-t * eig.eigenvalues()[k]);
    Eigen::VectorXd back = eig.eigenvectors() * z;
    std::vector<double> out(dom.vertex_count(), 0.0);
    for (int k = 0; k < ni; ++k) out[interior[k]] = back[k] / std::sqrt(dom.measure[interior[k]]);
    return out;
}

} // namespace

TEST_CASE("resolvent: interval closed forms") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 3, 2.0);
    auto u0 = scalar_state(dom, {0, 1, 0}, true);

    SweepDiagnostics diag;
    auto j1 = resolvent(u0, 1.0, 1e-12, 10000, &diag);
    CHECK(scalar_values(j1)[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(diag.sweeps >= 1);

    auto jhalf = resolvent(u0, 0.5, 1e-12);
    CHECK(scalar_values(jhalf)[1] == doctest::Approx(0.5).epsilon(1e-10));

    // constant map equal to psi is a fixed point
    auto fixed = scalar_state(dom, {0, 0, 0}, true);
    auto jf = resolvent(fixed, 1.0, 1e-12);
    CHECK(scalar_values(jf) == std::vector<double>{0, 0, 0});

    CHECK_THROWS_AS(resolvent(u0, -1.0, 1e-10), Error);
    // Dirichlet domain without psi is rejected
    auto nopsi = scalar_state(dom, {0, 1, 0}, false);
    CHECK_THROWS_AS(resolvent(nopsi, 1.0, 1e-10), Error);
    // sweep cap carries the last iterate
    try {
        resolvent(u0, 1.0, 1e-12, 1);
        CHECK(false);
    } catch (const SweepCapError& e) {
        CHECK(e.last_iterate().values.size() == 3);
        CHECK(e.displacement() > 0.0);
    }
}

TEST_CASE("resolvent: objective decreases sweep by sweep and matches the dense solve") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 9, 1.0);
    Rng rng(3);
    std::vector<double> vals(dom->vertex_count());
    for (double& v : vals) v = rng.uniform(-1, 1);
    vals.front() = vals.back() = 0.0;
    auto u0 = scalar_state(dom, vals, true);

    std::vector<double> objectives;
    auto j = resolvent(u0, 0.2, 1e-13, 10000, nullptr, &objectives);
    for (size_t k = 1; k < objectives.size(); ++k) CHECK(objectives[k] <= objectives[k - 1] + 1e-14);

    auto oracle = dense_resolvent(*dom, vals, {0.0, 0.0}, 0.2);
    auto got = scalar_values(j);
    for (int i = 0; i < dom->vertex_count(); ++i) CHECK(std::fabs(got[i] - oracle[i]) <= 1e-10);
}

TEST_CASE("resolvent minimality certificate") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 9, 1.0);
    auto tri = TargetSpace::tripod(2.0);
    Rng rng(7);
    std::vector<Point> vals;
    for (int i = 0; i < dom->vertex_count(); ++i) vals.push_back(random_point(tri, rng, 1.0));
    std::optional<std::vector<Point>> psi =
        std::vector<Point>{vals.front(), vals.back()};
    MapState u0(dom, tri, vals, psi);
    double h = 0.3, tol = 1e-10;
    auto j = resolvent(u0, h, tol);
    double margin = resolvent_perturbation_margin(j, u0, h, 64, 10.0 * tol, rng);
    CHECK(margin >= -1e-12);

    // the minimality certificate: objective at J is below the objective at u0,
    // hence D^2(J, u0) <= h (E[u0] - E[J]) up to tolerance slack
    double dj = l2_distance(j, u0);
    CHECK(dj * dj <= h * (energy(u0).total - energy(j).total) + 1e-9);
}

TEST_CASE("crandall_liggett: closed forms and matrix exponential limit") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 3, 2.0);
    auto u0 = scalar_state(dom, {0, 1, 0}, true);

    auto two = crandall_liggett(u0, 1.0, 2, 1e-13);
    CHECK(scalar_values(two)[1] == doctest::Approx(0.25).epsilon(1e-10));

    // implicit Euler bias: (1 + 2/64)^{-64} - e^{-2} = 3.92e-3
    auto m64 = crandall_liggett(u0, 1.0, 64, 1e-13);
    CHECK(std::fabs(scalar_values(m64)[1] - std::exp(-2.0)) <= 4.5e-3);
    CHECK(scalar_values(m64)[1] == doctest::Approx(std::pow(1.0 + 2.0 / 64.0, -64.0)).epsilon(1e-8));

    auto still = crandall_liggett(u0, 0.0, 4);
    CHECK(scalar_values(still) == scalar_values(u0));

    // errors decay like 1/m against the exact semigroup
    auto oracle = dense_heat_exact(*dom, {0, 1, 0}, 1.0);
    double prev_err = -1.0;
    for (int m : {8, 16, 32, 64}) {
        auto um = crandall_liggett(u0, 1.0, m, 1e-13);
        double err = std::fabs(scalar_values(um)[1] - oracle[1]);
        if (prev_err > 0.0) {
            double ratio = prev_err / err;
            CHECK(ratio >= 1.6);
            CHECK(ratio <= 2.4);
        }
        prev_err = err;
    }
}

TEST_CASE("flow_run: trace structure, Fourier mode vs exact semigroup") {
    auto dom = build_domain(DomainKind::cycle, 8, 8.0);
    std::vector<double> vals(8);
    for (int i = 0; i < 8; ++i) vals[i] = std::cos(2.0 * M_PI * i / 8.0);
    auto u0 = scalar_state(dom, vals);

    auto single = flow_run(u0, {0.0}, 1);
    CHECK(single.size() == 1);
    CHECK(scalar_values(single.states[0]) == vals);

    std::vector<double> times{0.0, 0.25, 0.5, 1.0};
    auto trace = flow_run(u0, times, 8, 1e-12);
    REQUIRE(trace.size() == 4);
    double lambda = 2.0 - 2.0 * std::cos(2.0 * M_PI / 8.0);
    for (int k = 1; k < trace.size(); ++k) {
        auto got = scalar_values(trace.states[k]);
        for (int i = 0; i < 8; ++i) {
            double exact = vals[i] * std::exp(-lambda * times[k]);
            CHECK(std::fabs(got[i] - exact) <= 0.02); // O(1/m) discretization
        }
        CHECK(trace.energies[k] <= trace.energies[k - 1] + 1e-10 * (1.0 + trace.energies[k - 1]));
    }

    CHECK_THROWS_AS(flow_run(u0, {0.5, 0.5}, 1), Error);
    CHECK_THROWS_AS(flow_run(u0, {-1.0, 0.5}, 1), Error);
}

TEST_CASE("flow_run: tripod-valued flow relaxes to the discrete harmonic map") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 9, 1.0);
    auto tri = TargetSpace::tripod(2.0);
    Rng rng(11);
    std::vector<Point> vals;
    for (int i = 0; i < dom->vertex_count(); ++i) vals.push_back(random_point(tri, rng, 1.0));
    std::optional<std::vector<Point>> psi = std::vector<Point>{Point::tree(0, 1.0), Point::tree(1, 1.0)};
    MapState u0(dom, tri, vals, psi);

    auto trace = flow_run(u0, {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}, 4, 1e-11);
    for (int k = 1; k < trace.size(); ++k)
        CHECK(trace.energies[k] <= trace.energies[k - 1] + 1e-10 * (1.0 + trace.energies[k - 1]));

    // direct harmonic minimizer: cyclic sweeps on E alone (no proximal term)
    MapState harmonic = trace.states.back();
    for (int sweep = 0; sweep < 4000; ++sweep) {
        double moved = 0.0;
        for (int i : dom->interior) {
            std::vector<Point> pts;
            std::vector<double> wts;
            for (const auto& [j, w] : dom->adjacency[i]) {
                pts.push_back(harmonic.values[j]);
                wts.push_back(w);
            }
            Point next = tri.weighted_barycenter(pts, wts, 1e-14);
            moved = std::max(moved, tri.distance(next, harmonic.values[i]));
            harmonic.values[i] = next;
        }
        if (moved < 1e-13) break;
    }
    CHECK(l2_distance(trace.states.back(), harmonic) <= 5e-4);
    CHECK(energy(trace.states.back()).total <= energy(harmonic).total + 1e-6);
}

TEST_CASE("evi_residual: frozen example and random comparators") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 3, 2.0);
    auto u0 = scalar_state(dom, {0, 1, 0}, true);
    auto trace = flow_run(u0, {0.0, 1.0}, 1, 1e-13);

    // v = u^t: residual collapses to D^2(u^t, u^{t-s}) >= 0
    double self_res = evi_residual(trace, trace.states[1], 1, 1.0);
    double d = l2_distance(trace.states[1], trace.states[0]);
    CHECK(self_res == doctest::Approx(d * d).epsilon(1e-12));

    // v = 0: s (0 - 2/9) - (1/9 - 1) = 2/3 for the h=1 resolvent step
    auto v = scalar_state(dom, {0, 0, 0}, true);
    CHECK(evi_residual(trace, v, 1, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    Rng rng(13);
    for (int it = 0; it < 200; ++it) {
        auto w = scalar_state(dom, {0.0, rng.uniform(-2, 2), 0.0}, true);
        double res = evi_residual(trace, w, 1, 1.0);
        CHECK(res >= -1e-8 * (1.0 + energy(w).total));
    }

    auto other_psi = scalar_state(dom, {1, 0, 1}, false);
    CHECK_THROWS_AS(evi_residual(trace, other_psi, 1, 1.0), Error);
    CHECK_THROWS_AS(evi_residual(trace, v, 0, 1.0), Error);
    CHECK_THROWS_AS(evi_residual(trace, v, 1, 0.3), Error);
}

TEST_CASE("semigroup_residual: zero case, 1/m decay, tripod self-consistency") {
    auto dom = build_domain(DomainKind::cycle, 8, 8.0);
    std::vector<double> vals(8);
    for (int i = 0; i < 8; ++i) vals[i] = std::cos(2.0 * M_PI * i / 8.0);
    auto u0 = scalar_state(dom, vals);

    CHECK(semigroup_residual(u0, 0.5, 0.0, 4, 1e-12) == 0.0);

    double prev = -1.0;
    for (int m : {4, 8, 16, 32}) {
        double r = semigroup_residual(u0, 0.5, 0.25, m, 1e-12);
        if (prev > 0.0) {
            double ratio = prev / r;
            CHECK(ratio >= 1.6);
            CHECK(ratio <= 2.4);
        }
        prev = r;
    }

    auto tri = TargetSpace::tripod(2.0);
    Rng rng(17);
    std::vector<Point> tvals;
    for (int i = 0; i < 8; ++i) tvals.push_back(random_point(tri, rng, 1.0));
    MapState tv(dom, tri, tvals);
    double r8 = semigroup_residual(tv, 0.5, 0.25, 8, 1e-12);
    double r64 = semigroup_residual(tv, 0.5, 0.25, 64, 1e-12);
    CHECK(r64 < r8);
}

TEST_CASE("confinement: averaging flows stay in the initial ball") {
    // tripod flow spanning legs up to offset 1.5
    auto dom = build_domain(DomainKind::cycle, 12, 12.0);
    auto tri = TargetSpace::tripod(2.0);
    std::vector<Point> tvals;
    for (int i = 0; i < 12; ++i) tvals.push_back(Point::tree(i % 3, 0.5 + (i % 4) * 1.0 / 3.0));
    MapState tv(dom, tri, tvals);
    auto trace = flow_run(tv, {0.0, 0.2, 0.5, 1.0, 2.0}, 4, 1e-11);
    Point center = tri.tree_vertex_point(tri.tree_vertex("o"));
    CHECK(confinement_check(trace, center, 1.5) <= 1e-9);

    // Euclidean: values on the unit circle, heat flow averages inward
    auto r2 = TargetSpace::euclidean(2);
    std::vector<Point> cvals;
    for (int i = 0; i < 12; ++i) {
        double th = 2.0 * M_PI * i / 12.0;
        cvals.push_back(Point::euclidean({std::cos(th), std::sin(th)}));
    }
    MapState cv(dom, r2, cvals);
    auto ctrace = flow_run(cv, {0.0, 0.3, 0.9}, 4, 1e-11);
    CHECK(confinement_check(ctrace, Point::euclidean({0.0, 0.0}), 1.0) <= 1e-9);

    // precondition violation: initial data outside the ball
    CHECK_THROWS_AS(confinement_check(ctrace, Point::euclidean({0.0, 0.0}), 0.5), Error);
}

TEST_CASE("flow contraction: D(u^t, v^t) non-increasing for shared boundary") {
    auto dom = build_domain(DomainKind::interval_dirichlet, 9, 1.0);
    auto tri = TargetSpace::tripod(2.0);
    Rng rng(23);
    std::optional<std::vector<Point>> psi = std::vector<Point>{Point::tree(0, 0.5), Point::tree(2, 0.5)};
    std::vector<Point> a, b;
    for (int i = 0; i < dom->vertex_count(); ++i) {
        a.push_back(random_point(tri, rng, 1.0));
        b.push_back(random_point(tri, rng, 1.0));
    }
    MapState ua(dom, tri, a, psi), ub(dom, tri, b, psi);
    std::vector<double> times{0.0, 0.1, 0.3, 0.6, 1.0};
    auto ta = flow_run(ua, times, 4, 1e-11);
    auto tb = flow_run(ub, times, 4, 1e-11);
    double prev = l2_distance(ta.states[0], tb.states[0]);
    for (int k = 1; k < ta.size(); ++k) {
        double cur = l2_distance(ta.states[k], tb.states[k]);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }
}

TEST_CASE("time regularity: dyadic difference quotients stay bounded") {
    auto dom = build_domain(DomainKind::cycle, 16, 16.0);
    std::vector<double> vals(16);
    for (int i = 0; i < 16; ++i) vals[i] = std::cos(2.0 * M_PI * i / 16.0);
    auto u0 = scalar_state(dom, vals);
    std::vector<double> times;
    for (int k = 0; k <= 24; ++k) times.push_back(k / 32.0);
    auto trace = flow_run(u0, times, 1, 1e-12);
    int t_idx = trace.index_of_time(0.25);
    REQUIRE(t_idx >= 0);
    double prev_ratio = -1.0;
    for (double s : {0.25, 0.125, 0.0625, 0.03125}) {
        int j = trace.index_of_time(0.25 + s);
        REQUIRE(j >= 0);
        double ratio = l2_distance(trace.states[j], trace.states[t_idx]) / s;
        if (prev_ratio > 0.0) {
            CHECK(ratio / prev_ratio <= 2.0);
            CHECK(prev_ratio / ratio <= 2.0);
        }
        prev_ratio = ratio;
    }
}
