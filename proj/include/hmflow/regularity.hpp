// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmflow/flow.hpp"

namespace hmf {

/// Outcome of one inequality battery: residual statistics over all probed
/// (vertex, time, test) combinations plus the configured pass rule.
struct CheckReport {
    std::string check;
    std::string anchor; // inequality being certified, e.g. "energy-monotonicity"
    double tolerance = 0.0;
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
    bool pass = false;
    std::string scenario;
    std::uint64_t seed = 0;
    long count = 0;

    /// Fill min/mean/max from residuals and apply the lower-bound pass rule
    /// min >= -tolerance.
    static CheckReport lower_bound(std::string check, std::string anchor, double tolerance,
                                   const std::vector<double>& residuals);
    /// Pass rule max <= tolerance, for upper-bound style checks.
    static CheckReport upper_bound(std::string check, std::string anchor, double tolerance,
                                   const std::vector<double>& residuals);
};

/// Pointwise squared deviation of the two edge distance fields:
///   R_i = sum_{j~i} w_ij (d(u_i,u_j) - d(v_i,v_j))^2 / (2 mu_i),
/// bounded by 2 e_u + 2 e_v.
ScalarField r_density(const MapState& u, const MapState& v);

struct PhiInterpolationResult {
    std::vector<double> per_edge; // per-edge residuals; each >= 0 in exact arithmetic
    double lhs = 0.0;             // E[u_phi] + E[v_phi] - E[u] - E[v]
    double rhs = 0.0;
    double residual = 0.0;        // rhs - lhs = sum of per-edge residuals
};

/// Energy comparison for the phi-interpolated pair along fiber geodesics.
/// The inequality is assembled edge by edge from the quadrilateral
/// comparisons, so it is exact (no discretization error).
PhiInterpolationResult phi_interpolation_residuals(const MapState& u, const MapState& v,
                                                   const ScalarField& phi);

/// Default weak-form test family: one hat per interior vertex (1 at the
/// center, 1/2 on interior neighbors) plus the interior indicator.
std::vector<ScalarField> default_test_functions(const std::shared_ptr<const MeshDomain>& dom);

/// Weak residual of (Delta - d_t) d^2(u^t, v^t) >= 2 R_{u^t,v^t} over a pair
/// of traces on the same uniform grid: for each interior time and test phi,
///   sum_i mu_i phi_i [ (Delta w)_i - (w_i^t - w_i^{t-s})/s - 2 R_i ].
CheckReport subsolution_residuals(const FlowTrace& u_trace, const FlowTrace& v_trace,
                                  const std::vector<ScalarField>& tests, double tolerance);

struct DistanceSubsolutionReports {
    CheckReport squared; // (Delta - d_t) d^2(P, u) >= 2 e_u
    CheckReport plain;   // (Delta - d_t) d(P, u)  >= 0
};

DistanceSubsolutionReports distance_subsolution_residuals(const FlowTrace& trace, const Point& P,
                                                          const std::vector<ScalarField>& tests,
                                                          double tolerance);

/// Radius-r pointwise Lipschitz quotient max_{0 < dist(i,j) <= r} d_Y / dist
/// in the graph metric.
ScalarField lip_field(const MapState& u, double radius);

struct LipReport {
    std::vector<double> radii;
    std::vector<double> report_times;                       // recorded times >= t_star
    std::vector<std::vector<std::vector<double>>> spatial;  // [time][radius][vertex]
    std::vector<double> temporal_sup;                       // per vertex, over all gaps with t >= t_star
    double fitted_space_constant = 0.0;                     // largest smallest-radius quotient
    double fitted_time_constant = 0.0;                      // largest temporal ratio
};

LipReport lip_report(const FlowTrace& trace, double t_star, const std::vector<double>& radii);

/// d_Y(u^{t}(v), u^{t+s}(v)) / s between two recorded times.
double temporal_ratio(const FlowTrace& trace, int vertex, int t_index, double s);

/// Asymptotic mean value gap
///   H_s[g(. , t0 - s)](x0) - g(x0, t0) - int_0^s H_tau[f(. , t0 - tau)] dtau
/// with the time integral by the trapezoid rule on the series grid; the gap is
/// <= O(grid step) for subsolutions (Delta - d_t) g <= f. The heat semigroup
/// uses implicit Euler steps matching the series spacing, so a field evolved
/// by the same scheme reproduces itself.
double mean_value_residual(const std::vector<ScalarField>& g_series,
                           const std::vector<ScalarField>& f_series, double series_dt, int x0,
                           int t0_index, int steps_back);

/// Inf-convolution field
///   f_{eps,p}(i, t) = min_{dist(i,j) <= C1 sqrt(eps)}
///       e^{-pKt} dist(i,j)^p / (p eps^{p-1}) - d_Y(u_i^t, u_j^t)
/// restricted to vertices whose search ball avoids the boundary.
struct HJField {
    double eps = 0.0;
    int p = 2;
    double K = 0.0, M0 = 0.0, T = 0.0;
    double eps0 = 0.0; // admissibility threshold e^{-2|K|T} R^2 / (8 M0)
    double c1 = 0.0;   // search radius constant sqrt(6 M0 e^{2|K|T})
    std::vector<double> times;
    std::vector<int> admissible;
    std::vector<std::vector<double>> values; // [time][vertex], NaN off the admissible set
    double max_minimizer_distance = 0.0;
};

HJField hj_flow(const FlowTrace& trace, double eps, int p, double K, double M0, double T);

struct HJCheckSet {
    CheckReport supersolution;  // weak residual of (Delta - d_t) f_eps, upper-bounded
    CheckReport gradient_bound; // 2 e^{2|K|T} lip^2 - (-f_eps/eps) >= -tol
    CheckReport limit_trend;    // |f_{eps,p}/eps + (e^{Kt} lip)^q / q| shrinking along eps
    std::vector<double> trend_gaps;
};

/// The three Hamilton-Jacobi verifications for one exponent p: the
/// supersolution weak residual (computed at eps_list.front()), the gradient
/// bound over every eps in the list, and the small-eps limit trend.
HJCheckSet hj_checks(const FlowTrace& trace, const std::vector<double>& eps_list, int p, double K,
                     double M0, double T, const std::vector<ScalarField>& tests,
                     double supersolution_tolerance, double gradient_tolerance);

/// Weak residual of the Bochner inequality for the nearest-neighbor Lipschitz
/// surrogate l: for each test phi and interior time,
///   sum_i mu_i phi_i [ (Delta l^2)_i - d_t^- l^2_i - 2 |grad l|^2_i - 2 K l^2_i ]
/// with |grad l|^2_i = sum_{j~i} w_ij (l_j - l_i)^2 / (2 mu_i).
CheckReport bochner_residuals(const FlowTrace& trace, double K, const std::vector<ScalarField>& tests,
                              double tolerance);

} // namespace hmf
