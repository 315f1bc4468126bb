// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "hmflow/mesh.hpp"

namespace hmf {

struct SweepDiagnostics {
    int sweeps = 0;
    double final_displacement = 0.0;
    double objective = 0.0;
};

/// Thrown when the resolvent sweep cap is exceeded; carries the last iterate.
class SweepCapError : public Error {
  public:
    SweepCapError(const std::string& what, MapState last, double displacement)
        : Error(Errc::non_convergence, what), last_(std::move(last)), displacement_(displacement) {}
    const MapState& last_iterate() const { return last_; }
    double displacement() const { return displacement_; }

  private:
    MapState last_;
    double displacement_;
};

/// 0.5 E[u] + D^2(u, u0) / (2h), the implicit Euler objective.
double resolvent_objective(const MapState& u, const MapState& u0, double h);

/// Resolvent J_h(u0): minimizer of 0.5 E[u] + D^2(u, u0)/(2h) over maps that
/// agree with psi on the boundary. Cyclic sweeps in ascending vertex order;
/// each unpinned vertex is reset to the weighted barycenter of its neighbors
/// (weights w_ij) together with u0_i (weight mu_i/h). Converged when the
/// largest vertex displacement in a sweep drops below tol.
MapState resolvent(const MapState& u0, double h, double tol = 1e-10, int max_sweeps = 10000,
                   SweepDiagnostics* diag = nullptr, std::vector<double>* objective_log = nullptr);

/// m-fold composition J_{t/m}^m (u0); the Crandall-Liggett approximation of
/// the flow at time t. t = 0 returns u0 unchanged.
MapState crandall_liggett(const MapState& u0, double t, int m, double tol = 1e-10, int max_sweeps = 10000);

/// Time-indexed orbit of the flow together with energies and per-step solver
/// diagnostics. Boundary values are identical across all recorded times.
struct FlowTrace {
    MapState initial;
    std::vector<double> times;
    std::vector<MapState> states;
    std::vector<double> energies;
    std::vector<SweepDiagnostics> diagnostics; // entry k describes the step into times[k]
    std::vector<double> inner_steps;           // resolvent step h used inside interval k
    bool admissible_energy = true;             // E[u0] <= E[psi_full] when a full boundary map is known

    int size() const { return static_cast<int>(times.size()); }
    /// Index of the recorded time closest to t, or -1 when no time matches
    /// within the tolerance.
    int index_of_time(double t, double tol = 1e-9) const;
};

/// Advance u0 across the given strictly increasing time grid, chaining
/// crandall_liggett over consecutive intervals. Each interval uses
/// max(m_per_interval, ceil(dt / h_max)) resolvent steps when h_max > 0.
FlowTrace flow_run(const MapState& u0, const std::vector<double>& times, int m_per_interval,
                   double tol = 1e-10, int max_sweeps = 10000, double h_max = 0.0);

/// One-step evolution variational inequality residual
///   s (E[v] - E[u^t]) - (D^2(v, u^t) - D^2(v, u^{t-s}))
/// at the recorded time times[t_index]; nonnegative for the discrete flow.
double evi_residual(const FlowTrace& trace, const MapState& v, int t_index, double s);

/// Distance between F_{t+s}(u0) computed directly and via the composition
/// F_t(F_s(u0)), with the direct discretization using m' ~ m (t+s)/t steps.
double semigroup_residual(const MapState& u0, double t, double s, int m, double tol = 1e-10,
                          int max_sweeps = 10000);

/// Largest excess max_{t, i} (d(u_i^t, P0) - M0) over the recorded trace.
/// Requires the initial map to take values in the closed ball B_M0(P0).
double confinement_check(const FlowTrace& trace, const Point& P0, double M0);

/// Minimality certificate: smallest objective increase observed when every
/// vertex of J is pushed a geodesic step of the given size toward a random
/// point. Nonnegative (up to roundoff) when J is the true minimizer.
double resolvent_perturbation_margin(const MapState& J, const MapState& u0, double h, int trials,
                                     double size, Rng& rng);

} // namespace hmf
