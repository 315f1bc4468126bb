// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hmflow/cat0.hpp"
#include "hmflow/errors.hpp"

namespace hmf {

enum class DomainKind { interval_dirichlet, grid2d_dirichlet, cycle, torus2d };

DomainKind domain_kind_from_string(const std::string& s);
std::string to_string(DomainKind k);

/// Weighted graph with lumped vertex measure: the discretized domain. The
/// built-in constructions calibrate measures mu_i = delta^dim and edge weights
/// w = delta^(dim-2) so that the discrete Laplacian of x^2 equals 2 at
/// interior vertices and the Dirichlet energy of a linear map matches the
/// integral of |grad u|^2.
class MeshDomain {
  public:
    struct Edge {
        int i, j;
        double weight;
        double length;
    };

    DomainKind kind;
    int dim = 1;
    int n_per_dim = 0;
    double length = 0.0;
    double spacing = 0.0;
    double curvature_tag = 0.0; // lower Ricci bound surrogate, K <= 0

    std::vector<std::array<double, 2>> coords;
    std::vector<double> measure;
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<int, double>>> adjacency; // vertex -> (neighbor, weight)
    std::vector<std::vector<double>> edge_length_of_;            // parallel to adjacency
    std::vector<int> boundary;                                   // sorted
    std::vector<char> is_boundary;
    std::vector<int> interior;

    int vertex_count() const { return static_cast<int>(measure.size()); }
    double total_measure() const;

    /// Intrinsic graph metric (shortest path over edge lengths); rows are
    /// computed once on first use and cached.
    double graph_distance(int i, int j) const;
    const std::vector<double>& distances_from(int i) const;
    double graph_diameter() const;

    /// Domain-size constant entering the admissibility threshold of the
    /// Hamilton-Jacobi flow: distance to the boundary for Dirichlet domains,
    /// half the diameter for closed ones.
    double confinement_radius() const;

    /// Vertices whose graph ball of the given radius contains no boundary
    /// vertex (all vertices on closed domains).
    std::vector<int> vertices_with_clear_ball(double radius) const;

  private:
    mutable std::once_flag dist_once_;
    mutable std::vector<std::vector<double>> dist_;
    void ensure_distances() const;
};

std::shared_ptr<const MeshDomain> build_domain(DomainKind kind, int n, double length);

struct ScalarField {
    std::shared_ptr<const MeshDomain> domain;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(std::shared_ptr<const MeshDomain> d, double fill = 0.0)
        : domain(std::move(d)), values(domain->vertex_count(), fill) {}
    ScalarField(std::shared_ptr<const MeshDomain> d, std::vector<double> v);

    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
};

/// Assignment vertex -> Point with an optional pinned boundary map psi. When
/// psi is present the boundary vertices carry exactly its values.
struct MapState {
    std::shared_ptr<const MeshDomain> domain;
    TargetSpace space;
    std::vector<Point> values;
    std::optional<std::vector<Point>> psi; // aligned with domain->boundary

    MapState(std::shared_ptr<const MeshDomain> d, TargetSpace s, std::vector<Point> vals,
             std::optional<std::vector<Point>> boundary_map = std::nullopt);

    bool pinned(int vertex) const { return psi.has_value() && domain->is_boundary[vertex]; }
    /// Overwrite boundary vertices with psi (no-op without psi).
    void apply_boundary();
    bool same_boundary(const MapState& other) const;
};

struct EnergyResult {
    double total = 0.0;
    ScalarField density;
};

/// Discrete Korevaar-Schoen energy: E[u] = sum over unordered edges of
/// w_e d^2(u_i, u_j), with density e_i = sum_{j~i} w_ij d^2(u_i,u_j) / (2 mu_i)
/// so that sum_i mu_i e_i = E[u].
EnergyResult energy(const MapState& u);

/// L^2 distance D(u, v) = sqrt(sum_i mu_i d^2(u_i, v_i)).
double l2_distance(const MapState& u, const MapState& v);

/// Graph Laplacian (Delta f)_i = sum_{j~i} w_ij (f_j - f_i) / mu_i, same
/// stencil at boundary vertices.
ScalarField laplacian(const ScalarField& f);

/// Heat semigroup H_s by `substeps` implicit Euler solves of step s/substeps.
/// Conserves the mu-weighted mass on closed domains and satisfies the
/// maximum principle.
ScalarField heat_evolve(const ScalarField& f, double s, int substeps);

/// Uniform sampling lattice used only to validate the graph energy against
/// the epsilon-averaged energy integral.
struct LatticeMap {
    int dim = 1;
    int nx = 0, ny = 1;
    double spacing = 0.0;
    TargetSpace space;
    std::vector<Point> values; // row-major

    explicit LatticeMap(TargetSpace s) : space(std::move(s)) {}
    int index(int ix, int iy = 0) const { return iy * nx + ix; }
};

struct LatticeProfile {
    int nx = 0, ny = 1;
    std::vector<double> e;
    std::vector<char> valid;
};

/// epsilon-ball averaged energy density with the dimensional constant
/// c_{n,2} = n(n+2)/omega_{n-1} (3/2 in 1-D, 4/pi in 2-D). Evaluated only at
/// lattice nodes at least epsilon away from the lattice boundary. When
/// epsilon is an integer multiple of the spacing the 1-D rule is composite
/// Simpson, which integrates smooth densities to high order.
LatticeProfile ks_energy_profile(const LatticeMap& map, double eps);

} // namespace hmf
