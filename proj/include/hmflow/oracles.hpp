// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "hmflow/mesh.hpp"

namespace hmf {

/// Exact heat semigroup exp(t Delta) u0 with zero Dirichlet data on the
/// boundary set (all vertices evolve on closed domains), via the dense
/// symmetric eigen-decomposition of the weighted Laplacian.
std::vector<double> dense_heat_exact(const MeshDomain& dom, const std::vector<double>& u0, double t);

/// One implicit Euler step (M/h + L) u = M u0 / h with pinned boundary values,
/// solved densely. Reference for the resolvent sweeps on Euclidean targets.
std::vector<double> dense_resolvent_solve(const MeshDomain& dom, const std::vector<double>& u0,
                                          const std::vector<double>& psi_boundary, double h);

/// Exhaustive barycenter search over a uniform discretization of every tree
/// edge; grid_per_edge samples per edge.
Point tree_brute_barycenter(const TargetSpace& tree, std::span<const Point> points,
                            std::span<const double> weights, int grid_per_edge);

/// Exhaustive inf-convolution of a slope field u(x) = slope * x on a uniform
/// 1-D lattice: per node, min_k (k delta)^p / (p eps^{p-1}) - slope * k delta
/// over the whole lattice. Closed-form reference for the Hamilton-Jacobi flow.
std::vector<double> grid_hj_closedform(int n, double delta, double slope, double eps, int p);

} // namespace hmf
