// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hmflow/errors.hpp"
#include "hmflow/rng.hpp"

namespace hmf {

enum class SpaceKind { euclidean, metric_tree, hyperbolic, product };

struct TreeEdgeSpec {
    std::string a;
    std::string b;
    double length = 0.0;

    bool operator==(const TreeEdgeSpec&) const = default;
};

struct Point;

/// Value of a map into Euclidean R^d.
struct EuclideanVec {
    std::vector<double> coords;
};

/// Position on a metric tree: an edge index plus an arc-length offset measured
/// from the edge's first endpoint. Points sitting on a vertex are kept in a
/// canonical encoding (smallest incident edge index, offset at the matching
/// end) so equality and hashing are well defined.
struct TreePoint {
    int edge = 0;
    double offset = 0.0;
};

/// Point on the hyperboloid sheet x0^2 - x1^2 - x2^2 = 1, x0 > 0.
struct HyperboloidPoint {
    double x0 = 1.0, x1 = 0.0, x2 = 0.0;
};

struct ProductPoint {
    std::vector<Point> factors;
};

struct Point {
    std::variant<EuclideanVec, TreePoint, HyperboloidPoint, ProductPoint> value;

    static Point euclidean(std::vector<double> coords) { return Point{EuclideanVec{std::move(coords)}}; }
    static Point tree(int edge, double offset) { return Point{TreePoint{edge, offset}}; }
    static Point hyperboloid(double x0, double x1, double x2) { return Point{HyperboloidPoint{x0, x1, x2}}; }
    static Point product(std::vector<Point> factors) { return Point{ProductPoint{std::move(factors)}}; }
};

/// Thrown when an iterative solver exhausts its iteration cap. Carries the
/// last iterate and the final movement so callers can inspect how close the
/// solve got.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, Point last, double residual);
    const Point& last_iterate() const { return last_; }
    double residual() const { return residual_; }

  private:
    Point last_;
    double residual_;
};

/// Residuals (right-hand side minus left-hand side, or left minus right for
/// lower bounds) of the five comparison inequalities that characterize
/// non-positive curvature: the CN inequality and the four quadrilateral
/// comparisons of Reshetnyak type. Every entry is >= 0 in an honest CAT(0)
/// space, up to floating-point noise.
using ComparisonResiduals = std::array<double, 5>;

namespace detail {
struct SpaceImpl;
}

/// Immutable descriptor of a CAT(0) target space. Cheap to copy (shared
/// internals) and safe for unrestricted concurrent read access.
class TargetSpace {
  public:
    static TargetSpace euclidean(int dim);
    static TargetSpace metric_tree(std::vector<std::string> vertices, std::vector<TreeEdgeSpec> edges);
    /// The tripod: one center vertex "o" and three legs of the given length.
    static TargetSpace tripod(double leg_length);
    static TargetSpace hyperbolic_plane();
    static TargetSpace product(std::vector<TargetSpace> factors);

    SpaceKind kind() const;
    int euclidean_dim() const;
    const std::vector<TargetSpace>& factors() const;

    int tree_edge_count() const;
    double tree_edge_length(int edge) const;
    /// Tree vertex id for the given name (metric trees only).
    int tree_vertex(const std::string& name) const;
    /// Canonical point encoding for a tree vertex.
    Point tree_vertex_point(int vertex) const;

    /// Throws Errc::variant_mismatch unless p is a structurally valid point of
    /// this space (matching variant, coordinate count, offset range, Minkowski
    /// constraint within 1e-12).
    void validate(const Point& p) const;

    /// Canonical representative; tree points at an edge end are rewritten to
    /// the smallest incident edge.
    Point canonical(Point p) const;

    /// True when p and q have identical canonical encodings, which is exactly
    /// the condition distance(p, q) == 0.
    bool equal(const Point& p, const Point& q) const;

    double distance(const Point& p, const Point& q) const;

    /// Constant-speed geodesic between p and q evaluated at t in [0, 1];
    /// d(p, g(t)) = t d(p, q) and d(g(t), q) = (1-t) d(p, q).
    Point geodesic_point(const Point& p, const Point& q, double t) const;

    /// Minimizer of F(q) = sum_i w_i d^2(q, x_i). Closed form for Euclidean
    /// factors, exact piecewise-quadratic edge scan for trees, Karcher descent
    /// for the hyperboloid. Stops when successive iterates move less than tol.
    Point weighted_barycenter(std::span<const Point> points, std::span<const double> weights, double tol) const;

    /// Nearest-point projection onto the closed ball of the given radius.
    Point project_to_ball(const Point& p, const Point& center, double radius) const;

    /// Residuals of the CN inequality (geodesic from Q to S at parameter t,
    /// apex P) and of the four quadrilateral comparisons for the ordered
    /// quadruple {P,Q,R,S}; the fourth comparison reports the smaller of its
    /// two variants.
    ComparisonResiduals comparison_residuals(const Point& P, const Point& Q, const Point& R, const Point& S,
                                             double lambda, double mu, double t) const;

    /// Wire encoding: Euclidean "c0;c1;...", tree "edge:offset" (17 significant
    /// digits), hyperboloid "x0;x1;x2", product factor encodings joined by '|'.
    std::string encode_point(const Point& p) const;
    Point decode_point(const std::string& text) const;

    std::string describe() const;
    bool same_space(const TargetSpace& other) const;

  private:
    explicit TargetSpace(std::shared_ptr<const detail::SpaceImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const detail::SpaceImpl> impl_;
    friend struct detail::SpaceImpl;
};

/// Inductive mean with a fixed shuffled-cycle schedule and step
/// w_i / (accumulated weight); provably convergent reference scheme for
/// barycenters in any CAT(0) space. Used as an independent cross-check of the
/// per-variant solvers.
Point sturm_mean(const TargetSpace& space, std::span<const Point> points, std::span<const double> weights,
                 double tol, int max_passes = 2000);

/// Uniform-ish random point, used by the verification batteries: coordinates
/// in [-scale, scale] for Euclidean factors, a random edge position for trees,
/// a random geodesic shot of length at most scale for the hyperboloid.
Point random_point(const TargetSpace& space, Rng& rng, double scale);

} // namespace hmf
