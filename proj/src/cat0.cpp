// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include "hmflow/cat0.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace hmf {

namespace {

constexpr double kMinkowskiTol = 1e-12;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) pos++;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::invalid_argument, std::string("cannot parse number '") + s + "' in " + what);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0; // '|' separators inside nested product encodings are protected by parentheses
    for (char c : s) {
        if (c == '(') depth++;
        if (c == ')') depth--;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

// Minkowski bilinear form with signature (+,-,-).
double mink(const HyperboloidPoint& p, const HyperboloidPoint& q) {
    return p.x0 * q.x0 - p.x1 * q.x1 - p.x2 * q.x2;
}

HyperboloidPoint renormalize(double x0, double x1, double x2) {
    double q = x0 * x0 - x1 * x1 - x2 * x2;
    if (!(q > 0.0) || !(x0 > 0.0))
        throw Error(Errc::numeric, "hyperboloid renormalization received a non-timelike vector");
    double inv = 1.0 / std::sqrt(q);
    return HyperboloidPoint{x0 * inv, x1 * inv, x2 * inv};
}

// arccosh of the Minkowski product, evaluated through 2 asinh(|p-q|_M / 2)
// which stays accurate for nearby points.
double hyper_distance(const HyperboloidPoint& p, const HyperboloidPoint& q) {
    double d0 = p.x0 - q.x0, d1 = p.x1 - q.x1, d2 = p.x2 - q.x2;
    double qq = d1 * d1 + d2 * d2 - d0 * d0;
    if (qq <= 0.0) return 0.0;
    return 2.0 * std::asinh(0.5 * std::sqrt(qq));
}

} // namespace

ConvergenceError::ConvergenceError(const std::string& what, Point last, double residual)
    : Error(Errc::non_convergence, what), last_(std::move(last)), residual_(residual) {}

namespace detail {

struct TreeTopology {
    std::vector<std::string> names;
    std::map<std::string, int> index;
    struct Edge {
        int a, b;
        double length;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<int, int>>> incident; // vertex -> (edge, other endpoint)
    std::vector<std::vector<double>> vdist;                 // all-pairs vertex distances
    std::vector<std::vector<int>> next;                     // next[a][b]: first vertex after a on the path a->b
    std::vector<int> canon_edge;                            // smallest incident edge per vertex

    int vertex_count() const { return static_cast<int>(names.size()); }
};

struct SpaceImpl {
    SpaceKind kind;
    int dim = 0;                      // euclidean
    TreeTopology tree;                // metric_tree
    std::vector<TargetSpace> factors; // product

    static TargetSpace wrap(std::shared_ptr<const SpaceImpl> impl) { return TargetSpace(std::move(impl)); }
};

} // namespace detail

using detail::SpaceImpl;
using detail::TreeTopology;

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

TargetSpace TargetSpace::euclidean(int dim) {
    if (dim < 1) throw Error(Errc::invalid_argument, "Euclidean dimension must be positive");
    auto impl = std::make_shared<SpaceImpl>();
    impl->kind = SpaceKind::euclidean;
    impl->dim = dim;
    return SpaceImpl::wrap(impl);
}

TargetSpace TargetSpace::metric_tree(std::vector<std::string> vertices, std::vector<TreeEdgeSpec> edges) {
    auto impl = std::make_shared<SpaceImpl>();
    impl->kind = SpaceKind::metric_tree;
    TreeTopology& t = impl->tree;
    if (vertices.empty()) throw Error(Errc::invalid_argument, "metric tree needs at least one vertex");
    t.names = std::move(vertices);
    for (int i = 0; i < t.vertex_count(); ++i) {
        if (!t.index.emplace(t.names[i], i).second)
            throw Error(Errc::invalid_argument, "duplicate tree vertex name '" + t.names[i] + "'");
    }
    t.incident.resize(t.names.size());
    for (const auto& e : edges) {
        auto ia = t.index.find(e.a);
        auto ib = t.index.find(e.b);
        if (ia == t.index.end() || ib == t.index.end())
            throw Error(Errc::invalid_argument, "tree edge references unknown vertex '" + e.a + "'/'" + e.b + "'");
        if (!(e.length > 0.0)) throw Error(Errc::invalid_argument, "tree edge lengths must be strictly positive");
        if (ia->second == ib->second) throw Error(Errc::invalid_argument, "target tree is not acyclic");
        int id = static_cast<int>(t.edges.size());
        t.edges.push_back({ia->second, ib->second, e.length});
        t.incident[ia->second].push_back({id, ib->second});
        t.incident[ib->second].push_back({id, ia->second});
    }
    if (t.edges.size() + 1 != t.names.size()) {
        // connected + acyclic forces exactly V-1 edges; distinguish the message
        if (t.edges.size() + 1 > t.names.size()) throw Error(Errc::invalid_argument, "target tree is not acyclic");
        throw Error(Errc::invalid_argument, "target tree is not connected");
    }

    const int n = t.vertex_count();
    t.vdist.assign(n, std::vector<double>(n, -1.0));
    t.next.assign(n, std::vector<int>(n, -1));
    for (int root = 0; root < n; ++root) {
        // depth-first walk; trees have a unique path so this is exact
        std::vector<int> stack{root};
        t.vdist[root][root] = 0.0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const auto& [eid, w] : t.incident[v]) {
                if (t.vdist[root][w] >= 0.0) continue;
                t.vdist[root][w] = t.vdist[root][v] + t.edges[eid].length;
                t.next[w][root] = v; // from w, first step toward root is v
                stack.push_back(w);
            }
        }
        for (int v = 0; v < n; ++v)
            if (t.vdist[root][v] < 0.0) throw Error(Errc::invalid_argument, "target tree is not connected");
    }
    t.canon_edge.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        if (t.incident[v].empty()) throw Error(Errc::invalid_argument, "target tree has an isolated vertex");
        int best = t.incident[v][0].first;
        for (const auto& [eid, w] : t.incident[v]) best = std::min(best, eid);
        t.canon_edge[v] = best;
    }
    return SpaceImpl::wrap(impl);
}

TargetSpace TargetSpace::tripod(double leg_length) {
    return metric_tree({"o", "a", "b", "c"},
                       {{"o", "a", leg_length}, {"o", "b", leg_length}, {"o", "c", leg_length}});
}

TargetSpace TargetSpace::hyperbolic_plane() {
    auto impl = std::make_shared<SpaceImpl>();
    impl->kind = SpaceKind::hyperbolic;
    return SpaceImpl::wrap(impl);
}

TargetSpace TargetSpace::product(std::vector<TargetSpace> factors) {
    if (factors.empty()) throw Error(Errc::invalid_argument, "product space needs at least one factor");
    auto impl = std::make_shared<SpaceImpl>();
    impl->kind = SpaceKind::product;
    impl->factors = std::move(factors);
    return SpaceImpl::wrap(impl);
}

SpaceKind TargetSpace::kind() const { return impl_->kind; }

int TargetSpace::euclidean_dim() const {
    if (impl_->kind != SpaceKind::euclidean) throw Error(Errc::variant_mismatch, "not a Euclidean space");
    return impl_->dim;
}

const std::vector<TargetSpace>& TargetSpace::factors() const {
    if (impl_->kind != SpaceKind::product) throw Error(Errc::variant_mismatch, "not a product space");
    return impl_->factors;
}

int TargetSpace::tree_edge_count() const {
    if (impl_->kind != SpaceKind::metric_tree) throw Error(Errc::variant_mismatch, "not a metric tree");
    return static_cast<int>(impl_->tree.edges.size());
}

double TargetSpace::tree_edge_length(int edge) const {
    if (impl_->kind != SpaceKind::metric_tree) throw Error(Errc::variant_mismatch, "not a metric tree");
    if (edge < 0 || edge >= tree_edge_count()) throw Error(Errc::invalid_argument, "tree edge index out of range");
    return impl_->tree.edges[edge].length;
}

int TargetSpace::tree_vertex(const std::string& name) const {
    if (impl_->kind != SpaceKind::metric_tree) throw Error(Errc::variant_mismatch, "not a metric tree");
    auto it = impl_->tree.index.find(name);
    if (it == impl_->tree.index.end()) throw Error(Errc::invalid_argument, "unknown tree vertex '" + name + "'");
    return it->second;
}

Point TargetSpace::tree_vertex_point(int vertex) const {
    const TreeTopology& t = impl_->tree;
    if (vertex < 0 || vertex >= t.vertex_count())
        throw Error(Errc::invalid_argument, "tree vertex index out of range");
    int eid = t.canon_edge[vertex];
    return Point::tree(eid, t.edges[eid].a == vertex ? 0.0 : t.edges[eid].length);
}

std::string TargetSpace::describe() const {
    switch (impl_->kind) {
        case SpaceKind::euclidean: return "euclidean(" + std::to_string(impl_->dim) + ")";
        case SpaceKind::metric_tree:
            return "tree(" + std::to_string(impl_->tree.vertex_count()) + "v," +
                   std::to_string(impl_->tree.edges.size()) + "e)";
        case SpaceKind::hyperbolic: return "hyperbolic";
        case SpaceKind::product: {
            std::string s = "product(";
            for (size_t i = 0; i < impl_->factors.size(); ++i)
                s += (i ? "," : "") + impl_->factors[i].describe();
            return s + ")";
        }
    }
    return "?";
}

bool TargetSpace::same_space(const TargetSpace& other) const {
    if (impl_ == other.impl_) return true;
    if (impl_->kind != other.impl_->kind) return false;
    switch (impl_->kind) {
        case SpaceKind::euclidean: return impl_->dim == other.impl_->dim;
        case SpaceKind::hyperbolic: return true;
        case SpaceKind::metric_tree: {
            const auto& ta = impl_->tree;
            const auto& tb = other.impl_->tree;
            if (ta.names != tb.names || ta.edges.size() != tb.edges.size()) return false;
            for (size_t i = 0; i < ta.edges.size(); ++i)
                if (ta.edges[i].a != tb.edges[i].a || ta.edges[i].b != tb.edges[i].b ||
                    ta.edges[i].length != tb.edges[i].length)
                    return false;
            return true;
        }
        case SpaceKind::product: {
            if (impl_->factors.size() != other.impl_->factors.size()) return false;
            for (size_t i = 0; i < impl_->factors.size(); ++i)
                if (!impl_->factors[i].same_space(other.impl_->factors[i])) return false;
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// validation and canonicalization
// ---------------------------------------------------------------------------

void TargetSpace::validate(const Point& p) const {
    switch (impl_->kind) {
        case SpaceKind::euclidean: {
            const auto* v = std::get_if<EuclideanVec>(&p.value);
            if (!v) throw Error(Errc::variant_mismatch, "point is not Euclidean");
            if (static_cast<int>(v->coords.size()) != impl_->dim)
                throw Error(Errc::variant_mismatch, "Euclidean point has wrong dimension");
            for (double c : v->coords)
                if (!std::isfinite(c)) throw Error(Errc::variant_mismatch, "non-finite coordinate");
            return;
        }
        case SpaceKind::metric_tree: {
            const auto* v = std::get_if<TreePoint>(&p.value);
            if (!v) throw Error(Errc::variant_mismatch, "point is not a tree point");
            if (v->edge < 0 || v->edge >= static_cast<int>(impl_->tree.edges.size()))
                throw Error(Errc::variant_mismatch, "tree point references an unknown edge");
            double len = impl_->tree.edges[v->edge].length;
            if (!(v->offset >= 0.0 && v->offset <= len))
                throw Error(Errc::variant_mismatch, "tree point offset outside [0, edge length]");
            return;
        }
        case SpaceKind::hyperbolic: {
            const auto* v = std::get_if<HyperboloidPoint>(&p.value);
            if (!v) throw Error(Errc::variant_mismatch, "point is not a hyperboloid point");
            if (!(v->x0 > 0.0)) throw Error(Errc::variant_mismatch, "hyperboloid point must have x0 > 0");
            double q = v->x0 * v->x0 - v->x1 * v->x1 - v->x2 * v->x2;
            if (std::fabs(q - 1.0) > kMinkowskiTol)
                throw Error(Errc::variant_mismatch, "hyperboloid point violates the Minkowski constraint");
            return;
        }
        case SpaceKind::product: {
            const auto* v = std::get_if<ProductPoint>(&p.value);
            if (!v) throw Error(Errc::variant_mismatch, "point is not a product point");
            if (v->factors.size() != impl_->factors.size())
                throw Error(Errc::variant_mismatch, "product point has wrong factor count");
            for (size_t i = 0; i < v->factors.size(); ++i) impl_->factors[i].validate(v->factors[i]);
            return;
        }
    }
}

Point TargetSpace::canonical(Point p) const {
    if (impl_->kind == SpaceKind::product) {
        auto& pp = std::get<ProductPoint>(p.value);
        for (size_t i = 0; i < pp.factors.size(); ++i)
            pp.factors[i] = impl_->factors[i].canonical(std::move(pp.factors[i]));
        return p;
    }
    if (impl_->kind != SpaceKind::metric_tree) return p;
    const TreeTopology& t = impl_->tree;
    auto& tp = std::get<TreePoint>(p.value);
    const auto& e = t.edges[tp.edge];
    // snap to an endpoint when the offset is within rounding of it
    double snap = 1e-12 * std::max(1.0, e.length);
    int vertex = -1;
    if (std::fabs(tp.offset) <= snap)
        vertex = e.a;
    else if (std::fabs(tp.offset - e.length) <= snap)
        vertex = e.b;
    if (vertex < 0) return p;
    return tree_vertex_point(vertex);
}

bool TargetSpace::equal(const Point& pa, const Point& pb) const {
    Point a = canonical(pa), b = canonical(pb);
    switch (impl_->kind) {
        case SpaceKind::euclidean: return std::get<EuclideanVec>(a.value).coords == std::get<EuclideanVec>(b.value).coords;
        case SpaceKind::metric_tree: {
            const auto& ta = std::get<TreePoint>(a.value);
            const auto& tb = std::get<TreePoint>(b.value);
            return ta.edge == tb.edge && ta.offset == tb.offset;
        }
        case SpaceKind::hyperbolic: {
            const auto& ha = std::get<HyperboloidPoint>(a.value);
            const auto& hb = std::get<HyperboloidPoint>(b.value);
            return ha.x0 == hb.x0 && ha.x1 == hb.x1 && ha.x2 == hb.x2;
        }
        case SpaceKind::product: {
            const auto& qa = std::get<ProductPoint>(a.value);
            const auto& qb = std::get<ProductPoint>(b.value);
            for (size_t i = 0; i < qa.factors.size(); ++i)
                if (!impl_->factors[i].equal(qa.factors[i], qb.factors[i])) return false;
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// tree geometry helpers
// ---------------------------------------------------------------------------

namespace {

// Distance from a tree point to a tree vertex.
double tree_point_vertex_dist(const TreeTopology& t, const TreePoint& p, int vertex) {
    const auto& e = t.edges[p.edge];
    return std::min(p.offset + t.vdist[e.a][vertex], (e.length - p.offset) + t.vdist[e.b][vertex]);
}

double tree_distance(const TreeTopology& t, const TreePoint& p, const TreePoint& q) {
    if (p.edge == q.edge) return std::fabs(p.offset - q.offset);
    const auto& ep = t.edges[p.edge];
    const auto& eq = t.edges[q.edge];
    // evaluated so that swapping p and q permutes commutative operations only,
    // keeping d(p,q) == d(q,p) bit for bit
    double best = std::numeric_limits<double>::infinity();
    for (int x : {ep.a, ep.b}) {
        double dpx = (x == ep.a) ? p.offset : ep.length - p.offset;
        for (int y : {eq.a, eq.b}) {
            double dqy = (y == eq.a) ? q.offset : eq.length - q.offset;
            double mid = t.vdist[std::min(x, y)][std::max(x, y)];
            best = std::min(best, (dpx + dqy) + mid);
        }
    }
    return best;
}

TreePoint clamp_to_edge(const TreeTopology& t, int edge, double off) {
    return TreePoint{edge, std::clamp(off, 0.0, t.edges[edge].length)};
}

// Unique geodesic between two tree points, evaluated at arc length ell from p.
TreePoint tree_walk(const TreeTopology& t, const TreePoint& p, const TreePoint& q, double ell) {
    if (p.edge == q.edge) {
        double off = p.offset + (q.offset >= p.offset ? ell : -ell);
        return clamp_to_edge(t, p.edge, off);
    }
    const auto& ep = t.edges[p.edge];
    const auto& eq = t.edges[q.edge];
    // pick the exit endpoint of p's edge and the entry endpoint of q's edge
    double best = std::numeric_limits<double>::infinity();
    int exit_v = ep.a, entry_v = eq.a;
    for (int x : {ep.a, ep.b}) {
        double dpx = (x == ep.a) ? p.offset : ep.length - p.offset;
        for (int y : {eq.a, eq.b}) {
            double dyq = (y == eq.a) ? q.offset : eq.length - q.offset;
            double total = dpx + t.vdist[x][y] + dyq;
            if (total < best) {
                best = total;
                exit_v = x;
                entry_v = y;
            }
        }
    }
    double dpx = (exit_v == ep.a) ? p.offset : ep.length - p.offset;
    if (ell <= dpx) {
        double off = p.offset + (exit_v == ep.a ? -ell : ell);
        return clamp_to_edge(t, p.edge, off);
    }
    ell -= dpx;
    // walk the vertex chain from exit_v toward entry_v
    int v = exit_v;
    while (v != entry_v) {
        int w = t.next[v][entry_v];
        int eid = -1;
        for (const auto& [cand, other] : t.incident[v])
            if (other == w) { eid = cand; break; }
        double len = t.edges[eid].length;
        if (ell <= len) {
            double off = (t.edges[eid].a == v) ? ell : len - ell;
            return clamp_to_edge(t, eid, off);
        }
        ell -= len;
        v = w;
    }
    // final partial segment on q's edge, moving from entry_v toward q
    double off = (entry_v == eq.a) ? ell : eq.length - ell;
    return clamp_to_edge(t, q.edge, off);
}

// Exact tree barycenter: the objective is convex and piecewise quadratic along
// every edge, so scan all edges and minimize each restriction in closed form.
TreePoint tree_barycenter(const TreeTopology& t, std::span<const Point> pts, std::span<const double> w) {
    const size_t n = pts.size();
    std::vector<TreePoint> tp(n);
    for (size_t i = 0; i < n; ++i) tp[i] = std::get<TreePoint>(pts[i].value);

    double best_val = std::numeric_limits<double>::infinity();
    TreePoint best{0, 0.0};
    std::vector<double> bps;
    for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
        const auto& ed = t.edges[e];
        const double len = ed.length;
        // f_i(tau): distance from the point at offset tau on edge e to sample i
        //   on-edge sample:  |tau - o_i|
        //   off-edge sample: min(tau + A_i, (len - tau) + B_i)
        std::vector<double> A(n), B(n);
        std::vector<char> on_edge(n);
        bps.clear();
        bps.push_back(0.0);
        bps.push_back(len);
        for (size_t i = 0; i < n; ++i) {
            on_edge[i] = (tp[i].edge == e);
            if (on_edge[i]) {
                A[i] = tp[i].offset;
                if (A[i] > 0.0 && A[i] < len) bps.push_back(A[i]);
            } else {
                A[i] = tree_point_vertex_dist(t, tp[i], ed.a);
                B[i] = tree_point_vertex_dist(t, tp[i], ed.b);
                double star = 0.5 * (len + B[i] - A[i]);
                if (star > 0.0 && star < len) bps.push_back(star);
            }
        }
        std::sort(bps.begin(), bps.end());
        bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
        for (size_t seg = 0; seg + 1 < bps.size(); ++seg) {
            double lo = bps[seg], hi = bps[seg + 1];
            double mid = 0.5 * (lo + hi);
            // on this segment every f_i is s_i tau + c_i with s_i = +-1
            double sumw = 0.0, lin = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double s, c;
                if (on_edge[i]) {
                    s = (mid >= A[i]) ? 1.0 : -1.0;
                    c = -s * A[i];
                } else if (mid + A[i] <= (len - mid) + B[i]) {
                    s = 1.0;
                    c = A[i];
                } else {
                    s = -1.0;
                    c = len + B[i];
                }
                sumw += w[i];
                lin += w[i] * s * c;
            }
            double tau = std::clamp(-lin / sumw, lo, hi);
            double val = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double f;
                if (on_edge[i])
                    f = std::fabs(tau - A[i]);
                else
                    f = std::min(tau + A[i], (len - tau) + B[i]);
                val += w[i] * f * f;
            }
            if (val < best_val) {
                best_val = val;
                best = TreePoint{e, tau};
            }
        }
    }
    return best;
}

HyperboloidPoint hyper_geodesic(const HyperboloidPoint& p, const HyperboloidPoint& q, double t) {
    double d = hyper_distance(p, q);
    if (d == 0.0) return p;
    double sh = std::sinh(d);
    double a = std::sinh((1.0 - t) * d) / sh;
    double b = std::sinh(t * d) / sh;
    return renormalize(a * p.x0 + b * q.x0, a * p.x1 + b * q.x1, a * p.x2 + b * q.x2);
}

// Karcher descent: b <- exp_b(mean of log_b(x_i)). Linearly convergent on the
// hyperboloid for weighted means of finitely many points.
HyperboloidPoint hyper_barycenter(std::span<const Point> pts, std::span<const double> w, double tol,
                                  const TargetSpace& space) {
    double W = 0.0;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto& h = std::get<HyperboloidPoint>(pts[i].value);
        W += w[i];
        s0 += w[i] * h.x0;
        s1 += w[i] * h.x1;
        s2 += w[i] * h.x2;
    }
    HyperboloidPoint b = renormalize(s0 / W, s1 / W, s2 / W);
    const int cap = 500;
    double step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cap; ++it) {
        double v0 = 0.0, v1 = 0.0, v2 = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            const auto& x = std::get<HyperboloidPoint>(pts[i].value);
            double d = hyper_distance(b, x);
            if (d == 0.0) continue;
            double c = mink(b, x);
            double sh = std::sinh(d);
            double f = w[i] / W * d / sh;
            v0 += f * (x.x0 - c * b.x0);
            v1 += f * (x.x1 - c * b.x1);
            v2 += f * (x.x2 - c * b.x2);
        }
        double norm2 = v1 * v1 + v2 * v2 - v0 * v0; // tangent vectors are spacelike
        step = std::sqrt(std::max(0.0, norm2));
        if (step < tol) return b;
        double ch = std::cosh(step), sh = std::sinh(step) / step;
        b = renormalize(ch * b.x0 + sh * v0, ch * b.x1 + sh * v1, ch * b.x2 + sh * v2);
    }
    throw ConvergenceError("hyperboloid barycenter did not converge within the iteration cap",
                           space.canonical(Point{b}), step);
}

} // namespace

// ---------------------------------------------------------------------------
// metric operations
// ---------------------------------------------------------------------------

double TargetSpace::distance(const Point& pa, const Point& pb) const {
    validate(pa);
    validate(pb);
    switch (impl_->kind) {
        case SpaceKind::euclidean: {
            const auto& a = std::get<EuclideanVec>(pa.value).coords;
            const auto& b = std::get<EuclideanVec>(pb.value).coords;
            double s = 0.0;
            for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
            return std::sqrt(s);
        }
        case SpaceKind::metric_tree: {
            Point ca = canonical(pa), cb = canonical(pb);
            return tree_distance(impl_->tree, std::get<TreePoint>(ca.value), std::get<TreePoint>(cb.value));
        }
        case SpaceKind::hyperbolic:
            return hyper_distance(std::get<HyperboloidPoint>(pa.value), std::get<HyperboloidPoint>(pb.value));
        case SpaceKind::product: {
            const auto& a = std::get<ProductPoint>(pa.value).factors;
            const auto& b = std::get<ProductPoint>(pb.value).factors;
            double s = 0.0;
            for (size_t i = 0; i < a.size(); ++i) {
                double d = impl_->factors[i].distance(a[i], b[i]);
                s += d * d;
            }
            return std::sqrt(s);
        }
    }
    return 0.0;
}

Point TargetSpace::geodesic_point(const Point& pa, const Point& pb, double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::invalid_argument, "geodesic parameter outside [0,1]");
    validate(pa);
    validate(pb);
    if (t == 0.0) return canonical(pa);
    if (t == 1.0) return canonical(pb);
    switch (impl_->kind) {
        case SpaceKind::euclidean: {
            const auto& a = std::get<EuclideanVec>(pa.value).coords;
            const auto& b = std::get<EuclideanVec>(pb.value).coords;
            std::vector<double> c(a.size());
            for (size_t i = 0; i < a.size(); ++i) c[i] = (1.0 - t) * a[i] + t * b[i];
            return Point::euclidean(std::move(c));
        }
        case SpaceKind::metric_tree: {
            Point ca = canonical(pa), cb = canonical(pb);
            const auto& a = std::get<TreePoint>(ca.value);
            const auto& b = std::get<TreePoint>(cb.value);
            double d = tree_distance(impl_->tree, a, b);
            if (d == 0.0) return ca;
            return canonical(Point{tree_walk(impl_->tree, a, b, t * d)});
        }
        case SpaceKind::hyperbolic:
            return Point{hyper_geodesic(std::get<HyperboloidPoint>(pa.value),
                                        std::get<HyperboloidPoint>(pb.value), t)};
        case SpaceKind::product: {
            const auto& a = std::get<ProductPoint>(pa.value).factors;
            const auto& b = std::get<ProductPoint>(pb.value).factors;
            std::vector<Point> c;
            c.reserve(a.size());
            for (size_t i = 0; i < a.size(); ++i) c.push_back(impl_->factors[i].geodesic_point(a[i], b[i], t));
            return Point::product(std::move(c));
        }
    }
    return pa;
}

Point TargetSpace::weighted_barycenter(std::span<const Point> points, std::span<const double> weights,
                                       double tol) const {
    if (points.empty() || points.size() != weights.size())
        throw Error(Errc::invalid_argument, "barycenter needs nonempty, equally sized point/weight lists");
    for (double w : weights)
        if (!(w > 0.0)) throw Error(Errc::invalid_argument, "barycenter weights must be positive");
    for (const Point& p : points) validate(p);

    switch (impl_->kind) {
        case SpaceKind::euclidean: {
            std::vector<double> acc(impl_->dim, 0.0);
            double W = 0.0;
            for (size_t i = 0; i < points.size(); ++i) {
                const auto& c = std::get<EuclideanVec>(points[i].value).coords;
                for (int k = 0; k < impl_->dim; ++k) acc[k] += weights[i] * c[k];
                W += weights[i];
            }
            for (double& v : acc) v /= W;
            return Point::euclidean(std::move(acc));
        }
        case SpaceKind::metric_tree: {
            std::vector<Point> canon(points.begin(), points.end());
            for (auto& p : canon) p = canonical(std::move(p));
            return canonical(Point{tree_barycenter(impl_->tree, canon, weights)});
        }
        case SpaceKind::hyperbolic:
            return Point{hyper_barycenter(points, weights, std::max(tol * 1e-2, 1e-15), *this)};
        case SpaceKind::product: {
            std::vector<Point> out;
            out.reserve(impl_->factors.size());
            std::vector<Point> column(points.size());
            for (size_t f = 0; f < impl_->factors.size(); ++f) {
                for (size_t i = 0; i < points.size(); ++i)
                    column[i] = std::get<ProductPoint>(points[i].value).factors[f];
                out.push_back(impl_->factors[f].weighted_barycenter(column, weights, tol));
            }
            return Point::product(std::move(out));
        }
    }
    return points[0];
}

Point TargetSpace::project_to_ball(const Point& p, const Point& center, double radius) const {
    if (!(radius >= 0.0)) throw Error(Errc::invalid_argument, "ball radius must be nonnegative");
    double d = distance(p, center);
    if (d <= radius) return p;
    return geodesic_point(center, p, radius / d);
}

ComparisonResiduals TargetSpace::comparison_residuals(const Point& P, const Point& Q, const Point& R,
                                                      const Point& S, double lambda, double mu,
                                                      double t) const {
    const double dPQ = distance(P, Q), dPR = distance(P, R), dPS = distance(P, S);
    const double dQR = distance(Q, R), dQS = distance(Q, S), dRS = distance(R, S);

    ComparisonResiduals r{};

    // CN inequality: geodesic from Q to S, apex P.
    {
        Point g = geodesic_point(Q, S, t);
        double lhs = distance(P, g);
        r[0] = (1.0 - t) * dPQ * dPQ + t * dPS * dPS - t * (1.0 - t) * dQS * dQS - lhs * lhs;
    }
    // quadrilateral comparison (1)
    r[1] = dPQ * dPQ + dQR * dQR + dRS * dRS + dPS * dPS - (dRS - dPQ) * (dRS - dPQ) -
           (dPR * dPR + dQS * dQS);
    // quadrilateral comparison (2): midpoint of Q and R
    {
        Point Qm = geodesic_point(Q, R, 0.5);
        double dPQm = distance(P, Qm), dSQm = distance(S, Qm);
        double dQmQ = distance(Qm, Q), dQmR = distance(Qm, R);
        double lhs = (dPS - dQR) * dQR;
        double rhs = (dPQm * dPQm - dPQ * dPQ - dQmQ * dQmQ) + (dSQm * dSQm - dRS * dRS - dQmR * dQmR);
        r[2] = lhs - rhs;
    }
    // comparison (3): point at parameter lambda on the geodesic P -> S
    {
        Point Pl = geodesic_point(P, S, lambda);
        double dPPl = distance(P, Pl), dPlQ = distance(Pl, Q);
        r[3] = (dPPl * dPPl + dPQ * dPQ - dPlQ * dPlQ) - lambda * (dPS * dPS + dPQ * dPQ - dQS * dQS);
    }
    // comparison (4): both quadrilateral bounds for d(P_lambda, Q_mu), smaller residual
    {
        Point Pl = geodesic_point(P, S, lambda);
        Point Qm = geodesic_point(Q, R, mu);
        double lhs = distance(Pl, Qm);
        double lhs2 = lhs * lhs;
        double rhs1 = mu * (1.0 - lambda) * dPR * dPR + (1.0 - mu) * lambda * dQS * dQS +
                      mu * lambda * dRS * dRS + (1.0 - lambda) * (1.0 - mu) * dPQ * dPQ -
                      lambda * (1.0 - lambda) * dPS * dPS - mu * (1.0 - mu) * dQR * dQR;
        double rhs2 = 2.0 * (1.0 - lambda) * dPQ * dPQ + 2.0 * lambda * dRS * dRS +
                      2.0 * (lambda - mu) * (lambda - mu) * dQR * dQR;
        r[4] = std::min(rhs1 - lhs2, rhs2 - lhs2);
    }
    return r;
}

// ---------------------------------------------------------------------------
// wire encoding
// ---------------------------------------------------------------------------

std::string TargetSpace::encode_point(const Point& p) const {
    validate(p);
    switch (impl_->kind) {
        case SpaceKind::euclidean: {
            const auto& c = std::get<EuclideanVec>(p.value).coords;
            std::string s;
            for (size_t i = 0; i < c.size(); ++i) s += (i ? ";" : "") + format_double(c[i]);
            return s;
        }
        case SpaceKind::metric_tree: {
            Point cp = canonical(p);
            const auto& t = std::get<TreePoint>(cp.value);
            return std::to_string(t.edge) + ":" + format_double(t.offset);
        }
        case SpaceKind::hyperbolic: {
            const auto& h = std::get<HyperboloidPoint>(p.value);
            return format_double(h.x0) + ";" + format_double(h.x1) + ";" + format_double(h.x2);
        }
        case SpaceKind::product: {
            const auto& f = std::get<ProductPoint>(p.value).factors;
            std::string s;
            for (size_t i = 0; i < f.size(); ++i)
                s += (i ? "|" : "") + std::string("(") + impl_->factors[i].encode_point(f[i]) + ")";
            return s;
        }
    }
    return "";
}

Point TargetSpace::decode_point(const std::string& text) const {
    switch (impl_->kind) {
        case SpaceKind::euclidean: {
            auto parts = split(text, ';');
            if (static_cast<int>(parts.size()) != impl_->dim)
                throw Error(Errc::invalid_argument, "Euclidean point encoding has wrong coordinate count: " + text);
            std::vector<double> c;
            for (const auto& s : parts) c.push_back(parse_double(s, "point encoding"));
            Point p = Point::euclidean(std::move(c));
            validate(p);
            return p;
        }
        case SpaceKind::metric_tree: {
            auto colon = text.find(':');
            if (colon == std::string::npos) {
                // bare vertex names are accepted and mapped to the canonical encoding
                auto it = impl_->tree.index.find(text);
                if (it != impl_->tree.index.end()) return tree_vertex_point(it->second);
                throw Error(Errc::invalid_argument, "tree point encoding must be edge:offset, got: " + text);
            }
            int edge = static_cast<int>(parse_double(text.substr(0, colon), "tree edge id"));
            double off = parse_double(text.substr(colon + 1), "tree offset");
            Point p = Point::tree(edge, off);
            validate(p);
            return canonical(p);
        }
        case SpaceKind::hyperbolic: {
            auto parts = split(text, ';');
            if (parts.size() != 3)
                throw Error(Errc::invalid_argument, "hyperboloid point encoding needs 3 coordinates: " + text);
            Point p = Point::hyperboloid(parse_double(parts[0], "x0"), parse_double(parts[1], "x1"),
                                         parse_double(parts[2], "x2"));
            validate(p);
            return p;
        }
        case SpaceKind::product: {
            auto parts = split(text, '|');
            if (parts.size() != impl_->factors.size())
                throw Error(Errc::invalid_argument, "product point encoding has wrong factor count: " + text);
            std::vector<Point> f;
            for (size_t i = 0; i < parts.size(); ++i) {
                std::string s = parts[i];
                if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
                f.push_back(impl_->factors[i].decode_point(s));
            }
            return Point::product(std::move(f));
        }
    }
    throw Error(Errc::invalid_argument, "cannot decode point: " + text);
}

// ---------------------------------------------------------------------------
// generic helpers
// ---------------------------------------------------------------------------

Point sturm_mean(const TargetSpace& space, std::span<const Point> points, std::span<const double> weights,
                 double tol, int max_passes) {
    if (points.empty() || points.size() != weights.size())
        throw Error(Errc::invalid_argument, "sturm_mean needs nonempty, equally sized lists");
    std::vector<size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(0x5eedu);
    Point b = points[0];
    double acc = 0.0;
    double moved = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < max_passes; ++pass) {
        // fixed shuffled cycle: reshuffle deterministically each pass
        for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        Point prev = b;
        for (size_t idx : order) {
            acc += weights[idx];
            b = space.geodesic_point(b, points[idx], weights[idx] / acc);
        }
        moved = space.distance(prev, b);
        if (moved < tol) return b;
    }
    throw ConvergenceError("sturm_mean did not converge within the pass cap", b, moved);
}

Point random_point(const TargetSpace& space, Rng& rng, double scale) {
    switch (space.kind()) {
        case SpaceKind::euclidean: {
            std::vector<double> c(space.euclidean_dim());
            for (double& v : c) v = rng.uniform(-scale, scale);
            return Point::euclidean(std::move(c));
        }
        case SpaceKind::metric_tree: {
            int e = static_cast<int>(rng.below(static_cast<std::uint64_t>(space.tree_edge_count())));
            double off = rng.uniform() * space.tree_edge_length(e);
            return space.canonical(Point::tree(e, off));
        }
        case SpaceKind::hyperbolic: {
            double r = rng.uniform() * scale;
            double theta = rng.uniform() * 6.283185307179586476925286766559;
            return Point::hyperboloid(std::cosh(r), std::sinh(r) * std::cos(theta),
                                      std::sinh(r) * std::sin(theta));
        }
        case SpaceKind::product: {
            std::vector<Point> f;
            for (const auto& factor : space.factors()) f.push_back(random_point(factor, rng, scale));
            return Point::product(std::move(f));
        }
    }
    throw Error(Errc::invalid_argument, "unknown space kind");
}

} // namespace hmf
