// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include "hmflow/mesh.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hmf {

DomainKind domain_kind_from_string(const std::string& s) {
    if (s == "interval-dirichlet") return DomainKind::interval_dirichlet;
    if (s == "grid2d-dirichlet") return DomainKind::grid2d_dirichlet;
    if (s == "cycle") return DomainKind::cycle;
    if (s == "torus2d") return DomainKind::torus2d;
    throw Error(Errc::invalid_argument, "unknown domain kind '" + s + "'");
}

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::interval_dirichlet: return "interval-dirichlet";
        case DomainKind::grid2d_dirichlet: return "grid2d-dirichlet";
        case DomainKind::cycle: return "cycle";
        case DomainKind::torus2d: return "torus2d";
    }
    return "?";
}

double MeshDomain::total_measure() const {
    double s = 0.0;
    for (double m : measure) s += m;
    return s;
}

void MeshDomain::ensure_distances() const {
    std::call_once(dist_once_, [this] {
        const int n = vertex_count();
        dist_.assign(n, {});
        for (int src = 0; src < n; ++src) {
            auto& d = dist_[src];
            d.assign(n, std::numeric_limits<double>::infinity());
            d[src] = 0.0;
            using Item = std::pair<double, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            pq.push({0.0, src});
            while (!pq.empty()) {
                auto [dist, v] = pq.top();
                pq.pop();
                if (dist > d[v]) continue;
                for (size_t k = 0; k < adjacency[v].size(); ++k) {
                    int w = adjacency[v][k].first;
                    double len = edge_length_of_[v][k];
                    if (d[v] + len < d[w]) {
                        d[w] = d[v] + len;
                        pq.push({d[w], w});
                    }
                }
            }
        }
    });
}

double MeshDomain::graph_distance(int i, int j) const {
    ensure_distances();
    return dist_[i][j];
}

const std::vector<double>& MeshDomain::distances_from(int i) const {
    ensure_distances();
    return dist_[i];
}

double MeshDomain::graph_diameter() const {
    ensure_distances();
    double m = 0.0;
    for (const auto& row : dist_)
        for (double d : row) m = std::max(m, d);
    return m;
}

double MeshDomain::confinement_radius() const {
    if (boundary.empty()) return 0.5 * graph_diameter();
    double r = 0.0;
    for (int v = 0; v < vertex_count(); ++v) {
        if (is_boundary[v]) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (int b : boundary) nearest = std::min(nearest, graph_distance(v, b));
        r = std::max(r, nearest);
    }
    return r;
}

std::vector<int> MeshDomain::vertices_with_clear_ball(double radius) const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v) {
        if (is_boundary[v]) continue;
        bool clear = true;
        for (int b : boundary) {
            if (graph_distance(v, b) <= radius) {
                clear = false;
                break;
            }
        }
        if (clear) out.push_back(v);
    }
    return out;
}

namespace {

void add_edge(MeshDomain& d, int i, int j, double weight, double len) {
    d.edges.push_back({i, j, weight, len});
    d.adjacency[i].push_back({j, weight});
    d.adjacency[j].push_back({i, weight});
    d.edge_length_of_[i].push_back(len);
    d.edge_length_of_[j].push_back(len);
}

} // namespace

std::shared_ptr<const MeshDomain> build_domain(DomainKind kind, int n, double length) {
    if (n < 3) throw Error(Errc::invalid_argument, "domain needs n >= 3 vertices per dimension");
    if (!(length > 0.0)) throw Error(Errc::invalid_argument, "domain length must be positive");
    auto dom = std::make_shared<MeshDomain>();
    MeshDomain& d = *dom;
    d.kind = kind;
    d.n_per_dim = n;
    d.length = length;

    const bool periodic = (kind == DomainKind::cycle || kind == DomainKind::torus2d);
    const double delta = periodic ? length / n : length / (n - 1);
    d.spacing = delta;
    d.dim = (kind == DomainKind::grid2d_dirichlet || kind == DomainKind::torus2d) ? 2 : 1;
    const double mu = std::pow(delta, d.dim);
    const double w = std::pow(delta, d.dim - 2);

    if (d.dim == 1) {
        d.coords.resize(n);
        d.measure.assign(n, mu);
        d.adjacency.resize(n);
        d.edge_length_of_.resize(n);
        d.is_boundary.assign(n, 0);
        for (int i = 0; i < n; ++i) d.coords[i] = {i * delta, 0.0};
        for (int i = 0; i + 1 < n; ++i) add_edge(d, i, i + 1, w, delta);
        if (kind == DomainKind::cycle) {
            add_edge(d, n - 1, 0, w, delta);
        } else {
            d.boundary = {0, n - 1};
            d.is_boundary[0] = d.is_boundary[n - 1] = 1;
        }
    } else {
        const int nv = n * n;
        d.coords.resize(nv);
        d.measure.assign(nv, mu);
        d.adjacency.resize(nv);
        d.edge_length_of_.resize(nv);
        d.is_boundary.assign(nv, 0);
        auto id = [n](int ix, int iy) { return iy * n + ix; };
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) d.coords[id(ix, iy)] = {ix * delta, iy * delta};
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                if (ix + 1 < n)
                    add_edge(d, id(ix, iy), id(ix + 1, iy), w, delta);
                else if (kind == DomainKind::torus2d)
                    add_edge(d, id(ix, iy), id(0, iy), w, delta);
                if (iy + 1 < n)
                    add_edge(d, id(ix, iy), id(ix, iy + 1), w, delta);
                else if (kind == DomainKind::torus2d)
                    add_edge(d, id(ix, iy), id(ix, 0), w, delta);
            }
        }
        if (kind == DomainKind::grid2d_dirichlet) {
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix)
                    if (ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1) {
                        d.boundary.push_back(id(ix, iy));
                        d.is_boundary[id(ix, iy)] = 1;
                    }
            std::sort(d.boundary.begin(), d.boundary.end());
        }
    }
    for (int v = 0; v < d.vertex_count(); ++v)
        if (!d.is_boundary[v]) d.interior.push_back(v);
    return dom;
}

ScalarField::ScalarField(std::shared_ptr<const MeshDomain> d, std::vector<double> v)
    : domain(std::move(d)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != domain->vertex_count())
        throw Error(Errc::invalid_argument, "scalar field size does not match the domain");
    for (double x : values)
        if (!std::isfinite(x)) throw Error(Errc::invalid_argument, "scalar field has a non-finite value");
}

MapState::MapState(std::shared_ptr<const MeshDomain> d, TargetSpace s, std::vector<Point> vals,
                   std::optional<std::vector<Point>> boundary_map)
    : domain(std::move(d)), space(std::move(s)), values(std::move(vals)), psi(std::move(boundary_map)) {
    if (static_cast<int>(values.size()) != domain->vertex_count())
        throw Error(Errc::invalid_argument, "map state size does not match the domain");
    for (auto& p : values) {
        space.validate(p);
        p = space.canonical(std::move(p));
    }
    if (psi) {
        if (psi->size() != domain->boundary.size())
            throw Error(Errc::invalid_argument, "boundary map size does not match the boundary set");
        for (auto& p : *psi) {
            space.validate(p);
            p = space.canonical(std::move(p));
        }
        apply_boundary();
    }
}

void MapState::apply_boundary() {
    if (!psi) return;
    for (size_t k = 0; k < domain->boundary.size(); ++k) values[domain->boundary[k]] = (*psi)[k];
}

bool MapState::same_boundary(const MapState& other) const {
    if (domain != other.domain || !space.same_space(other.space)) return false;
    if (psi.has_value() != other.psi.has_value()) return false;
    if (!psi) return true;
    for (size_t k = 0; k < psi->size(); ++k)
        if (!space.equal((*psi)[k], (*other.psi)[k])) return false;
    return true;
}

EnergyResult energy(const MapState& u) {
    const MeshDomain& d = *u.domain;
    EnergyResult out;
    out.density = ScalarField(u.domain, 0.0);
    std::vector<double> vertex_sum(d.vertex_count(), 0.0);
    double total = 0.0;
    for (const auto& e : d.edges) {
        double dist = u.space.distance(u.values[e.i], u.values[e.j]);
        double contrib = e.weight * dist * dist;
        total += contrib;
        vertex_sum[e.i] += contrib;
        vertex_sum[e.j] += contrib;
    }
    for (int v = 0; v < d.vertex_count(); ++v) out.density[v] = vertex_sum[v] / (2.0 * d.measure[v]);
    out.total = total;
    return out;
}

double l2_distance(const MapState& u, const MapState& v) {
    if (u.domain != v.domain || !u.space.same_space(v.space))
        throw Error(Errc::domain_mismatch, "l2_distance needs matching domain and target");
    double s = 0.0;
    for (int i = 0; i < u.domain->vertex_count(); ++i) {
        double d = u.space.distance(u.values[i], v.values[i]);
        s += u.domain->measure[i] * d * d;
    }
    return std::sqrt(s);
}

ScalarField laplacian(const ScalarField& f) {
    const MeshDomain& d = *f.domain;
    ScalarField out(f.domain, 0.0);
    for (int i = 0; i < d.vertex_count(); ++i) {
        double acc = 0.0;
        for (const auto& [j, w] : d.adjacency[i]) acc += w * (f.values[j] - f.values[i]);
        out[i] = acc / d.measure[i];
    }
    return out;
}

ScalarField heat_evolve(const ScalarField& f, double s, int substeps) {
    if (!(s > 0.0)) throw Error(Errc::invalid_argument, "heat_evolve needs s > 0");
    if (substeps < 1) throw Error(Errc::invalid_argument, "heat_evolve needs substeps >= 1");
    const MeshDomain& d = *f.domain;
    const int n = d.vertex_count();
    const double h = s / substeps;

    Eigen::SparseMatrix<double> A(n, n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(n + 2 * d.edges.size());
    std::vector<double> diag(n, 0.0);
    for (const auto& e : d.edges) {
        diag[e.i] += h * e.weight;
        diag[e.j] += h * e.weight;
        trips.emplace_back(e.i, e.j, -h * e.weight);
        trips.emplace_back(e.j, e.i, -h * e.weight);
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, d.measure[i] + diag[i]);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::numeric, "heat_evolve: implicit Euler matrix factorization failed");

    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = f.values[i] * d.measure[i];
    Eigen::VectorXd cur;
    for (int step = 0; step < substeps; ++step) {
        cur = solver.solve(x);
        if (solver.info() != Eigen::Success) throw Error(Errc::numeric, "heat_evolve: solve failed");
        for (int i = 0; i < n; ++i) x[i] = cur[i] * d.measure[i];
    }
    ScalarField out(f.domain, 0.0);
    for (int i = 0; i < n; ++i) out[i] = cur[i];
    return out;
}

LatticeProfile ks_energy_profile(const LatticeMap& map, double eps) {
    const double delta = map.spacing;
    if (!(eps >= 2.0 * delta))
        throw Error(Errc::invalid_argument, "ks_energy_profile needs eps >= 2 * lattice spacing");
    const int K = static_cast<int>(std::floor(eps / delta + 1e-9));
    LatticeProfile out;
    out.nx = map.nx;
    out.ny = map.ny;
    out.e.assign(map.values.size(), 0.0);
    out.valid.assign(map.values.size(), 0);
    const bool integer_radius = std::fabs(eps / delta - K) <= 1e-9;

    if (map.dim == 1) {
        if (K >= map.nx) throw Error(Errc::invalid_argument, "ks_energy_profile: eps too large for lattice");
        const double c12 = 1.5;
        // quadrature weights over offsets -K..K; composite Simpson when the
        // radius is a whole number of cells, plain cell sums otherwise
        std::vector<double> qw(2 * K + 1, delta);
        if (integer_radius) {
            for (int k = -K; k <= K; ++k) {
                double wgt;
                if (k == -K || k == K)
                    wgt = 1.0;
                else if ((k + K) % 2 == 1)
                    wgt = 4.0;
                else
                    wgt = 2.0;
                qw[k + K] = wgt * delta / 3.0;
            }
        } else {
            qw.front() = qw.back() = 0.5 * delta;
        }
        for (int ix = K; ix < map.nx - K; ++ix) {
            double acc = 0.0;
            const Point& here = map.values[ix];
            for (int k = -K; k <= K; ++k) {
                double dd = map.space.distance(here, map.values[ix + k]);
                acc += qw[k + K] * dd * dd;
            }
            out.e[ix] = c12 * acc / std::pow(eps, 3);
            out.valid[ix] = 1;
        }
        return out;
    }

    // 2-D: weights from the disk of radius eps, sub-sampled on boundary cells
    if (K >= map.nx || K >= map.ny)
        throw Error(Errc::invalid_argument, "ks_energy_profile: eps too large for lattice");
    const double c22 = 4.0 / 3.14159265358979323846264338328;
    const int R = K + 1;
    std::vector<std::pair<std::array<int, 2>, double>> stencil;
    const double half_diag = 0.5 * delta * std::sqrt(2.0);
    for (int ky = -R; ky <= R; ++ky) {
        for (int kx = -R; kx <= R; ++kx) {
            double cx = kx * delta, cy = ky * delta;
            double dc = std::hypot(cx, cy);
            double wgt;
            if (dc + half_diag <= eps) {
                wgt = delta * delta;
            } else if (dc - half_diag >= eps) {
                continue;
            } else {
                const int sub = 32;
                int inside = 0;
                for (int sy = 0; sy < sub; ++sy)
                    for (int sx = 0; sx < sub; ++sx) {
                        double px = cx + (sx + 0.5) / sub * delta - 0.5 * delta;
                        double py = cy + (sy + 0.5) / sub * delta - 0.5 * delta;
                        if (px * px + py * py <= eps * eps) inside++;
                    }
                if (inside == 0) continue;
                wgt = delta * delta * inside / (sub * sub);
            }
            stencil.push_back({{kx, ky}, wgt});
        }
    }
    for (int iy = R; iy < map.ny - R; ++iy) {
        for (int ix = R; ix < map.nx - R; ++ix) {
            const Point& here = map.values[map.index(ix, iy)];
            double acc = 0.0;
            for (const auto& [off, wgt] : stencil) {
                double dd = map.space.distance(here, map.values[map.index(ix + off[0], iy + off[1])]);
                acc += wgt * dd * dd;
            }
            out.e[map.index(ix, iy)] = c22 * acc / std::pow(eps, 4);
            out.valid[map.index(ix, iy)] = 1;
        }
    }
    return out;
}

} // namespace hmf
