// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "hmflow/oracles.hpp"
#include "hmflow/scenario.hpp"

namespace hmf {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double integer_power(double base, int p) {
    double out = 1.0;
    for (int k = 0; k < p; ++k) out *= base;
    return out;
}

} // namespace

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
            if (pos[j] >= 0) B(k, pos[j]) -= w / std::sqrt(dom.measure[i] * dom.measure[j]);
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

std::vector<double> dense_resolvent_solve(const MeshDomain& dom, const std::vector<double>& u0,
                                          const std::vector<double>& psi_boundary, double h) {
    const int n = dom.vertex_count();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (dom.is_boundary[i]) {
            A(i, i) = 1.0;
            continue;
        }
        A(i, i) = dom.measure[i] / h;
        rhs[i] = dom.measure[i] * u0[i] / h;
        for (const auto& [j, w] : dom.adjacency[i]) {
            A(i, i) += w;
            A(i, j) -= w;
        }
    }
    for (size_t k = 0; k < dom.boundary.size(); ++k) rhs[dom.boundary[k]] = psi_boundary[k];
    Eigen::VectorXd x = A.partialPivLu().solve(rhs);
    return std::vector<double>(x.data(), x.data() + n);
}

Point tree_brute_barycenter(const TargetSpace& tree, std::span<const Point> points,
                            std::span<const double> weights, int grid_per_edge) {
    if (tree.kind() != SpaceKind::metric_tree)
        throw Error(Errc::invalid_argument, "tree_brute_barycenter needs a metric tree");
    double best = std::numeric_limits<double>::infinity();
    Point best_point = points[0];
    for (int e = 0; e < tree.tree_edge_count(); ++e) {
        double len = tree.tree_edge_length(e);
        for (int k = 0; k <= grid_per_edge; ++k) {
            Point probe = tree.canonical(Point::tree(e, len * k / grid_per_edge));
            double f = 0.0;
            for (size_t i = 0; i < points.size(); ++i) {
                double d = tree.distance(probe, points[i]);
                f += weights[i] * d * d;
            }
            if (f < best) {
                best = f;
                best_point = probe;
            }
        }
    }
    return best_point;
}

std::vector<double> grid_hj_closedform(int n, double delta, double slope, double eps, int p) {
    std::vector<double> out(n, 0.0);
    double denom = p * integer_power(eps, p - 1);
    for (int i = 0; i < n; ++i) {
        double best = 0.0;
        for (int j = 0; j < n; ++j) {
            double dist = std::fabs(i - j) * delta;
            double val = integer_power(dist, p) / denom - std::fabs(slope) * dist;
            best = std::min(best, val);
        }
        out[i] = best;
    }
    return out;
}

namespace {

std::map<std::string, std::string>::const_iterator require(const std::map<std::string, std::string>& m,
                                                           const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw Error(Errc::invalid_argument, "oracle parameter '" + key + "' is required");
    return it;
}

std::vector<double> parse_semicolon_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) out.push_back(std::stod(item));
    return out;
}

} // namespace

std::string oracle(const std::string& case_name, const std::map<std::string, std::string>& params,
                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto num = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : std::stod(it->second);
    };
    std::string csv;
    std::string filename;

    if (case_name == "euclidean-heat") {
        auto kind = domain_kind_from_string(params.count("kind") ? params.at("kind") : "interval-dirichlet");
        int n = static_cast<int>(num("n", 3));
        double length = num("length", static_cast<double>(n - 1));
        double t = num("t", 1.0);
        auto dom = build_domain(kind, n, length);
        std::vector<double> u0 = parse_semicolon_list(require(params, "u0")->second);
        if (static_cast<int>(u0.size()) != dom->vertex_count())
            throw Error(Errc::invalid_argument, "u0 needs one value per vertex");
        auto values = dense_heat_exact(*dom, u0, t);
        csv = "vertex_id,value\n";
        for (int i = 0; i < dom->vertex_count(); ++i)
            csv += std::to_string(i) + "," + format_double(values[i]) + "\n";
        filename = "oracle_euclidean_heat.csv";
    } else if (case_name == "tree-brute-barycenter") {
        double leg = num("leg", 2.0);
        int grid = static_cast<int>(num("grid", 400));
        auto tree = TargetSpace::tripod(leg);
        std::vector<Point> pts;
        {
            std::stringstream ss(require(params, "points")->second);
            std::string item;
            while (std::getline(ss, item, ';')) pts.push_back(tree.decode_point(item));
        }
        std::vector<double> w = params.count("weights")
                                    ? parse_semicolon_list(params.at("weights"))
                                    : std::vector<double>(pts.size(), 1.0);
        if (w.size() != pts.size())
            throw Error(Errc::invalid_argument, "weights must match the number of points");
        Point b = tree_brute_barycenter(tree, pts, w, grid);
        double f = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            double d = tree.distance(b, pts[i]);
            f += w[i] * d * d;
        }
        csv = "point,objective\n";
        csv += tree.encode_point(b) + "," + format_double(f) + "\n";
        filename = "oracle_tree_barycenter.csv";
    } else if (case_name == "grid-hj-closedform") {
        int n = static_cast<int>(num("n", 257));
        double length = num("length", 1.0);
        double delta = length / (n - 1);
        double slope = num("slope", 1.0);
        double eps = num("eps", 8.0 * delta);
        int p = static_cast<int>(num("p", 2));
        auto values = grid_hj_closedform(n, delta, slope, eps, p);
        csv = "vertex_id,value\n";
        for (int i = 0; i < n; ++i) csv += std::to_string(i) + "," + format_double(values[i]) + "\n";
        filename = "oracle_grid_hj.csv";
    } else {
        throw Error(Errc::invalid_argument, "unknown oracle case '" + case_name + "'");
    }

    std::string path = (fs::path(out_dir) / filename).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
    out << csv;
    return path;
}

} // namespace hmf
