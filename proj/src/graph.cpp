#include "hetsync/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

namespace hetsync {

namespace {

std::string edge_name(std::size_t i, std::size_t j) {
    std::ostringstream os;
    os << "(" << i << "," << j << ")";
    return os.str();
}

}  // namespace

Graph build_graph(std::size_t node_count,
                  const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    if (node_count < 1) {
        throw ValidationError("graph: node_count must be at least 1");
    }
    Graph g;
    g.node_count_ = node_count;
    g.edges_.reserve(edges.size());
    for (const auto& [i, j] : edges) {
        if (i >= node_count || j >= node_count) {
            throw ValidationError("graph: edge " + edge_name(i, j) + " out of range for " +
                                  std::to_string(node_count) + " nodes");
        }
        if (i == j) {
            throw ValidationError("graph: edge " + edge_name(i, j) + " is a self-loop");
        }
        g.edges_.push_back(Edge{std::min(i, j), std::max(i, j)});
    }
    std::sort(g.edges_.begin(), g.edges_.end());
    auto dup = std::adjacent_find(g.edges_.begin(), g.edges_.end());
    if (dup != g.edges_.end()) {
        throw ValidationError("graph: duplicate edge " + edge_name(dup->a, dup->b));
    }
    return g;
}

Graph complete_graph(std::size_t node_count) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < node_count; ++i) {
        for (std::size_t j = i + 1; j < node_count; ++j) {
            edges.emplace_back(i, j);
        }
    }
    return build_graph(node_count, edges);
}

Graph path_graph(std::size_t node_count) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i + 1 < node_count; ++i) {
        edges.emplace_back(i, i + 1);
    }
    return build_graph(node_count, edges);
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
    const Edge e{std::min(i, j), std::max(i, j)};
    return std::binary_search(edges_.begin(), edges_.end(), e);
}

std::vector<std::size_t> Graph::neighbors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges_) {
        if (e.a == i) out.push_back(e.b);
        else if (e.b == i) out.push_back(e.a);
    }
    return out;
}

Matrix laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Matrix l = Matrix::Zero(n, n);
    for (const auto& e : g.edges()) {
        const auto a = static_cast<Eigen::Index>(e.a);
        const auto b = static_cast<Eigen::Index>(e.b);
        l(a, b) = -1.0;
        l(b, a) = -1.0;
        l(a, a) += 1.0;
        l(b, b) += 1.0;
    }
    return l;
}

Matrix incidence(const Graph& g) {
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(g.node_count()),
                            static_cast<Eigen::Index>(g.edge_count()));
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const auto& e = g.edges()[k];
        b(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(k)) = 1.0;
        b(static_cast<Eigen::Index>(e.b), static_cast<Eigen::Index>(k)) = -1.0;
    }
    return b;
}

bool is_connected(const Graph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) return false;
    // union-find
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::size_t components = n;
    for (const auto& e : g.edges()) {
        const auto ra = find(e.a);
        const auto rb = find(e.b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components == 1;
}

double algebraic_connectivity(const Graph& g) {
    if (g.node_count() < 2 || !is_connected(g)) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian(g), Eigen::EigenvaluesOnly);
    // eigenvalues come back sorted ascending
    return solver.eigenvalues()(1);
}

double minimum_density(const Graph& g, std::size_t enumeration_limit) {
    const std::size_t n = g.node_count();
    if (n < 2) {
        throw ValidationError("minimum_density: graph needs at least two nodes");
    }
    if (n > enumeration_limit || n > 62) {
        throw ValidationError("minimum_density: enumeration limit exceeded (" + std::to_string(n) +
                              " > " + std::to_string(enumeration_limit) + ")");
    }
    if (!is_connected(g)) {
        throw ValidationError("minimum_density: graph is disconnected");
    }

    // Fix node 0 inside S; every bipartition appears exactly once.
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 1; mask < full; mask += 2) {
        std::size_t cut = 0;
        for (const auto& e : g.edges()) {
            const bool in_a = (mask >> e.a) & 1U;
            const bool in_b = (mask >> e.b) & 1U;
            cut += static_cast<std::size_t>(in_a != in_b);
        }
        const auto size = static_cast<double>(std::popcount(mask));
        const double nn = static_cast<double>(n);
        const double density = nn * static_cast<double>(cut) / (2.0 * size * (nn - size));
        best = std::min(best, density);
    }
    return best;
}

}  // namespace hetsync
