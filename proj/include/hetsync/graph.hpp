#pragma once

#include "hetsync/types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace hetsync {

/// Undirected edge, stored with a < b.
struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/**
 * Undirected, unweighted communication graph.
 *
 * Immutable after construction. Edges are kept sorted, which fixes the column
 * order of the incidence matrix.
 */
class Graph {
public:
    Graph() = default;

    std::size_t node_count() const noexcept { return node_count_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    bool has_edge(std::size_t i, std::size_t j) const;
    std::vector<std::size_t> neighbors(std::size_t i) const;

    friend Graph build_graph(std::size_t node_count,
                             const std::vector<std::pair<std::size_t, std::size_t>>& edges);

private:
    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
};

/// Validates and builds a graph. Throws ValidationError naming the offending edge.
Graph build_graph(std::size_t node_count,
                  const std::vector<std::pair<std::size_t, std::size_t>>& edges);

Graph complete_graph(std::size_t node_count);
Graph path_graph(std::size_t node_count);

/// L = D - A.
Matrix laplacian(const Graph& g);

/// N x |E| signed incidence matrix; the lower-index endpoint of each edge gets +1.
Matrix incidence(const Graph& g);

/// Second-smallest Laplacian eigenvalue. Exactly 0 for disconnected graphs and N = 1.
double algebraic_connectivity(const Graph& g);

bool is_connected(const Graph& g);

inline constexpr std::size_t kDensityEnumerationLimit = 20;

/**
 * Minimum density of a connected graph:
 *
 *     min over nonempty proper S of  N * cut(S, V \ S) / (2 |S| (N - |S|))
 *
 * evaluated by exhaustive enumeration of the 2^(N-1) - 1 bipartitions. Equals
 * N/2 on complete graphs.
 */
double minimum_density(const Graph& g, std::size_t enumeration_limit = kDensityEnumerationLimit);

}  // namespace hetsync
