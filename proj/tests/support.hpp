#pragma once

// Test-only helpers: random generators, reference networks and independent oracles.

#include "hetsync/dynamics.hpp"
#include "hetsync/graph.hpp"
#include "hetsync/measures.hpp"
#include "hetsync/simulate.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace hetsync::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
    return a;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

inline Vector random_in_ball(std::mt19937_64& rng, Eigen::Index n, double radius) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
    return v / v.norm() * radius * std::pow(u(rng), 1.0 / static_cast<double>(n));
}

/// Erdos-Renyi graph with edge probability p.
inline Graph random_graph(std::mt19937_64& rng, std::size_t nodes, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t j = i + 1; j < nodes; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
    return build_graph(nodes, edges);
}

/// Connectivity by depth-first search, independent of the union-find in the library.
inline bool dfs_connected(const Graph& g) {
    std::vector<bool> seen(g.node_count(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : g.neighbors(v)) {
            if (!seen[w]) {
                seen[w] = true;
                ++visited;
                stack.push_back(w);
            }
        }
    }
    return visited == g.node_count();
}

/**
 * f_i(x) = a_i . x + x^T H_i x with symmetric H_i. On ||x|| <= r the Jacobian
 * entry a_ij + 2 (H_i x)_j lies within 2 r ||H_i row j||_2 of a_ij, which
 * gives rigorous bounds for the QUAD construction.
 */
struct QuadraticField {
    Matrix a;
    std::vector<Matrix> h;

    static QuadraticField random(std::mt19937_64& rng, Eigen::Index n) {
        QuadraticField f;
        f.a = random_matrix(rng, n, 2.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Matrix m = random_matrix(rng, n, 0.5);
            f.h.push_back(0.5 * (m + m.transpose()));
        }
        return f;
    }

    Vector operator()(const Vector& x) const {
        Vector y = a * x;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += x.dot(h[static_cast<std::size_t>(i)] * x);
        return y;
    }

    VectorField field() const {
        return [f = *this](const Vector& x, double) { return f(x); };
    }

    JacobianBounds bounds(double r) const {
        const Eigen::Index n = a.rows();
        JacobianBounds b;
        b.radius = r;
        b.s = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double spread = 2.0 * r * h[static_cast<std::size_t>(i)].row(j).norm();
                b.s(i, j) = (i == j) ? std::max(0.0, a(i, i) + spread) : std::abs(a(i, j)) + spread;
            }
        }
        return b;
    }
};

inline std::vector<NodeModel> vdp_trio() {
    return {make_vdp(1.0, 0.01, 0.001), make_vdp(2.0, 0.01, 0.001), make_vdp(3.0, 0.01, 0.001)};
}

inline NetworkSystem vdp_trio_network(double c, double c_d) {
    return NetworkSystem::with_identity_matrices(vdp_trio(), complete_graph(3),
                                                 complete_graph(3), {c, c_d});
}

inline StackedState staggered_state() {
    StackedState x(6);
    x << 1.5, 1.5, 1.75, 1.75, 2.0, 2.0;
    return x;
}

}  // namespace hetsync::testing
