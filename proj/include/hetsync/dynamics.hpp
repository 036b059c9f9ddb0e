#pragma once

#include "hetsync/measures.hpp"
#include "hetsync/types.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hetsync {

/**
 * Uncoupled node dynamics x' = f(x; t) of one network member.
 *
 * The input matrix and output map are the identity, so the coupled node
 * evolves as x' = f(x; t) + u. Jacobian bounds and the stability component
 * are optional; certification in Jacobian mode needs the former.
 */
struct NodeModel {
    std::string name;
    std::size_t dimension = 0;
    VectorField field;
    std::function<JacobianBounds(double radius)> jacobian_bounds;
    ScalarField stability_component;

    Vector operator()(const Vector& x, double t) const { return field(x, t); }
};

/**
 * Modified van der Pol oscillator
 *
 *     x1' = x2 - epsilon x1
 *     x2' = mu (1 - x1^2 - eta x2^2) x2 - x1
 *
 * with stability component h(x) = epsilon x1^2 + mu x2^2 (x1^2 + eta x2^2 - 1),
 * so that x^T f(x) = -h(x). Jacobian bounds over ||x|| <= r use |x1 x2| <= r^2/2:
 * S = [[0, 1], [mu r^2 + 1, mu]].
 */
NodeModel make_vdp(double mu, double epsilon, double eta);

/// f(x) = rate * x in the given dimension.
NodeModel make_linear(std::size_t dimension, double rate);

using ModelParameters = std::map<std::string, double>;

/**
 * Built-in model registry.
 *
 *   "vdp"    : mu (1), epsilon (0.01), eta (0.001)
 *   "linear" : dim (1), rate (-1)
 *
 * Unknown names or parameters throw ValidationError.
 */
NodeModel make_builtin_model(const std::string& name, const ModelParameters& params);

std::vector<std::string> builtin_model_names();

/// (1/N) sum_i f_i(x_i; t)
Vector average_field(const std::vector<NodeModel>& models, const StackedState& x, double t);

struct ErrorDecomposition {
    Vector average;             // node-state average
    std::vector<Vector> errors; // e_i = x_i - average
    double e_tot = 0.0;         // (1/N) sum_i ||e_i||_2
};

ErrorDecomposition decompose_errors(const StackedState& x, std::size_t node_count,
                                    std::size_t dimension);

/// e_tot only, without materializing the per-node errors.
double total_error(const StackedState& x, std::size_t node_count, std::size_t dimension);

/// Node-state average of a stacked state.
Vector state_average(const StackedState& x, std::size_t node_count, std::size_t dimension);

}  // namespace hetsync
