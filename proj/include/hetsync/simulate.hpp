#pragma once

#include "hetsync/dynamics.hpp"
#include "hetsync/graph.hpp"
#include "hetsync/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hetsync {

// =============================================================================
// Network
// =============================================================================

struct CouplingGains {
    double c = 0.0;    // diffusive layer
    double c_d = 0.0;  // discontinuous layer
};

/**
 * N heterogeneous nodes coupled through
 *
 *     u_i = -c   sum_j L_ij   Gamma   (x_j - x_i)
 *           -c_d sum_j L^d_ij Gamma_d sign(x_j - x_i)
 *
 * over the diffusive graph G and the discontinuous graph G_d. P is the QUAD
 * weighting matrix used only by certification. Immutable once built.
 */
class NetworkSystem {
public:
    NetworkSystem(std::vector<NodeModel> models, Graph graph, Graph graph_d, CouplingGains gains,
                  Matrix gamma, Matrix gamma_d, Matrix p);

    /// Gamma = Gamma_d = P = I.
    static NetworkSystem with_identity_matrices(std::vector<NodeModel> models, Graph graph,
                                                Graph graph_d, CouplingGains gains);

    NetworkSystem with_gains(CouplingGains gains) const;

    std::size_t node_count() const noexcept { return models_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t state_size() const noexcept { return models_.size() * dimension_; }

    const std::vector<NodeModel>& models() const noexcept { return models_; }
    const Graph& graph() const noexcept { return graph_; }
    const Graph& graph_d() const noexcept { return graph_d_; }
    const CouplingGains& gains() const noexcept { return gains_; }
    const Matrix& gamma() const noexcept { return gamma_; }
    const Matrix& gamma_d() const noexcept { return gamma_d_; }
    const Matrix& p() const noexcept { return p_; }

private:
    std::vector<NodeModel> models_;
    Graph graph_;
    Graph graph_d_;
    CouplingGains gains_;
    Matrix gamma_;
    Matrix gamma_d_;
    Matrix p_;
    std::size_t dimension_ = 0;
};

/// Componentwise sign with sign(0) = 0.
Vector sign(const Vector& v);

/// Coupling input of node i, evaluated literally from the Laplacian entries.
Vector coupling_input(std::size_t i, const StackedState& x, const NetworkSystem& net);

/// Stacked coupling inputs of all nodes, accumulated edge by edge.
StackedState coupling_inputs(const StackedState& x, const NetworkSystem& net);

/// Right-hand side of the closed loop: f_i(x_i; t) + u_i for every node.
StackedState network_derivative(const NetworkSystem& net, const StackedState& x, double t);

// =============================================================================
// Integration
// =============================================================================

enum class Method { euler, rk4 };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct IntegrationOptions {
    Method method = Method::euler;
    double dt = 1e-4;
    double t_end = 10.0;
    std::size_t record_stride = 1;  // keep every k-th step in a Trajectory
};

/// Samples of one run. times[k] = k * stride * dt; the final step is always kept.
struct Trajectory {
    std::vector<double> times;
    std::vector<StackedState> states;
    double dt = 0.0;
    std::size_t stride = 1;
    Method method = Method::euler;
    std::size_t node_count = 0;
    std::size_t dimension = 0;

    std::size_t size() const noexcept { return times.size(); }
    std::vector<double> total_errors() const;
};

/// Called at t = 0 and after every step with the current state.
using StepObserver = std::function<void(std::size_t step, double t, const StackedState& x)>;

/// Fixed-step integration. Throws NumericalError at the first non-finite state.
void integrate_observed(const NetworkSystem& net, const StackedState& x0,
                        const IntegrationOptions& options, const StepObserver& observer);

Trajectory integrate(const NetworkSystem& net, const StackedState& x0,
                     const IntegrationOptions& options);

/// Number of steps for a run, round(t_end / dt).
std::size_t step_count(const IntegrationOptions& options);

// =============================================================================
// Synchronization checks
// =============================================================================

inline constexpr double kSyncThreshold = 0.05;
inline constexpr double kSyncTailFraction = 0.2;

struct SyncReport {
    double terminal = 0.0;   // e_tot at the last sample
    double tail_max = 0.0;   // over the trailing window
    double tail_min = 0.0;
    double threshold = kSyncThreshold;
    double tail_fraction = kSyncTailFraction;
    bool synchronized = false;  // tail_max < threshold
};

/// Evaluates e_tot over the trailing tail_fraction of the samples.
SyncReport assess_sync(const std::vector<double>& times, const std::vector<double>& e_tot,
                       double threshold = kSyncThreshold,
                       double tail_fraction = kSyncTailFraction);

struct AverageDynamicsReport {
    double max_deviation = 0.0;
    double threshold = 0.0;  // 10 * tol
    bool pass = false;
};

/**
 * Integrates s' = (1/N) sum_i f_i(s) from the state average at t_start with the
 * trajectory's own step and method, and compares it with the state average over
 * the rest of the run. Throws ValidationError if e_tot(t_start) >= tol.
 */
AverageDynamicsReport verify_average_dynamics(const Trajectory& traj,
                                              const std::vector<NodeModel>& models,
                                              double t_start, double tol);

// =============================================================================
// Ultimate bound
// =============================================================================

struct BoundEstimate {
    double radius = 0.0;
    double tail_fraction = 0.0;
    double tail_window = 0.0;  // seconds
    std::size_t ic_batch = 0;
    std::vector<double> sups;  // per initial condition
};

/**
 * r = max over the batch of sup ||x(t)|| over the trailing tail_fraction of each
 * run. Runs are independent and split across up to `workers` threads.
 */
BoundEstimate estimate_ultimate_bound(const NetworkSystem& net,
                                      const std::vector<StackedState>& batch,
                                      const IntegrationOptions& options, double tail_fraction,
                                      unsigned workers = 1);

/// Seeded initial conditions, `per_radius` on each stacked sphere of the given radii.
std::vector<StackedState> sphere_batch(std::size_t state_size, const std::vector<double>& radii,
                                       std::size_t per_radius, std::uint64_t seed);

/// Radii {1, 2, 4, 8}, two draws each.
std::vector<StackedState> default_bound_batch(std::size_t state_size, std::uint64_t seed);

inline constexpr double kDefaultBoundTailFraction = 0.5;

}  // namespace hetsync
