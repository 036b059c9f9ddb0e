#include "hetsync/simulate.hpp"

#include "hetsync/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hetsync {

// =============================================================================
// NetworkSystem
// =============================================================================

NetworkSystem::NetworkSystem(std::vector<NodeModel> models, Graph graph, Graph graph_d,
                             CouplingGains gains, Matrix gamma, Matrix gamma_d, Matrix p)
    : models_(std::move(models)),
      graph_(std::move(graph)),
      graph_d_(std::move(graph_d)),
      gains_(gains),
      gamma_(std::move(gamma)),
      gamma_d_(std::move(gamma_d)),
      p_(std::move(p)) {
    if (models_.empty()) {
        throw ValidationError("network: at least one node model required");
    }
    dimension_ = models_.front().dimension;
    for (std::size_t i = 0; i < models_.size(); ++i) {
        if (models_[i].dimension != dimension_ || dimension_ == 0) {
            throw ValidationError("network: node " + std::to_string(i) + " has dimension " +
                                  std::to_string(models_[i].dimension) + ", expected " +
                                  std::to_string(dimension_));
        }
        if (!models_[i].field) {
            throw ValidationError("network: node " + std::to_string(i) + " has no vector field");
        }
    }
    if (graph_.node_count() != models_.size() || graph_d_.node_count() != models_.size()) {
        throw ValidationError("network: graphs must have one vertex per node model");
    }
    if (!(gains_.c >= 0.0) || !(gains_.c_d >= 0.0) || !std::isfinite(gains_.c) ||
        !std::isfinite(gains_.c_d)) {
        throw ValidationError("network: gains c and c_d must be finite and nonnegative");
    }
    const auto n = static_cast<Eigen::Index>(dimension_);
    auto check = [n](const Matrix& m, const char* what) {
        if (m.rows() != n || m.cols() != n || !m.allFinite()) {
            throw ValidationError(std::string("network: ") + what + " must be a finite " +
                                  std::to_string(n) + "x" + std::to_string(n) + " matrix");
        }
    };
    check(gamma_, "gamma");
    check(gamma_d_, "gamma_d");
    check(p_, "p");
}

NetworkSystem NetworkSystem::with_identity_matrices(std::vector<NodeModel> models, Graph graph,
                                                    Graph graph_d, CouplingGains gains) {
    const auto n = static_cast<Eigen::Index>(models.empty() ? 0 : models.front().dimension);
    const Matrix eye = Matrix::Identity(n, n);
    return NetworkSystem(std::move(models), std::move(graph), std::move(graph_d), gains, eye, eye,
                         eye);
}

NetworkSystem NetworkSystem::with_gains(CouplingGains gains) const {
    return NetworkSystem(models_, graph_, graph_d_, gains, gamma_, gamma_d_, p_);
}

// =============================================================================
// Coupling
// =============================================================================

Vector sign(const Vector& v) {
    return v.unaryExpr([](double a) { return static_cast<double>((a > 0.0) - (a < 0.0)); });
}

Vector coupling_input(std::size_t i, const StackedState& x, const NetworkSystem& net) {
    const std::size_t n = net.dimension();
    const std::size_t nodes = net.node_count();
    if (i >= nodes || static_cast<std::size_t>(x.size()) != net.state_size()) {
        throw ValidationError("coupling_input: node index or state size out of range");
    }
    const Matrix l = laplacian(net.graph());
    const Matrix ld = laplacian(net.graph_d());
    const auto ii = static_cast<Eigen::Index>(i);
    Vector u = Vector::Zero(static_cast<Eigen::Index>(n));
    const Vector xi = node_block(x, i, n);
    for (std::size_t j = 0; j < nodes; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const Vector diff = node_block(x, j, n) - xi;
        u -= net.gains().c * l(ii, jj) * (net.gamma() * diff);
        u -= net.gains().c_d * ld(ii, jj) * (net.gamma_d() * sign(diff));
    }
    return u;
}

StackedState coupling_inputs(const StackedState& x, const NetworkSystem& net) {
    const std::size_t n = net.dimension();
    StackedState u = StackedState::Zero(x.size());
    const double c = net.gains().c;
    const double cd = net.gains().c_d;
    // -L_ab = 1 on every edge; the two endpoints receive opposite contributions.
    if (c != 0.0) {
        for (const auto& e : net.graph().edges()) {
            const Vector push = c * (net.gamma() * (node_block(x, e.b, n) - node_block(x, e.a, n)));
            node_block(u, e.a, n) += push;
            node_block(u, e.b, n) -= push;
        }
    }
    if (cd != 0.0) {
        for (const auto& e : net.graph_d().edges()) {
            const Vector push =
                cd * (net.gamma_d() * sign(node_block(x, e.b, n) - node_block(x, e.a, n)));
            node_block(u, e.a, n) += push;
            node_block(u, e.b, n) -= push;
        }
    }
    return u;
}

StackedState network_derivative(const NetworkSystem& net, const StackedState& x, double t) {
    const std::size_t n = net.dimension();
    StackedState dx = coupling_inputs(x, net);
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        node_block(dx, i, n) += net.models()[i](Vector(node_block(x, i, n)), t);
    }
    return dx;
}

// =============================================================================
// Integration
// =============================================================================

std::string to_string(Method m) { return m == Method::euler ? "euler" : "rk4"; }

Method parse_method(const std::string& s) {
    if (s == "euler") return Method::euler;
    if (s == "rk4") return Method::rk4;
    throw ValidationError("unknown integration method '" + s + "' (expected euler or rk4)");
}

namespace {

template <class Rhs>
Vector advance(const Rhs& rhs, const Vector& x, double t, double dt, Method method) {
    if (method == Method::euler) {
        return x + dt * rhs(x, t);
    }
    const Vector k1 = rhs(x, t);
    const Vector k2 = rhs(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector k3 = rhs(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector k4 = rhs(x + dt * k3, t + dt);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_options(const IntegrationOptions& options) {
    if (!(options.dt > 0.0) || !std::isfinite(options.dt)) {
        throw ValidationError("integrate: dt must be positive");
    }
    if (!(options.t_end >= options.dt) || !std::isfinite(options.t_end)) {
        throw ValidationError("integrate: t_end must be at least dt");
    }
    if (options.record_stride == 0) {
        throw ValidationError("integrate: record stride must be at least 1");
    }
}

// Sample indices whose time lies in the trailing fraction of [t_first, t_last].
std::size_t tail_begin(const std::vector<double>& times, double tail_fraction) {
    const double t0 = times.front();
    const double t1 = times.back();
    const double start = t1 - tail_fraction * (t1 - t0);
    auto it = std::lower_bound(times.begin(), times.end(), start - 1e-12 * std::max(1.0, std::abs(t1)));
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - times.begin(),
                                                             static_cast<std::ptrdiff_t>(times.size()) - 1));
}

}  // namespace

std::size_t step_count(const IntegrationOptions& options) {
    check_options(options);
    return static_cast<std::size_t>(std::llround(options.t_end / options.dt));
}

void integrate_observed(const NetworkSystem& net, const StackedState& x0,
                        const IntegrationOptions& options, const StepObserver& observer) {
    const std::size_t steps = step_count(options);
    if (static_cast<std::size_t>(x0.size()) != net.state_size()) {
        throw ValidationError("integrate: initial state has length " + std::to_string(x0.size()) +
                              ", expected " + std::to_string(net.state_size()));
    }
    if (!x0.allFinite()) {
        throw ValidationError("integrate: initial state must be finite");
    }
    auto rhs = [&net](const Vector& x, double t) { return network_derivative(net, x, t); };

    StackedState x = x0;
    if (observer) observer(0, 0.0, x);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_prev = static_cast<double>(k - 1) * options.dt;
        x = advance(rhs, x, t_prev, options.dt, options.method);
        const double t = static_cast<double>(k) * options.dt;
        if (!x.allFinite()) {
            throw NumericalError("integrate: non-finite state at t = " + std::to_string(t), t);
        }
        if (observer) observer(k, t, x);
    }
}

Trajectory integrate(const NetworkSystem& net, const StackedState& x0,
                     const IntegrationOptions& options) {
    const std::size_t steps = step_count(options);
    Trajectory traj;
    traj.dt = options.dt;
    traj.stride = options.record_stride;
    traj.method = options.method;
    traj.node_count = net.node_count();
    traj.dimension = net.dimension();
    const std::size_t expected = steps / options.record_stride + 2;
    traj.times.reserve(expected);
    traj.states.reserve(expected);
    integrate_observed(net, x0, options, [&](std::size_t k, double t, const StackedState& x) {
        if (k % options.record_stride == 0 || k == steps) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
    });
    return traj;
}

std::vector<double> Trajectory::total_errors() const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& x : states) out.push_back(total_error(x, node_count, dimension));
    return out;
}

// =============================================================================
// Synchronization checks
// =============================================================================

SyncReport assess_sync(const std::vector<double>& times, const std::vector<double>& e_tot,
                       double threshold, double tail_fraction) {
    if (times.empty() || times.size() != e_tot.size()) {
        throw ValidationError("assess_sync: need matching, nonempty time and error series");
    }
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ValidationError("assess_sync: tail fraction must lie in (0, 1]");
    }
    SyncReport report;
    report.threshold = threshold;
    report.tail_fraction = tail_fraction;
    report.terminal = e_tot.back();
    const std::size_t begin = tail_begin(times, tail_fraction);
    const auto [lo, hi] = std::minmax_element(e_tot.begin() + static_cast<std::ptrdiff_t>(begin), e_tot.end());
    report.tail_min = *lo;
    report.tail_max = *hi;
    report.synchronized = report.tail_max < threshold;
    return report;
}

AverageDynamicsReport verify_average_dynamics(const Trajectory& traj,
                                              const std::vector<NodeModel>& models,
                                              double t_start, double tol) {
    if (traj.times.empty()) {
        throw ValidationError("verify_average_dynamics: empty trajectory");
    }
    if (models.size() != traj.node_count) {
        throw ValidationError("verify_average_dynamics: model count does not match trajectory");
    }
    if (!(t_start >= traj.times.front()) || t_start > traj.times.back()) {
        throw ValidationError("verify_average_dynamics: t_start outside trajectory");
    }
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t_start - 1e-12);
    const auto k0 = static_cast<std::size_t>(it - traj.times.begin());

    const std::size_t nodes = traj.node_count;
    const std::size_t n = traj.dimension;
    const double e0 = total_error(traj.states[k0], nodes, n);
    if (!(e0 < tol)) {
        throw ValidationError("verify_average_dynamics: not synchronized at t_start (e_tot = " +
                              std::to_string(e0) + ", tol = " + std::to_string(tol) + ")");
    }

    auto rhs = [&models, nodes](const Vector& s, double t) {
        Vector sum = Vector::Zero(s.size());
        for (std::size_t i = 0; i < nodes; ++i) sum += models[i](s, t);
        return Vector(sum / static_cast<double>(nodes));
    };

    AverageDynamicsReport report;
    report.threshold = 10.0 * tol;
    Vector s = state_average(traj.states[k0], nodes, n);
    double t = traj.times[k0];
    for (std::size_t k = k0 + 1; k < traj.times.size(); ++k) {
        const auto steps = static_cast<std::size_t>(std::llround((traj.times[k] - t) / traj.dt));
        for (std::size_t j = 0; j < steps; ++j) {
            s = advance(rhs, s, t, traj.dt, traj.method);
            t += traj.dt;
        }
        t = traj.times[k];
        if (!s.allFinite()) {
            throw NumericalError("verify_average_dynamics: non-finite reference state", t);
        }
        const double dev = (state_average(traj.states[k], nodes, n) - s).norm();
        report.max_deviation = std::max(report.max_deviation, dev);
    }
    report.pass = report.max_deviation <= report.threshold;
    return report;
}

// =============================================================================
// Ultimate bound
// =============================================================================

BoundEstimate estimate_ultimate_bound(const NetworkSystem& net,
                                      const std::vector<StackedState>& batch,
                                      const IntegrationOptions& options, double tail_fraction,
                                      unsigned workers) {
    if (batch.empty()) {
        throw ValidationError("estimate_ultimate_bound: empty initial-condition batch");
    }
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ValidationError("estimate_ultimate_bound: tail fraction must lie in (0, 1]");
    }
    const std::size_t steps = step_count(options);
    const auto tail_steps = static_cast<std::size_t>(std::llround(tail_fraction * static_cast<double>(steps)));
    const std::size_t first_tail = steps - std::min(steps, tail_steps);

    BoundEstimate out;
    out.tail_fraction = tail_fraction;
    out.tail_window = static_cast<double>(steps - first_tail) * options.dt;
    out.ic_batch = batch.size();
    out.sups.assign(batch.size(), 0.0);

    parallel_for(batch.size(), workers, [&](std::size_t k) {
        double sup = 0.0;
        try {
            integrate_observed(net, batch[k], options,
                               [&](std::size_t step, double, const StackedState& x) {
                                   if (step >= first_tail) sup = std::max(sup, x.norm());
                               });
        } catch (const NumericalError& e) {
            throw NumericalError("initial condition #" + std::to_string(k) + ": " + e.what(),
                                 e.time());
        }
        out.sups[k] = sup;
    });
    out.radius = *std::max_element(out.sups.begin(), out.sups.end());
    return out;
}

std::vector<StackedState> sphere_batch(std::size_t state_size, const std::vector<double>& radii,
                                       std::size_t per_radius, std::uint64_t seed) {
    if (state_size == 0) {
        throw ValidationError("sphere_batch: state size must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<StackedState> out;
    for (const double r : radii) {
        if (!(r >= 0.0)) throw ValidationError("sphere_batch: radii must be nonnegative");
        for (std::size_t k = 0; k < per_radius; ++k) {
            StackedState x(static_cast<Eigen::Index>(state_size));
            double norm = 0.0;
            do {
                for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = normal(rng);
                norm = x.norm();
            } while (norm == 0.0);
            out.push_back(x * (r / norm));
        }
    }
    return out;
}

std::vector<StackedState> default_bound_batch(std::size_t state_size, std::uint64_t seed) {
    return sphere_batch(state_size, {1.0, 2.0, 4.0, 8.0}, 2, seed);
}

}  // namespace hetsync
