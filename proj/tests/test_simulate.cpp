#include <catch_amalgamated.hpp>

#include "hetsync/simulate.hpp"
#include "support.hpp"

#include <cmath>

using namespace hetsync;
using Catch::Approx;

namespace {

NodeModel zero_model(std::size_t n) { return make_linear(n, 0.0); }

NetworkSystem pair_network(double c, double c_d) {
    return NetworkSystem::with_identity_matrices({zero_model(1), zero_model(1)}, path_graph(2),
                                                 path_graph(2), {c, c_d});
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    std::copy(v.begin(), v.end(), out.data());
    return out;
}

// Gamma_d with mu_inf_minus >= 0: diagonal at least the off-diagonal row sum.
Matrix dominant_matrix(std::mt19937_64& rng, Eigen::Index n) {
    Matrix g = testing::random_matrix(rng, n, 1.0);
    std::uniform_real_distribution<double> slack(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i, i) = 0.0;
        g(i, i) = g.row(i).cwiseAbs().sum() + slack(rng);
    }
    return g;
}

}  // namespace

TEST_CASE("network validation", "[simulate]") {
    CHECK_THROWS_AS(NetworkSystem::with_identity_matrices({}, complete_graph(1), complete_graph(1), {}),
                    ValidationError);
    CHECK_THROWS_AS(NetworkSystem::with_identity_matrices({zero_model(1), zero_model(2)}, path_graph(2),
                                                          path_graph(2), {}),
                    ValidationError);
    CHECK_THROWS_AS(NetworkSystem::with_identity_matrices({zero_model(1), zero_model(1)}, complete_graph(3),
                                                          path_graph(2), {}),
                    ValidationError);
    CHECK_THROWS_AS(pair_network(-1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(NetworkSystem({zero_model(2), zero_model(2)}, path_graph(2), path_graph(2), {},
                                  Matrix::Identity(3, 3), Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
                    ValidationError);

    const auto net = pair_network(1.0, 2.0).with_gains({3.0, 4.0});
    CHECK(net.gains().c == 3.0);
    CHECK(net.gains().c_d == 4.0);
    CHECK(net.state_size() == 2);
}

TEST_CASE("sign", "[simulate]") {
    CHECK(sign(vec({-2.0, 0.0, 3.0, -0.0})) == vec({-1.0, 0.0, 1.0, 0.0}));
}

TEST_CASE("coupling examples", "[simulate]") {
    const auto single = NetworkSystem::with_identity_matrices({zero_model(2)}, build_graph(1, {}),
                                                              build_graph(1, {}), {5.0, 5.0});
    CHECK(coupling_inputs(vec({1.0, 2.0}), single) == Vector::Zero(2));

    const auto net = pair_network(2.0, 3.0);
    CHECK(coupling_inputs(vec({0.7, 0.7}), net) == Vector::Zero(2));
    // u_1 = c (x_2 - x_1) + c_d sign(x_2 - x_1)
    CHECK(coupling_inputs(vec({0.0, 1.0}), net) == vec({5.0, -5.0}));
    CHECK(coupling_input(0, vec({0.0, 1.0}), net) == vec({5.0}));
    CHECK(coupling_input(1, vec({0.0, 1.0}), net) == vec({-5.0}));
    CHECK_THROWS_AS(coupling_input(2, vec({0.0, 1.0}), net), ValidationError);
}

TEST_CASE("edge-wise coupling matches the Laplacian double sum", "[simulate][property]") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> nodes(2, 7);
    std::uniform_int_distribution<Eigen::Index> dim(1, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t count = nodes(rng);
        const Eigen::Index n = dim(rng);
        std::vector<NodeModel> models(count, zero_model(static_cast<std::size_t>(n)));
        const NetworkSystem net(models, testing::random_graph(rng, count, 0.5),
                                testing::random_graph(rng, count, 0.5), {1.3, 0.7},
                                testing::random_matrix(rng, n), testing::random_matrix(rng, n),
                                Matrix::Identity(n, n));
        const StackedState x = testing::random_vector(rng, static_cast<Eigen::Index>(count) * n, 3.0);
        const StackedState u = coupling_inputs(x, net);
        for (std::size_t i = 0; i < count; ++i) {
            CHECK((node_block(u, i, static_cast<std::size_t>(n)) - coupling_input(i, x, net)).norm() < 1e-12);
        }
    }
}

TEST_CASE("coupling is zero-sum and dissipative", "[simulate][property]") {
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<std::size_t> nodes(2, 8);
    std::uniform_int_distribution<Eigen::Index> dim(1, 4);
    std::uniform_real_distribution<double> gain(0.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t count = nodes(rng);
        const Eigen::Index n = dim(rng);
        const Matrix a = testing::random_matrix(rng, n);
        std::vector<NodeModel> models(count, zero_model(static_cast<std::size_t>(n)));
        const NetworkSystem net(models, testing::random_graph(rng, count, 0.6),
                                testing::random_graph(rng, count, 0.6), {gain(rng), gain(rng)},
                                a * a.transpose(), dominant_matrix(rng, n), Matrix::Identity(n, n));
        const StackedState x = testing::random_vector(rng, static_cast<Eigen::Index>(count) * n, 5.0);
        const StackedState u = coupling_inputs(x, net);

        Vector sum = Vector::Zero(n);
        for (std::size_t i = 0; i < count; ++i) sum += node_block(u, i, static_cast<std::size_t>(n));
        CHECK(sum.cwiseAbs().maxCoeff() < 1e-9);
        CHECK(x.dot(u) <= 1e-9);
    }
}

TEST_CASE("integration options", "[simulate]") {
    CHECK(parse_method("euler") == Method::euler);
    CHECK(parse_method("rk4") == Method::rk4);
    CHECK(to_string(Method::rk4) == "rk4");
    CHECK_THROWS_AS(parse_method("midpoint"), ValidationError);

    IntegrationOptions opts;
    opts.dt = 1e-4;
    opts.t_end = 10.0;
    CHECK(step_count(opts) == 100000);
    opts.dt = 0.0;
    CHECK_THROWS_AS(step_count(opts), ValidationError);
}

TEST_CASE("trajectory recording", "[simulate]") {
    const auto net = pair_network(1.0, 0.0);
    IntegrationOptions opts;
    opts.dt = 0.01;
    opts.t_end = 1.0;
    opts.record_stride = 30;
    const Trajectory traj = integrate(net, vec({0.0, 1.0}), opts);
    // steps 0, 30, 60, 90 and the final step 100
    REQUIRE(traj.size() == 5);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times[1] == Approx(0.3));
    CHECK(traj.times.back() == Approx(1.0));
    CHECK(traj.total_errors().front() == 0.5);
    // Euler on the difference: d_{k+1} = (1 - 2 c dt) d_k
    CHECK(traj.states.back()(1) - traj.states.back()(0) == Approx(std::pow(0.98, 100)).epsilon(1e-12));

    CHECK_THROWS_AS(integrate(net, vec({0.0}), opts), ValidationError);
    CHECK_THROWS_AS(integrate(net, vec({0.0, std::nan("")}), opts), ValidationError);
}

TEST_CASE("observer sees every step", "[simulate]") {
    const auto net = pair_network(1.0, 1.0);
    IntegrationOptions opts;
    opts.dt = 0.1;
    opts.t_end = 1.0;
    std::vector<double> seen;
    integrate_observed(net, vec({0.0, 1.0}), opts,
                       [&](std::size_t step, double t, const StackedState&) {
                           CHECK(t == Approx(static_cast<double>(step) * 0.1));
                           seen.push_back(t);
                       });
    CHECK(seen.size() == 11);
}

TEST_CASE("synchronization manifold is invariant for identical nodes", "[simulate][property]") {
    std::mt19937_64 rng(303);
    const auto vdp = make_vdp(2.0, 0.01, 0.001);
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = NetworkSystem::with_identity_matrices({vdp, vdp, vdp, vdp}, complete_graph(4),
                                                               path_graph(4), {3.0, 5.0});
        const Vector s = testing::random_vector(rng, 2, 3.0);
        StackedState x0(8);
        x0 << s, s, s, s;
        IntegrationOptions opts;
        opts.dt = 1e-3;
        opts.t_end = 2.0;
        opts.method = trial % 2 == 0 ? Method::euler : Method::rk4;
        integrate_observed(net, x0, opts, [](std::size_t, double, const StackedState& x) {
            REQUIRE(total_error(x, 4, 2) == 0.0);
        });
    }
}

TEST_CASE("zero field without coupling stays put", "[simulate]") {
    const auto net = NetworkSystem::with_identity_matrices({zero_model(3), zero_model(3)}, path_graph(2),
                                                           path_graph(2), {0.0, 0.0});
    const StackedState x0 = vec({1, 2, 3, 4, 5, 6});
    IntegrationOptions opts;
    opts.dt = 0.01;
    opts.t_end = 1.0;
    for (const auto method : {Method::euler, Method::rk4}) {
        opts.method = method;
        CHECK(integrate(net, x0, opts).states.back() == x0);
    }
}

TEST_CASE("blow-up is reported with its time", "[simulate]") {
    const auto fast = make_linear(1, 1000.0);
    const auto net = NetworkSystem::with_identity_matrices({fast, fast}, path_graph(2), path_graph(2), {});
    IntegrationOptions opts;
    opts.dt = 0.01;
    opts.t_end = 10.0;
    try {
        integrate(net, vec({1.0, 2.0}), opts);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 10.0);
        CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("non-finite state at t ="));
    }
}

TEST_CASE("Euler chattering is of order c_d dt", "[simulate]") {
    // two identical integrators joined only by the sign layer
    for (const double c_d : {0.5, 2.0, 10.0}) {
        for (const double dt : {1e-3, 1e-4}) {
            const auto net = pair_network(0.0, c_d);
            IntegrationOptions opts;
            opts.dt = dt;
            opts.t_end = 1.0;
            const auto traj = integrate(net, vec({0.0, 0.5}), opts);
            const auto sync = assess_sync(traj.times, traj.total_errors());
            CHECK(sync.tail_max <= c_d * dt + 1e-15);
        }
    }

    // heterogeneous oscillators: a node with degree N - 1 moves at most 2 (N - 1) c_d dt per step
    const double c_d = 120.0;
    const double dt = 1e-4;
    IntegrationOptions opts;
    opts.dt = dt;
    opts.t_end = 10.0;
    opts.record_stride = 10;
    const auto traj = integrate(testing::vdp_trio_network(4.0, c_d), testing::staggered_state(), opts);
    const auto sync = assess_sync(traj.times, traj.total_errors());
    CHECK(sync.tail_max <= 2.0 * 2.0 * c_d * dt);
}

TEST_CASE("Euler and RK4 agree to first order", "[simulate]") {
    const auto net = testing::vdp_trio_network(4.0, 0.0);
    auto gap = [&](double dt) {
        IntegrationOptions opts;
        opts.dt = dt;
        opts.t_end = 1.0;
        opts.record_stride = 1000000;
        const StackedState e = integrate(net, testing::staggered_state(), opts).states.back();
        opts.method = Method::rk4;
        const StackedState r = integrate(net, testing::staggered_state(), opts).states.back();
        return (e - r).norm();
    };
    const double coarse = gap(1e-3);
    const double fine = gap(5e-4);
    CHECK(coarse < 1e-1);
    CHECK(coarse / fine == Approx(2.0).epsilon(0.2));
}

TEST_CASE("sign coupling synchronizes the heterogeneous oscillators", "[simulate]") {
    IntegrationOptions opts;
    opts.t_end = 10.0;
    opts.record_stride = 10;
    const auto with = integrate(testing::vdp_trio_network(4.0, 120.0), testing::staggered_state(), opts);
    const auto without = integrate(testing::vdp_trio_network(4.0, 0.0), testing::staggered_state(), opts);
    const auto sync_with = assess_sync(with.times, with.total_errors());
    const auto sync_without = assess_sync(without.times, without.total_errors());
    CHECK(sync_with.synchronized);
    CHECK(sync_with.terminal < sync_without.terminal);
    CHECK(with.total_errors().front() == Approx(0.2357).margin(1e-4));
}

TEST_CASE("assess_sync windows", "[simulate]") {
    std::vector<double> t, e;
    for (int k = 0; k <= 10; ++k) {
        t.push_back(k);
        e.push_back(1.0 / (1.0 + k));
    }
    const auto r = assess_sync(t, e, 0.1, 0.2);
    // tail covers t in [8, 10]
    CHECK(r.tail_max == Approx(1.0 / 9.0));
    CHECK(r.tail_min == Approx(1.0 / 11.0));
    CHECK(r.terminal == Approx(1.0 / 11.0));
    CHECK_FALSE(r.synchronized);
    CHECK(assess_sync(t, e, 0.2, 0.2).synchronized);
    CHECK(assess_sync(t, e, 0.05, 1.0).tail_max == 1.0);

    CHECK_THROWS_AS(assess_sync({}, {}), ValidationError);
    CHECK_THROWS_AS(assess_sync(t, e, 0.05, 0.0), ValidationError);
    CHECK_THROWS_AS(assess_sync({0.0, 1.0}, {0.0}), ValidationError);
}

TEST_CASE("average dynamics check", "[simulate]") {
    const auto m = make_linear(2, -1.0);
    const auto net = NetworkSystem::with_identity_matrices({m, m}, path_graph(2), path_graph(2), {1.0, 0.0});
    IntegrationOptions opts;
    opts.dt = 1e-3;
    opts.t_end = 2.0;
    opts.record_stride = 10;

    const auto synced = integrate(net, vec({1.0, 1.0, 1.0, 1.0}), opts);
    const auto ok = verify_average_dynamics(synced, net.models(), 0.5, 0.01);
    CHECK(ok.pass);
    CHECK(ok.max_deviation < 1e-12);
    CHECK(ok.threshold == Approx(0.1));

    const auto apart = integrate(net, vec({0.0, 0.0, 3.0, 3.0}), opts);
    CHECK_THROWS_WITH(verify_average_dynamics(apart, net.models(), 0.0, 0.01),
                      Catch::Matchers::ContainsSubstring("not synchronized"));
    CHECK_THROWS_AS(verify_average_dynamics(apart, net.models(), 5.0, 0.01), ValidationError);
    CHECK_THROWS_AS(verify_average_dynamics(apart, {m}, 1.0, 0.01), ValidationError);
}

TEST_CASE("ultimate bound", "[simulate]") {
    IntegrationOptions opts;
    opts.dt = 1e-3;
    opts.t_end = 10.0;
    const auto batch = sphere_batch(4, {3.0}, 3, 7);
    for (const auto& x : batch) CHECK(x.norm() == Approx(3.0));

    const auto still = NetworkSystem::with_identity_matrices({zero_model(2), zero_model(2)}, path_graph(2),
                                                             path_graph(2), {0.0, 0.0});
    const auto r0 = estimate_ultimate_bound(still, batch, opts, 0.5, 2);
    CHECK(r0.radius == Approx(3.0).epsilon(1e-12));
    CHECK(r0.ic_batch == 3);
    CHECK(r0.tail_window == Approx(5.0));

    const auto decay = make_linear(2, -1.0);
    const auto damped = NetworkSystem::with_identity_matrices({decay, decay}, path_graph(2), path_graph(2),
                                                              {1.0, 1.0});
    const auto r1 = estimate_ultimate_bound(damped, batch, opts, 0.5, 2);
    // sup over the tail is at its start, t = 5
    CHECK(r1.radius <= 3.0 * std::exp(-5.0) * 1.01);

    CHECK_THROWS_AS(estimate_ultimate_bound(damped, {}, opts, 0.5), ValidationError);
    CHECK_THROWS_AS(estimate_ultimate_bound(damped, batch, opts, 1.5), ValidationError);

    const auto fast = make_linear(2, 1000.0);
    const auto blow = NetworkSystem::with_identity_matrices({fast, fast}, path_graph(2), path_graph(2), {});
    opts.dt = 0.01;
    CHECK_THROWS_WITH(estimate_ultimate_bound(blow, batch, opts, 0.5, 3),
                      Catch::Matchers::ContainsSubstring("initial condition #0"));

    CHECK(default_bound_batch(6, 1).size() == 8);
    CHECK(sphere_batch(6, {1.0}, 4, 11) == sphere_batch(6, {1.0}, 4, 11));
}
