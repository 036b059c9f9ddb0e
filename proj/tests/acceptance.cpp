// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
//   hetsync_acceptance              run every criterion
//   hetsync_acceptance --only 2b    run one criterion

#include "hetsync/certify.hpp"
#include "hetsync/dynamics.hpp"
#include "hetsync/graph.hpp"
#include "hetsync/measures.hpp"
#include "hetsync/simulate.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hetsync;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<NodeModel> vdp_models() {
    return {make_vdp(1.0, 0.01, 0.001), make_vdp(2.0, 0.01, 0.001), make_vdp(3.0, 0.01, 0.001)};
}

NetworkSystem vdp_network(double c, double c_d) {
    return NetworkSystem::with_identity_matrices(vdp_models(), complete_graph(3), complete_graph(3), {c, c_d});
}

StackedState staggered_state() {
    StackedState x(6);
    x << 1.5, 1.5, 1.75, 1.75, 2.0, 2.0;
    return x;
}

IntegrationOptions reference_options() {
    IntegrationOptions opts;
    opts.method = Method::euler;
    opts.dt = 1e-4;
    opts.t_end = 10.0;
    opts.record_stride = 10;
    return opts;
}

SyncReport run_trio(double c_d, Trajectory* keep = nullptr) {
    std::vector<double> times, e_tot;
    const auto net = vdp_network(4.0, c_d);
    integrate_observed(net, staggered_state(), reference_options(), [&](std::size_t, double t, const StackedState& x) {
        times.push_back(t);
        e_tot.push_back(total_error(x, 3, 2));
    });
    if (keep) *keep = integrate(net, staggered_state(), reference_options());
    return assess_sync(times, e_tot, kSyncThreshold, kSyncTailFraction);
}

Outcome gains_regression() {
    const Matrix eye = Matrix::Identity(2, 2);
    Vector m(2);
    m << 0.0, 179.90;
    const auto g = critical_gains(11.58, 3.0, eye, eye, m, 1.5, eye);
    const bool ok = std::abs(g.c_star / 3.86 - 1.0) <= 0.005 && std::abs(g.c_d_star / 119.93 - 1.0) <= 0.005;
    return {ok, "c* = " + fmt(g.c_star) + " (3.86), c_d* = " + fmt(g.c_d_star) + " (119.93), tol 0.5%"};
}

Outcome diffusive_only() {
    const auto s = run_trio(0.0);
    return {s.tail_min > 0.05, "c_d = 0: tail e_tot in [" + fmt(s.tail_min) + ", " + fmt(s.tail_max) +
                                   "], required above 0.05 throughout"};
}

Outcome with_sign_layer() {
    const auto start = std::chrono::steady_clock::now();
    const auto a = run_trio(0.0);
    const auto b = run_trio(120.0);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    (void)a;
    return {b.tail_max < 0.05 && seconds < 30.0,
            "c_d = 120: tail max e_tot " + fmt(b.tail_max) + " < 0.05; both runs " + fmt(seconds) + " s < 30 s"};
}

Outcome average_dynamics() {
    Trajectory traj;
    run_trio(120.0, &traj);
    const auto r = verify_average_dynamics(traj, vdp_models(), 8.0, 0.05);
    return {r.pass && r.max_deviation <= 0.5,
            "max deviation " + fmt(r.max_deviation) + " <= " + fmt(r.threshold)};
}

Outcome mismatch_bound() {
    std::vector<VectorField> fields;
    for (const auto& m : vdp_models()) fields.push_back(m.field);
    const auto est = estimate_mismatch_bound(fields, 2, 7.72, kDefaultSampleCount, 0);
    const double norm = est.value.lpNorm<Eigen::Infinity>();
    return {est.samples >= 100000 && norm >= 160.0 && norm <= 200.0,
            "||m||_inf = " + fmt(norm) + " in [160, 200] from " + std::to_string(est.samples) + " samples"};
}

Outcome ultimate_bound() {
    IntegrationOptions opts = reference_options();
    opts.t_end = 20.0;
    const auto est = estimate_ultimate_bound(vdp_network(4.0, 120.0), default_bound_batch(6, 0), opts,
                                             kDefaultBoundTailFraction, 4);
    return {est.radius <= 9.0, "r = " + fmt(est.radius) + " <= 9 over " + std::to_string(est.ic_batch) +
                                   " initial conditions"};
}

Outcome property_suites() {
    const std::string cmd = std::string("\"") + HETSYNC_UNIT_TESTS +
                            "\" \"[property],algebraic connectivity against closed forms,minimum density\""
                            " --reporter compact > /dev/null";
    const int rc = std::system(cmd.c_str());
    return {rc == 0, "property and closed-form suites exit status " + std::to_string(rc)};
}

Outcome sufficiency() {
    CertifyOptions opts;
    opts.quad_mode = QuadMode::sampled;
    opts.samples = kDefaultSampleCount;
    opts.seed = 0;
    const auto cert = certify_network(vdp_network(0.0, 0.0), 7.72, opts);
    const CouplingGains gains{1.05 * cert.c_star, 1.05 * cert.c_d_star};
    const auto net = vdp_network(gains.c, gains.c_d);

    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        StackedState x0(6);
        for (Eigen::Index j = 0; j < 6; ++j) x0(j) = normal(rng);
        x0 *= 7.72 * std::pow(unit(rng), 1.0 / 6.0) / x0.norm();
        IntegrationOptions o = reference_options();
        o.record_stride = 1000000;
        const auto traj = integrate(net, x0, o);
        worst = std::max(worst, total_error(traj.states.back(), 3, 2));
    }
    return {worst < 0.05, "gains (" + fmt(gains.c) + ", " + fmt(gains.c_d) + "): worst terminal e_tot " +
                              fmt(worst) + " < 0.05 over 5 initial conditions"};
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::cerr << "usage: hetsync_acceptance [--only <id>]\n";
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {"1", "critical gain formula", gains_regression},
        {"2a", "diffusive coupling alone stays unsynchronized", diffusive_only},
        {"2b", "sign coupling synchronizes", with_sign_layer},
        {"3", "average dynamics after synchronization", average_dynamics},
        {"4", "mismatch bound", mismatch_bound},
        {"5", "ultimate bound", ultimate_bound},
        {"6", "property suites", property_suites},
        {"7", "sufficiency of certified gains", sufficiency},
    };

    int failures = 0;
    bool matched = false;
    for (const auto& c : criteria) {
        if (!only.empty() && c.id != only) continue;
        matched = true;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "AC" << c.id << " " << c.title << ": " << o.detail
                  << std::endl;
        failures += o.pass ? 0 : 1;
    }
    if (!matched) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
