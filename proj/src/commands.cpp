#include "hetsync/commands.hpp"

#include "hetsync/certify.hpp"
#include "hetsync/parallel.hpp"
#include "hetsync/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ostream>

namespace hetsync {

SimulationRun run_simulation(const NetworkSystem& net, const StackedState& x0,
                             const IntegrationOptions& options, std::size_t stride) {
    IntegrationOptions opts = options;
    opts.record_stride = std::max<std::size_t>(stride, 1);
    const std::size_t steps = step_count(opts);

    SimulationRun run;
    Trajectory& traj = run.trajectory;
    traj.dt = opts.dt;
    traj.stride = opts.record_stride;
    traj.method = opts.method;
    traj.node_count = net.node_count();
    traj.dimension = net.dimension();
    run.times.reserve(steps + 1);
    run.e_tot.reserve(steps + 1);
    std::vector<double> norms;
    norms.reserve(steps + 1);

    integrate_observed(net, x0, opts, [&](std::size_t k, double t, const StackedState& x) {
        run.times.push_back(t);
        run.e_tot.push_back(total_error(x, net.node_count(), net.dimension()));
        norms.push_back(x.norm());
        if (!std::isfinite(run.e_tot.back()) || !std::isfinite(norms.back())) {
            throw NumericalError("simulate: state norm overflows at t = " + std::to_string(t), t);
        }
        if (k % opts.record_stride == 0 || k == steps) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
    });
    run.sync = assess_sync(run.times, run.e_tot);
    const double t_last = run.times.back();
    const double start = t_last - run.sync.tail_fraction * t_last;
    for (std::size_t k = 0; k < norms.size(); ++k) {
        if (run.times[k] >= start - 1e-12) run.tail_sup_norm = std::max(run.tail_sup_norm, norms[k]);
    }
    return run;
}

nlohmann::json cmd_simulate(const ExperimentConfig& cfg, const CommandContext& ctx) {
    const auto started = std::chrono::steady_clock::now();
    const NetworkSystem net = build_network(cfg);
    const SimulationRun run = run_simulation(net, cfg.initial_state, cfg.integrator, cfg.outputs.stride);
    nlohmann::json summary = simulation_summary(net, cfg.integrator, run.sync, run.tail_sup_norm);
    if (ctx.timing) {
        summary["runtime_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }

    write_atomic(ctx.out_dir / cfg.outputs.csv, trajectory_csv(run.trajectory));
    write_atomic(ctx.out_dir / cfg.outputs.summary, summary.dump(2) + "\n");

    ChartOptions chart;
    chart.title = "Total synchronization error (c = " + format_number(cfg.gains.c) +
                  ", c_d = " + format_number(cfg.gains.c_d) + ")";
    chart.log_y = cfg.outputs.log_scale;
    write_atomic(ctx.out_dir / cfg.outputs.plot,
                 render_line_chart_svg(run.trajectory.times, run.trajectory.total_errors(), chart));
    return summary;
}

nlohmann::json cmd_certify(const ExperimentConfig& cfg, std::optional<double> radius,
                           const CommandContext& ctx) {
    const double r = radius ? *radius : cfg.certify.radius.value_or(0.0);
    if (!(r > 0.0)) {
        throw ValidationError("certify: a positive radius is required (--radius or /certify/radius)");
    }
    CertifyOptions options;
    options.quad_mode = cfg.certify.quad_mode;
    options.samples = cfg.certify.samples;
    options.seed = ctx.seed;
    options.q_norm_override = cfg.certify.max_q_norm;
    const GainCertificate cert = certify_network(build_network(cfg), r, options);
    nlohmann::json j = to_json(cert);
    write_atomic(ctx.out_dir / "certificate.json", j.dump(2) + "\n");
    return j;
}

std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, SweepParameter parameter,
                                const std::vector<double>& values, const CommandContext& ctx) {
    if (values.empty()) {
        throw ValidationError("sweep: at least one value required");
    }
    const NetworkSystem base = build_network(cfg);
    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), ctx.workers, [&](std::size_t k) {
        SweepRow& row = rows[k];
        row.value = values[k];
        try {
            CouplingGains gains = cfg.gains;
            (parameter == SweepParameter::c ? gains.c : gains.c_d) = values[k];
            const NetworkSystem net = base.with_gains(gains);
            const SimulationRun run =
                run_simulation(net, cfg.initial_state, cfg.integrator, cfg.outputs.stride);
            row.sync = run.sync;
            const auto summary = simulation_summary(net, cfg.integrator, run.sync, run.tail_sup_norm);
            write_atomic(ctx.out_dir / "sweep" / ("row_" + std::to_string(k) + ".json"),
                         summary.dump(2) + "\n");
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    std::string table = "value,terminal_e_tot,tail_max_e_tot,sync,error\n";
    for (const auto& row : rows) {
        table += format_number(row.value) + ",";
        if (row.sync) {
            table += format_number(row.sync->terminal) + "," + format_number(row.sync->tail_max) + "," +
                     (row.sync->synchronized ? "true" : "false") + ",";
        } else {
            std::string msg = row.error;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            table += ",,,\"" + msg + "\"";
        }
        table += "\n";
    }
    write_atomic(ctx.out_dir / "sweep.csv", table);
    return rows;
}

nlohmann::json cmd_bound(const ExperimentConfig& cfg, const CommandContext& ctx) {
    const NetworkSystem net = build_network(cfg);
    IntegrationOptions options = cfg.integrator;
    options.t_end = cfg.bound.t_end.value_or(cfg.integrator.t_end);
    const auto batch = sphere_batch(net.state_size(), cfg.bound.radii, cfg.bound.per_radius, ctx.seed);
    const BoundEstimate est =
        estimate_ultimate_bound(net, batch, options, cfg.bound.tail_fraction, ctx.workers);

    nlohmann::json j;
    j["r"] = est.radius;
    j["tail_fraction"] = est.tail_fraction;
    j["tail_window"] = est.tail_window;
    j["t_end"] = options.t_end;
    j["dt"] = options.dt;
    j["method"] = to_string(options.method);
    j["seed"] = ctx.seed;
    j["ic_batch"] = est.ic_batch;
    j["per_ic"] = nlohmann::json::array();
    for (std::size_t k = 0; k < batch.size(); ++k) {
        j["per_ic"].push_back({{"initial_norm", batch[k].norm()}, {"sup", est.sups[k]}});
    }
    write_atomic(ctx.out_dir / "bound.json", j.dump(2) + "\n");
    return j;
}

namespace {

nlohmann::json graph_info(const Graph& g) {
    nlohmann::json j;
    j["nodes"] = g.node_count();
    j["edges"] = g.edge_count();
    j["connected"] = is_connected(g);
    j["lambda2"] = algebraic_connectivity(g);
    if (g.node_count() >= 2 && g.node_count() <= kDensityEnumerationLimit && is_connected(g)) {
        j["min_density"] = minimum_density(g);
    } else {
        j["min_density"] = nullptr;
    }
    return j;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t next = std::min(csv.find(',', pos), csv.size());
        const std::string item = csv.substr(pos, next - pos);
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError("sweep: cannot parse value '" + item + "'");
        }
        pos = next + 1;
    }
    return out;
}

}  // namespace

nlohmann::json cmd_graph_info(const ExperimentConfig& cfg) {
    return {{"graph", graph_info(cfg.graph)}, {"graph_d", graph_info(cfg.graph_d)}};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and gain certification for heterogeneous networks with "
                 "diffusive and discontinuous coupling"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool timing = false;
    std::optional<double> radius;
    std::string param;
    std::string values;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Seed for sampling and initial-condition batches");
        sub->add_option("--workers", workers, "Worker threads for batches and sweeps")
            ->check(CLI::PositiveNumber);
    };
    auto* simulate = app.add_subcommand("simulate", "Integrate the coupled network");
    common(simulate);
    simulate->add_flag("--timing", timing, "Record runtime in the summary");
    auto* certify = app.add_subcommand("certify", "Compute the critical coupling gains");
    common(certify);
    certify->add_option("--radius", radius, "Ultimate-bound radius r");
    auto* sweep = app.add_subcommand("sweep", "Simulate over a list of gain values");
    common(sweep);
    sweep->add_option("--param", param, "Gain to sweep")->required()->check(CLI::IsMember({"c", "c_d"}));
    sweep->add_option("--values", values, "Comma-separated values")->required();
    auto* bound = app.add_subcommand("bound", "Estimate the ultimate bound radius");
    common(bound);
    auto* info = app.add_subcommand("graph-info", "Print lambda_2, minimum density, connectivity");
    common(info);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    CommandContext ctx;
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.workers = workers;
    ctx.timing = timing;

    try {
        const ExperimentConfig cfg = load_config(config_path);
        if (simulate->parsed()) {
            const auto summary = cmd_simulate(cfg, ctx);
            out << summary.dump(2) << "\n";
            return kExitOk;
        }
        if (certify->parsed()) {
            out << cmd_certify(cfg, radius, ctx).dump(2) << "\n";
            return kExitOk;
        }
        if (sweep->parsed()) {
            const auto rows = cmd_sweep(cfg, param == "c" ? SweepParameter::c : SweepParameter::c_d,
                                        parse_values(values), ctx);
            std::size_t failed = 0;
            for (const auto& row : rows) {
                out << param << " = " << format_number(row.value) << ": ";
                if (row.sync) {
                    out << "terminal e_tot " << format_number(row.sync->terminal) << ", sync "
                        << (row.sync->synchronized ? "true" : "false") << "\n";
                } else {
                    out << "error: " << row.error << "\n";
                    ++failed;
                }
            }
            return failed == rows.size() ? kExitNumerical : kExitOk;
        }
        if (bound->parsed()) {
            out << cmd_bound(cfg, ctx).dump(2) << "\n";
            return kExitOk;
        }
        if (info->parsed()) {
            out << cmd_graph_info(cfg).dump(2) << "\n";
            return kExitOk;
        }
    } catch (const HypothesisError& e) {
        err << "error: [" << e.hypothesis() << "] " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace hetsync
