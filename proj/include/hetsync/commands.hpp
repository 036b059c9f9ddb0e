#pragma once

#include "hetsync/config.hpp"
#include "hetsync/simulate.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hetsync {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitValidation = 2,
    kExitNumerical = 3,
};

struct CommandContext {
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool timing = false;  // add runtime_s to summaries (breaks byte-identical reruns)
};

/// One closed-loop run with e_tot tracked at every step.
struct SimulationRun {
    Trajectory trajectory;           // strided samples
    std::vector<double> times;       // every step
    std::vector<double> e_tot;       // every step
    SyncReport sync;
    double tail_sup_norm = 0.0;      // sup ||x|| over the sync tail window
};

SimulationRun run_simulation(const NetworkSystem& net, const StackedState& x0,
                             const IntegrationOptions& options, std::size_t stride);

/// Writes CSV, summary JSON and SVG under ctx.out_dir; returns the summary.
nlohmann::json cmd_simulate(const ExperimentConfig& cfg, const CommandContext& ctx);

/// Writes certificate.json; returns it.
nlohmann::json cmd_certify(const ExperimentConfig& cfg, std::optional<double> radius,
                           const CommandContext& ctx);

enum class SweepParameter { c, c_d };

struct SweepRow {
    double value = 0.0;
    std::optional<SyncReport> sync;
    std::string error;
};

/// Writes sweep.csv (value,terminal_e_tot,tail_max_e_tot,sync,error) and one summary per row.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, SweepParameter parameter,
                                const std::vector<double>& values, const CommandContext& ctx);

/// Writes bound.json; returns it.
nlohmann::json cmd_bound(const ExperimentConfig& cfg, const CommandContext& ctx);

/// lambda_2, minimum density and connectivity of both graphs.
nlohmann::json cmd_graph_info(const ExperimentConfig& cfg);

/// Full command-line front end. Maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetsync
