#pragma once

#include "hetsync/simulate.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace hetsync {

/// Writes to `<path>.tmp` then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trippable decimal form.
std::string format_number(double v);

/// Header `t,x_1_1,...,x_N_n,e_tot`, one row per recorded sample.
std::string trajectory_csv(const Trajectory& traj);

struct ChartOptions {
    std::string title;
    std::string x_label = "t";
    std::string y_label = "e_tot";
    bool log_y = true;
};

/// Single polyline chart on a fixed 800x400 viewBox.
std::string render_line_chart_svg(const std::vector<double>& x, const std::vector<double>& y,
                                  const ChartOptions& options);

/**
 * Simulation summary schema:
 *
 *   command          "simulate"
 *   nodes, dimension integers
 *   gains            {c, c_d}
 *   integrator       {method, dt, t_end, steps}
 *   terminal_e_tot, tail_max_e_tot, tail_min_e_tot, tail_sup_norm   numbers
 *   sync             {threshold, tail_fraction, pass}
 *   runtime_s        number, optional
 */
nlohmann::json simulation_summary(const NetworkSystem& net, const IntegrationOptions& options,
                                  const SyncReport& sync, double tail_sup_norm);

/// Throws ValidationError naming the first field that breaks the summary schema.
void validate_summary(const nlohmann::json& summary);

}  // namespace hetsync
