#pragma once

#include "hetsync/certify.hpp"
#include "hetsync/dynamics.hpp"
#include "hetsync/graph.hpp"
#include "hetsync/simulate.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hetsync {

/// Config validation failure; `path()` is a JSON pointer to the offending field.
class ConfigError : public ValidationError {
public:
    ConfigError(std::string path, const std::string& message)
        : ValidationError("config " + (path.empty() ? std::string("/") : path) + ": " + message),
          path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct NodeSpec {
    std::string model;
    ModelParameters params;
};

struct OutputSpec {
    std::string csv = "trajectory.csv";
    std::string summary = "summary.json";
    std::string plot = "e_tot.svg";
    std::size_t stride = 100;
    bool log_scale = true;
};

struct CertifySpec {
    std::optional<double> radius;
    QuadMode quad_mode = QuadMode::prop2;
    std::size_t samples = kDefaultSampleCount;
    std::optional<double> max_q_norm;
};

struct BoundSpec {
    std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
    std::size_t per_radius = 2;
    double tail_fraction = kDefaultBoundTailFraction;
    std::optional<double> t_end;  // defaults to the integrator horizon
};

/**
 * Experiment description, one JSON document:
 *
 *   {
 *     "nodes":        [{"model": "vdp", "params": {"mu": 1, "epsilon": 0.01, "eta": 0.001}}, ...],
 *     "graph":        "complete" | [[i, j], ...],
 *     "graph_d":      "complete" | [[i, j], ...],
 *     "gains":        {"c": 4, "c_d": 120},
 *     "matrices":     {"gamma": [[..]], "gamma_d": [[..]], "p": [[..]]},   (optional, identity)
 *     "integrator":   {"method": "euler" | "rk4", "dt": 1e-4, "t_end": 10},
 *     "initial_state": [x_1_1, ..., x_N_n],
 *     "outputs":      {"csv", "summary", "plot", "stride", "log_scale"},    (optional)
 *     "certify":      {"radius", "quad_mode", "samples", "max_q_norm"},     (optional)
 *     "bound":        {"radii", "per_radius", "tail_fraction", "t_end"}     (optional)
 *   }
 *
 * Unknown keys are rejected at every level.
 */
struct ExperimentConfig {
    std::vector<NodeSpec> nodes;
    Graph graph;
    Graph graph_d;
    CouplingGains gains;
    Matrix gamma;
    Matrix gamma_d;
    Matrix p;
    IntegrationOptions integrator;
    StackedState initial_state;
    OutputSpec outputs;
    CertifySpec certify;
    BoundSpec bound;

    std::size_t dimension() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<NodeModel> build_models(const ExperimentConfig& cfg);
NetworkSystem build_network(const ExperimentConfig& cfg);

}  // namespace hetsync
