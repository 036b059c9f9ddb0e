#include "hetsync/config.hpp"

#include <cmath>
#include <fstream>

namespace hetsync {

namespace {

using nlohmann::json;

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) {
    return path + "/" + std::to_string(index);
}

void expect_object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) throw ConfigError(child(path, key), "unknown key");
    }
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

double number_or(const json& parent, const char* key, const std::string& path, double fallback) {
    return parent.contains(key) ? number(parent.at(key), child(path, key)) : fallback;
}

std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(path, "expected a nonnegative integer");
    }
    return j.get<std::size_t>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

Matrix matrix(const json& j, const std::string& path, std::size_t n) {
    if (!j.is_array() || j.size() != n) {
        throw ConfigError(path, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    const auto ni = static_cast<Eigen::Index>(n);
    Matrix out(ni, ni);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != n) {
            throw ConfigError(child(path, r), "expected a row of length " + std::to_string(n));
        }
        for (std::size_t c = 0; c < n; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                number(row[c], child(child(path, r), c));
        }
    }
    return out;
}

Graph graph(const json& j, const std::string& path, std::size_t nodes) {
    if (j.is_string()) {
        if (j.get<std::string>() != "complete") {
            throw ConfigError(path, "expected \"complete\" or an edge list");
        }
        return complete_graph(nodes);
    }
    if (!j.is_array()) throw ConfigError(path, "expected \"complete\" or an edge list");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& e = j[k];
        if (!e.is_array() || e.size() != 2) throw ConfigError(child(path, k), "expected a pair [i, j]");
        edges.emplace_back(count(e[0], child(child(path, k), 0)), count(e[1], child(child(path, k), 1)));
    }
    try {
        return build_graph(nodes, edges);
    } catch (const ValidationError& err) {
        throw ConfigError(path, err.what());
    }
}

}  // namespace

std::size_t ExperimentConfig::dimension() const {
    return static_cast<std::size_t>(gamma.rows());
}

ExperimentConfig parse_config(const json& doc) {
    expect_object(doc, "", {"nodes", "graph", "graph_d", "gains", "matrices", "integrator",
                            "initial_state", "outputs", "certify", "bound"});
    for (const char* required : {"nodes", "graph", "graph_d", "initial_state"}) {
        if (!doc.contains(required)) throw ConfigError(child("", required), "missing required key");
    }

    ExperimentConfig cfg;

    // nodes
    const auto& nodes = doc.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw ConfigError("/nodes", "expected a nonempty array");
    std::size_t n = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = child("/nodes", i);
        expect_object(nodes[i], path, {"model", "params"});
        if (!nodes[i].contains("model")) throw ConfigError(child(path, "model"), "missing required key");
        NodeSpec spec;
        spec.model = text(nodes[i].at("model"), child(path, "model"));
        if (nodes[i].contains("params")) {
            const auto& params = nodes[i].at("params");
            if (!params.is_object()) throw ConfigError(child(path, "params"), "expected an object");
            for (const auto& [key, value] : params.items()) {
                spec.params[key] = number(value, child(child(path, "params"), key));
            }
        }
        std::size_t dim = 0;
        try {
            dim = make_builtin_model(spec.model, spec.params).dimension;
        } catch (const ValidationError& err) {
            throw ConfigError(path, err.what());
        }
        if (i == 0) n = dim;
        if (dim != n) {
            throw ConfigError(path, "dimension " + std::to_string(dim) + " differs from node 0 (" +
                                        std::to_string(n) + ")");
        }
        cfg.nodes.push_back(std::move(spec));
    }
    const std::size_t count_nodes = cfg.nodes.size();

    cfg.graph = graph(doc.at("graph"), "/graph", count_nodes);
    cfg.graph_d = graph(doc.at("graph_d"), "/graph_d", count_nodes);

    // gains
    if (doc.contains("gains")) {
        const auto& g = doc.at("gains");
        expect_object(g, "/gains", {"c", "c_d"});
        cfg.gains.c = number_or(g, "c", "/gains", 0.0);
        cfg.gains.c_d = number_or(g, "c_d", "/gains", 0.0);
        if (cfg.gains.c < 0.0) throw ConfigError("/gains/c", "must be nonnegative");
        if (cfg.gains.c_d < 0.0) throw ConfigError("/gains/c_d", "must be nonnegative");
    }

    // matrices
    const auto ni = static_cast<Eigen::Index>(n);
    cfg.gamma = cfg.gamma_d = cfg.p = Matrix::Identity(ni, ni);
    if (doc.contains("matrices")) {
        const auto& m = doc.at("matrices");
        expect_object(m, "/matrices", {"gamma", "gamma_d", "p"});
        if (m.contains("gamma")) cfg.gamma = matrix(m.at("gamma"), "/matrices/gamma", n);
        if (m.contains("gamma_d")) cfg.gamma_d = matrix(m.at("gamma_d"), "/matrices/gamma_d", n);
        if (m.contains("p")) cfg.p = matrix(m.at("p"), "/matrices/p", n);
    }

    // integrator
    if (doc.contains("integrator")) {
        const auto& it = doc.at("integrator");
        expect_object(it, "/integrator", {"method", "dt", "t_end"});
        if (it.contains("method")) {
            try {
                cfg.integrator.method = parse_method(text(it.at("method"), "/integrator/method"));
            } catch (const ConfigError&) {
                throw;
            } catch (const ValidationError& err) {
                throw ConfigError("/integrator/method", err.what());
            }
        }
        cfg.integrator.dt = number_or(it, "dt", "/integrator", cfg.integrator.dt);
        cfg.integrator.t_end = number_or(it, "t_end", "/integrator", cfg.integrator.t_end);
    }
    if (!(cfg.integrator.dt > 0.0)) throw ConfigError("/integrator/dt", "must be positive");
    if (!(cfg.integrator.t_end >= cfg.integrator.dt)) {
        throw ConfigError("/integrator/t_end", "must be at least dt");
    }

    // initial state
    const auto& x0 = doc.at("initial_state");
    if (!x0.is_array() || x0.size() != count_nodes * n) {
        throw ConfigError("/initial_state", "expected an array of length N*n = " +
                                                std::to_string(count_nodes * n));
    }
    cfg.initial_state.resize(static_cast<Eigen::Index>(x0.size()));
    for (std::size_t k = 0; k < x0.size(); ++k) {
        cfg.initial_state(static_cast<Eigen::Index>(k)) = number(x0[k], child("/initial_state", k));
    }

    // outputs
    if (doc.contains("outputs")) {
        const auto& o = doc.at("outputs");
        expect_object(o, "/outputs", {"csv", "summary", "plot", "stride", "log_scale"});
        if (o.contains("csv")) cfg.outputs.csv = text(o.at("csv"), "/outputs/csv");
        if (o.contains("summary")) cfg.outputs.summary = text(o.at("summary"), "/outputs/summary");
        if (o.contains("plot")) cfg.outputs.plot = text(o.at("plot"), "/outputs/plot");
        if (o.contains("stride")) cfg.outputs.stride = count(o.at("stride"), "/outputs/stride");
        if (o.contains("log_scale")) {
            if (!o.at("log_scale").is_boolean()) throw ConfigError("/outputs/log_scale", "expected a boolean");
            cfg.outputs.log_scale = o.at("log_scale").get<bool>();
        }
        if (cfg.outputs.stride == 0) throw ConfigError("/outputs/stride", "must be at least 1");
    }

    // certify
    if (doc.contains("certify")) {
        const auto& c = doc.at("certify");
        expect_object(c, "/certify", {"radius", "quad_mode", "samples", "max_q_norm"});
        if (c.contains("radius")) {
            cfg.certify.radius = number(c.at("radius"), "/certify/radius");
            if (!(*cfg.certify.radius > 0.0)) throw ConfigError("/certify/radius", "must be positive");
        }
        if (c.contains("quad_mode")) {
            try {
                cfg.certify.quad_mode = parse_quad_mode(text(c.at("quad_mode"), "/certify/quad_mode"));
            } catch (const ConfigError&) {
                throw;
            } catch (const ValidationError& err) {
                throw ConfigError("/certify/quad_mode", err.what());
            }
        }
        if (c.contains("samples")) {
            cfg.certify.samples = count(c.at("samples"), "/certify/samples");
            if (cfg.certify.samples == 0) throw ConfigError("/certify/samples", "must be at least 1");
        }
        if (c.contains("max_q_norm")) cfg.certify.max_q_norm = number(c.at("max_q_norm"), "/certify/max_q_norm");
    }

    // bound
    if (doc.contains("bound")) {
        const auto& b = doc.at("bound");
        expect_object(b, "/bound", {"radii", "per_radius", "tail_fraction", "t_end"});
        if (b.contains("radii")) {
            const auto& radii = b.at("radii");
            if (!radii.is_array() || radii.empty()) throw ConfigError("/bound/radii", "expected a nonempty array");
            cfg.bound.radii.clear();
            for (std::size_t k = 0; k < radii.size(); ++k) {
                const double r = number(radii[k], child("/bound/radii", k));
                if (r < 0.0) throw ConfigError(child("/bound/radii", k), "must be nonnegative");
                cfg.bound.radii.push_back(r);
            }
        }
        if (b.contains("per_radius")) {
            cfg.bound.per_radius = count(b.at("per_radius"), "/bound/per_radius");
            if (cfg.bound.per_radius == 0) throw ConfigError("/bound/per_radius", "must be at least 1");
        }
        cfg.bound.tail_fraction = number_or(b, "tail_fraction", "/bound", cfg.bound.tail_fraction);
        if (!(cfg.bound.tail_fraction > 0.0 && cfg.bound.tail_fraction <= 1.0)) {
            throw ConfigError("/bound/tail_fraction", "must lie in (0, 1]");
        }
        if (b.contains("t_end")) {
            cfg.bound.t_end = number(b.at("t_end"), "/bound/t_end");
            if (!(*cfg.bound.t_end >= cfg.integrator.dt)) throw ConfigError("/bound/t_end", "must be at least dt");
        }
    }

    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError("", std::string("malformed JSON: ") + err.what());
    }
    return parse_config(doc);
}

std::vector<NodeModel> build_models(const ExperimentConfig& cfg) {
    std::vector<NodeModel> models;
    models.reserve(cfg.nodes.size());
    for (const auto& spec : cfg.nodes) models.push_back(make_builtin_model(spec.model, spec.params));
    return models;
}

NetworkSystem build_network(const ExperimentConfig& cfg) {
    return NetworkSystem(build_models(cfg), cfg.graph, cfg.graph_d, cfg.gains, cfg.gamma,
                         cfg.gamma_d, cfg.p);
}

}  // namespace hetsync
