#include "hetsync/dynamics.hpp"

#include <cmath>

namespace hetsync {

NodeModel make_vdp(double mu, double epsilon, double eta) {
    if (!std::isfinite(mu) || !std::isfinite(epsilon) || !std::isfinite(eta)) {
        throw ValidationError("vdp: parameters must be finite");
    }
    NodeModel model;
    model.name = "vdp";
    model.dimension = 2;
    model.field = [mu, epsilon, eta](const Vector& x, double) {
        Vector dx(2);
        dx(0) = x(1) - epsilon * x(0);
        dx(1) = mu * (1.0 - x(0) * x(0) - eta * x(1) * x(1)) * x(1) - x(0);
        return dx;
    };
    model.stability_component = [mu, epsilon, eta](const Vector& x) {
        return epsilon * x(0) * x(0) + mu * x(1) * x(1) * (x(0) * x(0) + eta * x(1) * x(1) - 1.0);
    };
    model.jacobian_bounds = [mu](double r) {
        // df1/dx1 = -eps <= 0, |df1/dx2| = 1,
        // |df2/dx1| = |-2 mu x1 x2 - 1| <= mu r^2 + 1, df2/dx2 = mu (1 - x1^2 - 3 eta x2^2) <= mu
        JacobianBounds b;
        b.radius = r;
        b.s.resize(2, 2);
        b.s << 0.0, 1.0, std::abs(mu) * r * r + 1.0, std::max(mu, 0.0);
        return b;
    };
    return model;
}

NodeModel make_linear(std::size_t dimension, double rate) {
    if (dimension == 0 || !std::isfinite(rate)) {
        throw ValidationError("linear: need dim >= 1 and finite rate");
    }
    NodeModel model;
    model.name = "linear";
    model.dimension = dimension;
    model.field = [rate](const Vector& x, double) -> Vector { return rate * x; };
    model.stability_component = [rate](const Vector& x) { return -rate * x.squaredNorm(); };
    model.jacobian_bounds = [dimension, rate](double r) {
        JacobianBounds b;
        b.radius = r;
        const auto n = static_cast<Eigen::Index>(dimension);
        b.s = Matrix::Identity(n, n) * std::max(rate, 0.0);
        return b;
    };
    return model;
}

namespace {

double take(const ModelParameters& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::string& model, const ModelParameters& params,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : params) {
        bool found = false;
        for (const char* k : known) found = found || key == k;
        if (!found) {
            throw ValidationError("model '" + model + "': unknown parameter '" + key + "'");
        }
    }
}

}  // namespace

NodeModel make_builtin_model(const std::string& name, const ModelParameters& params) {
    if (name == "vdp") {
        reject_unknown(name, params, {"mu", "epsilon", "eta"});
        return make_vdp(take(params, "mu", 1.0), take(params, "epsilon", 0.01),
                        take(params, "eta", 0.001));
    }
    if (name == "linear") {
        reject_unknown(name, params, {"dim", "rate"});
        const double dim = take(params, "dim", 1.0);
        if (dim < 1.0 || dim != std::floor(dim)) {
            throw ValidationError("model 'linear': dim must be a positive integer");
        }
        return make_linear(static_cast<std::size_t>(dim), take(params, "rate", -1.0));
    }
    throw ValidationError("unknown model '" + name + "'");
}

std::vector<std::string> builtin_model_names() { return {"linear", "vdp"}; }

Vector average_field(const std::vector<NodeModel>& models, const StackedState& x, double t) {
    if (models.empty()) {
        throw ValidationError("average_field: no models");
    }
    const std::size_t n = models.front().dimension;
    for (const auto& m : models) {
        if (m.dimension != n) throw ValidationError("average_field: model dimension mismatch");
    }
    if (static_cast<std::size_t>(x.size()) != models.size() * n) {
        throw ValidationError("average_field: state length does not match N * n");
    }
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < models.size(); ++i) {
        sum += models[i](Vector(node_block(x, i, n)), t);
    }
    return sum / static_cast<double>(models.size());
}

Vector state_average(const StackedState& x, std::size_t node_count, std::size_t dimension) {
    if (node_count == 0 || dimension == 0 ||
        static_cast<std::size_t>(x.size()) != node_count * dimension) {
        throw ValidationError("state length does not match N * n");
    }
    Vector avg = Vector::Zero(static_cast<Eigen::Index>(dimension));
    for (std::size_t i = 0; i < node_count; ++i) avg += node_block(x, i, dimension);
    return avg / static_cast<double>(node_count);
}

ErrorDecomposition decompose_errors(const StackedState& x, std::size_t node_count,
                                    std::size_t dimension) {
    ErrorDecomposition out;
    out.average = state_average(x, node_count, dimension);
    out.errors.reserve(node_count);
    double sum = 0.0;
    for (std::size_t i = 0; i < node_count; ++i) {
        out.errors.emplace_back(node_block(x, i, dimension) - out.average);
        sum += out.errors.back().norm();
    }
    out.e_tot = sum / static_cast<double>(node_count);
    return out;
}

double total_error(const StackedState& x, std::size_t node_count, std::size_t dimension) {
    const Vector avg = state_average(x, node_count, dimension);
    double sum = 0.0;
    for (std::size_t i = 0; i < node_count; ++i) sum += (node_block(x, i, dimension) - avg).norm();
    return sum / static_cast<double>(node_count);
}

}  // namespace hetsync
