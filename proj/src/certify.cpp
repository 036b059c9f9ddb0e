#include "hetsync/certify.hpp"

#include "hetsync/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hetsync {

namespace {

void require_hypotheses(double lambda2, double lambda_min_pg, double mu_pgd, double delta) {
    if (!(lambda2 > 0.0)) {
        throw HypothesisError("connected graphs", "hypothesis violated: G disconnected (lambda_2 = " +
                                                      std::to_string(lambda2) + ")");
    }
    if (!(delta > 0.0)) {
        throw HypothesisError("connected graphs",
                              "hypothesis violated: G_d disconnected (minimum density = " +
                                  std::to_string(delta) + ")");
    }
    if (!(lambda_min_pg > 0.0)) {
        throw HypothesisError("QUAD coupling matrices",
                              "hypothesis violated: sym(P*Gamma) not positive definite "
                              "(lambda_min = " + std::to_string(lambda_min_pg) + ")");
    }
    if (!(mu_pgd > 0.0)) {
        throw HypothesisError("QUAD coupling matrices",
                              "hypothesis violated: mu_inf_minus(P*Gamma_d) <= 0 (value = " +
                                  std::to_string(mu_pgd) + ")");
    }
}

std::string number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

CriticalGains critical_gains(double max_q_norm, double lambda2, const Matrix& p,
                             const Matrix& gamma, const Vector& m, double delta,
                             const Matrix& gamma_d) {
    if (p.rows() != p.cols() || gamma.rows() != p.rows() || gamma.cols() != p.cols() ||
        gamma_d.rows() != p.rows() || gamma_d.cols() != p.cols() || m.size() != p.rows()) {
        throw ValidationError("critical_gains: P, Gamma, Gamma_d must be n x n and m of length n");
    }
    if ((m.array() < 0.0).any()) {
        throw ValidationError("critical_gains: m must be nonnegative");
    }
    const double lambda_min_pg = lambda_min_sym(p * gamma);
    const double mu_pgd = mu_inf_minus(p * gamma_d);
    require_hypotheses(lambda2, lambda_min_pg, mu_pgd, delta);

    CriticalGains out;
    out.c_star = std::max(0.0, max_q_norm) / (lambda2 * lambda_min_pg);
    const double big_m = (p.cwiseAbs() * m).lpNorm<Eigen::Infinity>();
    out.c_d_star = big_m / (delta * mu_pgd);
    return out;
}

std::string to_string(QuadMode mode) { return mode == QuadMode::prop2 ? "prop2" : "sampled"; }

QuadMode parse_quad_mode(const std::string& s) {
    if (s == "prop2") return QuadMode::prop2;
    if (s == "sampled") return QuadMode::sampled;
    throw ValidationError("unknown quad_mode '" + s + "' (expected prop2 or sampled)");
}

GainCertificate certify_network(const NetworkSystem& net, double r, const CertifyOptions& options) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw ValidationError("certify: radius must be positive");
    }
    const std::size_t nodes = net.node_count();
    const std::size_t n = net.dimension();
    const auto ni = static_cast<Eigen::Index>(n);

    GainCertificate cert;
    cert.radius = r;
    cert.lambda_min_sym_pgamma = lambda_min_sym(net.p() * net.gamma());
    cert.mu_pgd = mu_inf_minus(net.p() * net.gamma_d());
    cert.provenance["lambda_min_sym_pgamma"] = "analytic";
    cert.provenance["mu_pgd"] = "analytic";

    if (nodes == 1) {
        // nothing to synchronize
        cert.q.push_back(Matrix::Zero(ni, ni));
        cert.q_norms.push_back(0.0);
        cert.m = Vector::Zero(ni);
        for (const char* key : {"q", "lambda2", "delta", "m"}) cert.provenance[key] = "single node";
        return cert;
    }

    if (!is_connected(net.graph())) {
        throw HypothesisError("connected graphs", "hypothesis violated: G disconnected");
    }
    if (!is_connected(net.graph_d())) {
        throw HypothesisError("connected graphs", "hypothesis violated: G_d disconnected");
    }
    cert.lambda2 = algebraic_connectivity(net.graph());
    cert.delta = minimum_density(net.graph_d());
    cert.provenance["lambda2"] = "analytic";
    cert.provenance["delta"] = "analytic(bipartition enumeration)";
    require_hypotheses(cert.lambda2, cert.lambda_min_sym_pgamma, cert.mu_pgd, cert.delta);

    for (std::size_t i = 0; i < nodes; ++i) {
        const NodeModel& model = net.models()[i];
        if (options.quad_mode == QuadMode::prop2) {
            if (!model.jacobian_bounds) {
                throw ValidationError("certify: node " + std::to_string(i) + " (" + model.name +
                                      ") has no Jacobian bounds; use sampled quad_mode");
            }
            cert.q.push_back(quad_from_jacobian_bounds(model.jacobian_bounds(r)));
            cert.q_norms.push_back(spectral_norm(cert.q.back()));
        } else {
            const auto est = estimate_quad_sampled(model.field, n, r, options.samples,
                                                   options.seed + i);
            cert.q.push_back(est.value * Matrix::Identity(ni, ni));
            cert.q_norms.push_back(est.value);
        }
    }
    cert.max_q_norm = *std::max_element(cert.q_norms.begin(), cert.q_norms.end());
    cert.provenance["q"] =
        options.quad_mode == QuadMode::prop2
            ? "analytic(jacobian bounds, r=" + number(r) + ")"
            : "sampled(seed=" + std::to_string(options.seed) + "+i, count=" +
                  std::to_string(options.samples) + ")";
    if (options.q_norm_override) {
        cert.max_q_norm = *options.q_norm_override;
        cert.provenance["max_q_norm"] = "injected";
    } else {
        cert.provenance["max_q_norm"] = cert.provenance["q"];
    }

    std::vector<VectorField> fields;
    fields.reserve(nodes);
    for (const auto& model : net.models()) fields.push_back(model.field);
    const auto mismatch = estimate_mismatch_bound(fields, n, r, options.samples, options.seed);
    cert.m = mismatch.value;
    cert.provenance["m"] = "sampled(seed=" + std::to_string(mismatch.seed) +
                           ", count=" + std::to_string(mismatch.samples) + ")";

    const auto gains = critical_gains(cert.max_q_norm, cert.lambda2, net.p(), net.gamma(), cert.m,
                                      cert.delta, net.gamma_d());
    cert.big_m = (net.p().cwiseAbs() * cert.m).lpNorm<Eigen::Infinity>();
    cert.c_star = gains.c_star;
    cert.c_d_star = gains.c_d_star;
    return cert;
}

namespace {

nlohmann::json matrix_json(const Matrix& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json to_json(const GainCertificate& cert) {
    nlohmann::json j;
    j["radius"] = cert.radius;
    j["q"] = nlohmann::json::array();
    for (const auto& q : cert.q) j["q"].push_back(matrix_json(q));
    j["q_norms"] = cert.q_norms;
    j["max_q_norm"] = cert.max_q_norm;
    j["lambda2"] = cert.lambda2;
    j["lambda_min_sym_pgamma"] = cert.lambda_min_sym_pgamma;
    j["m"] = std::vector<double>(cert.m.data(), cert.m.data() + cert.m.size());
    j["big_m"] = cert.big_m;
    j["delta"] = cert.delta;
    j["mu_pgd"] = cert.mu_pgd;
    j["c_star"] = cert.c_star;
    j["c_d_star"] = cert.c_d_star;
    j["provenance"] = cert.provenance;
    return j;
}

}  // namespace hetsync
