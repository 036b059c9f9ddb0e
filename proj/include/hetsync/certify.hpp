#pragma once

#include "hetsync/measures.hpp"
#include "hetsync/simulate.hpp"
#include "hetsync/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hetsync {

struct CriticalGains {
    double c_star = 0.0;
    double c_d_star = 0.0;
};

/**
 * Critical coupling gains
 *
 *     c*   = max_i ||Q_i||_2      / (lambda_2(L) * lambda_min(sym(P Gamma)))
 *     c_d* = || |P| m ||_inf       / (delta(G_d) * mu_inf_minus(P Gamma_d))
 *
 * where |P| is the entrywise absolute value. A negative Q-norm input (possible
 * with the signed sampled QUAD constant) yields c* = 0. Throws HypothesisError
 * when a denominator is not positive.
 */
CriticalGains critical_gains(double max_q_norm, double lambda2, const Matrix& p,
                             const Matrix& gamma, const Vector& m, double delta,
                             const Matrix& gamma_d);

enum class QuadMode { prop2, sampled };

std::string to_string(QuadMode mode);
QuadMode parse_quad_mode(const std::string& s);

struct CertifyOptions {
    QuadMode quad_mode = QuadMode::prop2;
    std::size_t samples = kDefaultSampleCount;
    std::uint64_t seed = 0;
    /// Use this value for max_i ||Q_i||_2 instead of estimating it.
    std::optional<double> q_norm_override;
};

struct GainCertificate {
    double radius = 0.0;
    std::vector<Matrix> q;       // per node
    std::vector<double> q_norms; // per node, ||Q_i||_2 (signed q in sampled mode)
    double max_q_norm = 0.0;
    double lambda2 = 0.0;
    double lambda_min_sym_pgamma = 0.0;
    Vector m;
    double big_m = 0.0;  // || |P| m ||_inf
    double delta = 0.0;
    double mu_pgd = 0.0;
    double c_star = 0.0;
    double c_d_star = 0.0;
    std::map<std::string, std::string> provenance;
};

/**
 * Certification pipeline over the ball of radius r: per-node QUAD matrices
 * (Jacobian bounds or sampling), lambda_2 of G, minimum density of G_d, the
 * mismatch bound m over the stacked ball, then the critical gains.
 *
 * In sampled mode Q_i = q_i I with q_i the signed sampled constant, and the
 * reported per-node norm is q_i itself.
 */
GainCertificate certify_network(const NetworkSystem& net, double r,
                                const CertifyOptions& options = {});

nlohmann::json to_json(const GainCertificate& cert);

}  // namespace hetsync
