#include "hetsync/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hetsync {

namespace {

void require_square(const Matrix& a, const char* op) {
    if (a.rows() != a.cols()) {
        throw ValidationError(std::string(op) + ": matrix must be square");
    }
}

std::string format_vector(const Vector& v) {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        os << (k ? ", " : "") << v(k);
    }
    os << "]";
    return os.str();
}

Vector checked_eval(const VectorField& f, const Vector& x, const char* op) {
    Vector y = f(x, 0.0);
    if (!y.allFinite()) {
        throw NumericalError(std::string(op) + ": non-finite field value at x = " + format_vector(x));
    }
    return y;
}

class BallSampler {
public:
    BallSampler(std::size_t dimension, double radius, std::uint64_t seed)
        : dim_(static_cast<Eigen::Index>(dimension)), radius_(radius), rng_(seed) {}

    Vector on_sphere() {
        Vector v(dim_);
        double norm = 0.0;
        do {
            for (Eigen::Index k = 0; k < dim_; ++k) v(k) = normal_(rng_);
            norm = v.norm();
        } while (norm == 0.0);
        return v * (radius_ / norm);
    }

    Vector in_ball() {
        const double u = uniform_(rng_);
        return on_sphere() * std::pow(u, 1.0 / static_cast<double>(dim_));
    }

    Vector direction() { return on_sphere() / radius_; }

    double gaussian() { return normal_(rng_); }

    Vector project(Vector v) const {
        const double norm = v.norm();
        if (norm > radius_) v *= radius_ / norm;
        return v;
    }

private:
    Eigen::Index dim_;
    double radius_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace

double mu_inf_minus(const Matrix& a) {
    require_square(a, "mu_inf_minus");
    if (a.rows() == 0) {
        throw ValidationError("mu_inf_minus: empty matrix");
    }
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double off = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
        best = std::min(best, a(i, i) - off);
    }
    return best;
}

Matrix sym_part(const Matrix& a) {
    require_square(a, "sym_part");
    return 0.5 * (a + a.transpose());
}

double lambda_min_sym(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym_part(a), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

double spectral_norm(const Matrix& a) {
    require_square(a, "spectral_norm");
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

void validate(const JacobianBounds& bounds) {
    require_square(bounds.s, "jacobian bounds");
    if (!bounds.s.allFinite() || (bounds.s.array() < 0.0).any()) {
        throw ValidationError("jacobian bounds: entries must be finite and nonnegative");
    }
    if (!(bounds.radius >= 0.0)) {
        throw ValidationError("jacobian bounds: radius must be nonnegative");
    }
}

Matrix quad_from_jacobian_bounds(const JacobianBounds& bounds) {
    validate(bounds);
    const Matrix& s = bounds.s;
    const Eigen::Index n = s.rows();
    Matrix q = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double value = s(i, i);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) value += 0.5 * (s(i, j) + s(j, i));
        }
        q(i, i) = value;
    }
    return q;
}

SampledScalar estimate_quad_sampled(const VectorField& f, std::size_t dimension, double radius,
                                    std::size_t pair_count, std::uint64_t seed) {
    if (dimension == 0 || !(radius > 0.0) || pair_count == 0) {
        throw ValidationError("estimate_quad_sampled: need dimension >= 1, radius > 0, pair_count >= 1");
    }
    BallSampler sampler(dimension, radius, seed);
    const double close = 1e-3 * radius;

    double best = -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (std::size_t k = 0; k < pair_count; ++k) {
        const Vector v1 = sampler.in_ball();
        Vector v2;
        if (k % 2 == 0) {
            v2 = sampler.in_ball();
        } else {
            const Vector d = sampler.direction();
            v2 = v1 + close * d;
            if (v2.norm() > radius) v2 = v1 - close * d;
            v2 = sampler.project(v2);
        }
        const Vector diff = v1 - v2;
        const double denom = diff.squaredNorm();
        if (denom == 0.0) continue;
        const Vector df = checked_eval(f, v1, "estimate_quad_sampled") -
                          checked_eval(f, v2, "estimate_quad_sampled");
        best = std::max(best, diff.dot(df) / denom);
        ++used;
    }
    return {best, used, seed};
}

SampledVector estimate_mismatch_bound(const std::vector<VectorField>& fields,
                                      std::size_t dimension, double radius,
                                      std::size_t sample_count, std::uint64_t seed) {
    if (fields.empty()) {
        throw ValidationError("estimate_mismatch_bound: need at least one model");
    }
    if (dimension == 0 || !(radius > 0.0) || sample_count == 0) {
        throw ValidationError(
            "estimate_mismatch_bound: need dimension >= 1, radius > 0, sample_count >= 1");
    }
    const std::size_t nodes = fields.size();
    const auto n = static_cast<Eigen::Index>(dimension);
    const std::size_t stacked = nodes * dimension;
    Vector m = Vector::Zero(n);
    if (nodes == 1) {
        return {m, 0, seed};
    }

    // per-component mismatch at one stacked state
    auto mismatch = [&](const Vector& x) {
        Vector avg = Vector::Zero(n);
        for (std::size_t i = 0; i < nodes; ++i) avg += node_block(x, i, dimension);
        avg /= static_cast<double>(nodes);

        Vector f_avg = Vector::Zero(n);
        for (std::size_t i = 0; i < nodes; ++i) {
            f_avg += checked_eval(fields[i], Vector(node_block(x, i, dimension)),
                                  "estimate_mismatch_bound");
        }
        f_avg /= static_cast<double>(nodes);

        Vector worst = Vector::Zero(n);
        for (std::size_t i = 0; i < nodes; ++i) {
            const Vector fi = checked_eval(fields[i], avg, "estimate_mismatch_bound");
            worst = worst.cwiseMax((fi - f_avg).cwiseAbs());
        }
        return worst;
    };

    BallSampler sampler(stacked, radius, seed);
    std::size_t used = 0;

    // best few draws per component, seeds for the local search
    constexpr std::size_t kSeedsPerComponent = 4;
    std::vector<std::vector<std::pair<double, Vector>>> top(static_cast<std::size_t>(n));
    auto record = [&](const Vector& x) {
        const Vector g = mismatch(x);
        ++used;
        m = m.cwiseMax(g);
        for (Eigen::Index k = 0; k < n; ++k) {
            auto& slot = top[static_cast<std::size_t>(k)];
            if (slot.size() < kSeedsPerComponent || g(k) > slot.back().first) {
                if (slot.size() == kSeedsPerComponent) slot.pop_back();
                auto pos = std::find_if(slot.begin(), slot.end(),
                                        [&](const auto& e) { return e.first < g(k); });
                slot.insert(pos, {g(k), x});
            }
        }
        return g;
    };

    // coordinate-extreme probes
    for (std::size_t k = 0; k < stacked && used < sample_count; ++k) {
        for (const double sign : {1.0, -1.0}) {
            if (used >= sample_count) break;
            Vector x = Vector::Zero(static_cast<Eigen::Index>(stacked));
            x(static_cast<Eigen::Index>(k)) = sign * radius;
            record(x);
        }
    }

    // a fifth of what is left goes to local refinement, the rest (with any
    // rounding remainder) to global draws, so exactly sample_count evaluations run
    const std::size_t remaining = sample_count - used;
    const std::size_t starts = static_cast<std::size_t>(n) * kSeedsPerComponent;
    const std::size_t per_start = starts ? (remaining / 5) / starts : 0;
    const std::size_t draw_budget = remaining - per_start * starts;
    for (std::size_t k = 0; k < draw_budget; ++k) {
        record(k % 2 == 0 ? sampler.in_ball() : sampler.on_sphere());
    }

    // (1+1) random search, step adapted by success
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto seeds = top[static_cast<std::size_t>(k)];
        for (const auto& [start_value, start] : seeds) {
            Vector x = start;
            double value = start_value;
            double step = 0.1 * radius;
            for (std::size_t it = 0; it < per_start; ++it) {
                Vector candidate = x;
                for (Eigen::Index c = 0; c < candidate.size(); ++c) candidate(c) += step * sampler.gaussian();
                candidate = sampler.project(candidate);
                const Vector g = record(candidate);
                if (g(k) > value) {
                    value = g(k);
                    x = candidate;
                    step *= 1.5;
                } else {
                    step *= 0.95;
                }
                step = std::clamp(step, 1e-9 * radius, radius);
            }
        }
    }
    return {m, used, seed};
}

double semipassivity_residual(const ScalarField& h, const VectorField& f, const Vector& x) {
    return x.dot(f(x, 0.0)) + h(x);
}

}  // namespace hetsync
