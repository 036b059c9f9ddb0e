#pragma once

#include "hetsync/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace hetsync {

/// Time-dependent vector field f(x; t).
using VectorField = std::function<Vector(const Vector& x, double t)>;
using ScalarField = std::function<double(const Vector& x)>;

/// min_i (A_ii - sum_{j != i} |A_ij|)
double mu_inf_minus(const Matrix& a);

/// (A + A^T) / 2
Matrix sym_part(const Matrix& a);

/// Smallest eigenvalue of sym_part(a).
double lambda_min_sym(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/**
 * Upper bounds on a Jacobian over the ball ||x|| <= radius:
 * df_i/dx_i <= s(i,i) and |df_i/dx_j| <= s(i,j) for i != j. All entries >= 0.
 */
struct JacobianBounds {
    Matrix s;
    double radius = 0.0;
};

/// Throws ValidationError unless s is square, finite and entrywise nonnegative.
void validate(const JacobianBounds& bounds);

/**
 * Diagonal Q such that f is QUAD(I, Q) on the bounded region:
 * Q_ii = S_ii + sum_{j != i} (S_ij + S_ji) / 2.
 */
Matrix quad_from_jacobian_bounds(const JacobianBounds& bounds);

// -----------------------------------------------------------------------------
// Sampling estimators
//
// These are lower bounds on the quantity they estimate (a max over finitely
// many points), not rigorous enclosures. All are deterministic given the seed.
// Fields are evaluated at t = 0.
// -----------------------------------------------------------------------------

struct SampledScalar {
    double value = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct SampledVector {
    Vector value;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultSampleCount = 100'000;

/**
 * Largest observed (v1 - v2)^T (f(v1) - f(v2)) / ||v1 - v2||^2 over pairs in the
 * ball of the given radius: the tightest scalar q with f QUAD(I, qI) on the
 * sampled set. Half the pairs are independent uniform draws, half are close
 * pairs probing the local Jacobian.
 */
SampledScalar estimate_quad_sampled(const VectorField& f, std::size_t dimension, double radius,
                                    std::size_t pair_count, std::uint64_t seed);

/**
 * Componentwise max of |f_i(x_avg) - f_avg(x)| over stacked states x with
 * ||x|| <= radius, where x_avg is the node-state average and f_avg the average
 * field. Draws: coordinate-extreme probes, uniform-in-ball, uniform on the
 * boundary sphere, then a seeded local search from the best draws per component.
 */
SampledVector estimate_mismatch_bound(const std::vector<VectorField>& fields,
                                      std::size_t dimension, double radius,
                                      std::size_t sample_count, std::uint64_t seed);

/// x^T f(x) + h(x). Zero when V = ||x||^2 / 2 has dV/dt = -h(x) + x^T u.
double semipassivity_residual(const ScalarField& h, const VectorField& f, const Vector& x);

}  // namespace hetsync
