#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetsync {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Stacked network state [x_1; ...; x_N], each block of length n.
using StackedState = Eigen::VectorXd;

// =============================================================================
// Errors
// =============================================================================

/// Invalid input: bad graph, malformed config, dimension mismatch, unmet precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A hypothesis of the synchronization theorem does not hold for the given network.
class HypothesisError : public ValidationError {
public:
    HypothesisError(std::string hypothesis, const std::string& what)
        : ValidationError(what), hypothesis_(std::move(hypothesis)) {}

    const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    std::string hypothesis_;
};

/// Non-finite values during integration or field evaluation.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double time = 0.0)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

inline auto node_block(const StackedState& x, std::size_t i, std::size_t n) {
    return x.segment(static_cast<Eigen::Index>(i * n), static_cast<Eigen::Index>(n));
}

inline auto node_block(StackedState& x, std::size_t i, std::size_t n) {
    return x.segment(static_cast<Eigen::Index>(i * n), static_cast<Eigen::Index>(n));
}

}  // namespace hetsync
