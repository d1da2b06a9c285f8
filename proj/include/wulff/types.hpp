#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace wulff {

/// Small dense vector with inline storage (ambient dimension up to 9).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 9, 1>;
/// Small dense matrix with inline storage (up to 9x9).
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 9, 9>;

// Error taxonomy. Each maps to one failure family named by the operation
// contracts; the CLI turns them into exit codes.

/// Argument outside the operation's domain (non-unit vector, bad index, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Anisotropy model produced a non-positive value or failed convexity.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Geometry construction failed (degenerate metric, bad orientation).
struct BuildError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two independent constructions of the same quantity disagree.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite-difference step search did not find a stable plateau.
struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Binomial coefficient as a double; zero outside 0 <= k <= n.
inline double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

} // namespace wulff
