#pragma once

#include "wulff/types.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace wulff {

// Hyperspherical coordinates on S^n: n-1 polar angles in (0, pi) followed
// by one periodic azimuth. For n = 2 this is (theta, phi); for n = 3 it is
// (chi, theta, phi).
//
//   x(psi_1, rest) = (sin psi_1 * y(rest), cos psi_1),   y in S^{n-1}
//   y on S^1       = (cos phi, sin phi)

/// Point on S^n for the given angles (size n).
inline Vec sphere_point(std::span<const double> angles)
{
    const auto n = static_cast<Eigen::Index>(angles.size());
    if (n == 1) {
        Vec x(2);
        x << std::cos(angles[0]), std::sin(angles[0]);
        return x;
    }
    const Vec y = sphere_point(angles.subspan(1));
    Vec x(n + 1);
    x.head(n) = std::sin(angles[0]) * y;
    x(n) = std::cos(angles[0]);
    return x;
}

/// Coordinate tangent vectors dx/d(angle_k), as columns of an (n+1) x n matrix.
/// Columns are mutually orthogonal; their norms are the scale factors.
inline Mat sphere_tangents(std::span<const double> angles)
{
    const auto n = static_cast<Eigen::Index>(angles.size());
    Mat t = Mat::Zero(n + 1, n);
    if (n == 1) {
        t << -std::sin(angles[0]), std::cos(angles[0]);
        return t;
    }
    const Vec y = sphere_point(angles.subspan(1));
    const Mat dy = sphere_tangents(angles.subspan(1));
    t.col(0).head(n) = std::cos(angles[0]) * y;
    t(n, 0) = -std::sin(angles[0]);
    t.block(0, 1, n, n - 1) = std::sin(angles[0]) * dy;
    return t;
}

/// Fejer's first rule on the offset nodes theta_k = (k + 1/2) pi / N:
/// sum_k w_k g(theta_k) approximates the integral of g(theta) sin(theta)
/// over (0, pi) for g smooth and even about both ends.
inline std::vector<double> fejer_weights(int count)
{
    std::vector<double> w(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double theta = (k + 0.5) * std::numbers::pi / count;
        double s = 0.0;
        for (int j = 1; j <= count / 2; ++j) s += std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
        w[static_cast<std::size_t>(k)] = 2.0 / count * (1.0 - 2.0 * s);
    }
    return w;
}

} // namespace wulff
