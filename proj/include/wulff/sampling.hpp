#pragma once

#include "wulff/geometry.hpp"

#include <random>

namespace wulff {

using Rng = std::mt19937_64;

/// Symmetric positive-definite matrix with eigenvalues in [lo, hi].
Eigen::MatrixXd random_spd(Rng& rng, int n, double lo = 0.2, double hi = 2.0);
/// Symmetric matrix with entries of size ~scale.
Eigen::MatrixXd random_symmetric(Rng& rng, int n, double scale = 1.0);
/// Random orthogonal matrix (QR of a Gaussian matrix).
Eigen::MatrixXd random_orthogonal(Rng& rng, int n);

/// kappa in the cone e_1, ..., e_{r+1} > 0, with max |kappa| <= 3. With
/// probability `umbilic_rate` all entries are equal.
Eigen::VectorXd random_cone_kappa(Rng& rng, int n, int r, double umbilic_rate = 0.05);

/// Low-order polynomial of the parameter point (sphere charts) or of the
/// angle sines and cosines (torus charts), with random coefficients.
SpeedFunction random_low_harmonic(Rng& rng, const SampledImmersion& imm, double amplitude = 0.3);

/// The speed minus its quadrature mean on `imm`.
SpeedFunction mean_zero_speed(const SampledImmersion& imm, SpeedFunction speed);

} // namespace wulff
