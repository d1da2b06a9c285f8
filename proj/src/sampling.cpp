#include "wulff/sampling.hpp"

#include "wulff/curvalg.hpp"

#include <cmath>

namespace wulff {

Eigen::MatrixXd random_spd(Rng& rng, int n, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    const Eigen::MatrixXd q = random_orthogonal(rng, n);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = u(rng);
    Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd random_symmetric(Rng& rng, int n, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) m(i, k) = g(rng);
    }
    return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd random_orthogonal(Rng& rng, int n)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) m(i, k) = g(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_cone_kappa(Rng& rng, int n, int r, double umbilic_rate)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> k(-3.0, 3.0);
    if (u(rng) < umbilic_rate) {
        return Eigen::VectorXd::Constant(n, 0.1 + 2.9 * u(rng));
    }
    for (;;) {
        Eigen::VectorXd kappa(n);
        for (int i = 0; i < n; ++i) kappa(i) = k(rng);
        const Eigen::VectorXd e = elementary_symmetric(kappa);
        bool inside = true;
        for (int j = 1; j <= r + 1; ++j) inside = inside && e(j) > 0.0;
        if (inside) return kappa;
    }
}

SpeedFunction random_low_harmonic(Rng& rng, const SampledImmersion& imm, double amplitude)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const bool torus = imm.grid.domain() == ParamDomain::torus;
    const int m = torus ? 4 : imm.n + 1;
    const double c0 = amplitude * u(rng);
    Eigen::VectorXd c1(m);
    Eigen::MatrixXd c2(m, m);
    for (int i = 0; i < m; ++i) c1(i) = amplitude * u(rng);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) c2(i, k) = 0.5 * amplitude * u(rng);
    }
    return [=](const Vec& param, const Vec&, const Vec&) {
        Eigen::VectorXd y(m);
        if (torus) {
            y << std::cos(param(0)), std::sin(param(0)), std::cos(param(1)), std::sin(param(1));
        } else {
            y = param;
        }
        return c0 + c1.dot(y) + y.dot(c2 * y);
    };
}

SpeedFunction mean_zero_speed(const SampledImmersion& imm, SpeedFunction speed)
{
    const std::vector<double> v = sample_speed(imm, speed);
    const double mean = integrate(imm, v) / total_area(imm);
    return [speed = std::move(speed), mean](const Vec& p, const Vec& x, const Vec& nu) { return speed(p, x, nu) - mean; };
}

} // namespace wulff
