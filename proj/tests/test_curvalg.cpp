#include "doctest.h"
#include "oracles.hpp"

#include "wulff/curvalg.hpp"
#include "wulff/functionals.hpp"

#include <cmath>

using namespace wulff;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd diag(std::initializer_list<double> v)
{
    VectorXd d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d(i++) = x;
    return d.asDiagonal();
}

} // namespace

TEST_CASE("S_F reduces to S for isotropic A_F")
{
    const MatrixXd s = diag({1, 2, 3});
    CHECK((sf_operator(MatrixXd::Identity(3, 3), s) - s).norm() == doctest::Approx(0.0));
}

TEST_CASE("S_F of a 2x2 example and its real spectrum")
{
    MatrixXd a = diag({2, 1});
    MatrixXd s(2, 2);
    s << 0, 1, 1, 0;
    const MatrixXd sf = sf_operator(a, s);
    MatrixXd expect(2, 2);
    expect << 0, 2, 1, 0;
    CHECK((sf - expect).norm() < 1e-15);
    const VectorXd k = anisotropic_principal_curvatures(a, s);
    CHECK(k(0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
    CHECK(k(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("S_F rejects a non positive definite A_F")
{
    CHECK_THROWS_AS(sf_operator(diag({1, -1}), diag({1, 1})), ModelError);
}

TEST_CASE("similarity eigenvalues match the product spectrum")
{
    oracle::Rng rng(11);
    for (int k = 0; k < 20; ++k) {
        const MatrixXd a = oracle::spd(rng, 5);
        const MatrixXd s = oracle::symmetric(rng, 5);
        VectorXd ours = anisotropic_principal_curvatures(a, s);
        VectorXd ref = oracle::product_eigenvalues(a, s);
        std::sort(ours.data(), ours.data() + ours.size());
        std::sort(ref.data(), ref.data() + ref.size());
        CHECK((ours - ref).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("sigma by permutation symbols on simple spectra")
{
    const MatrixXd id = MatrixXd::Identity(3, 3);
    CHECK(sigma_eps(id, 1) == doctest::Approx(3));
    CHECK(sigma_eps(id, 2) == doctest::Approx(3));
    CHECK(sigma_eps(id, 3) == doctest::Approx(1));
    const MatrixXd d = diag({1, 2, 3});
    CHECK(sigma_eps(d, 1) == doctest::Approx(6));
    CHECK(sigma_eps(d, 2) == doctest::Approx(11));
    CHECK(sigma_eps(d, 3) == doctest::Approx(6));
}

TEST_CASE("characteristic polynomial coefficients")
{
    MatrixXd nil(2, 2);
    nil << 0, 1, 0, 0;
    const VectorXd a = sigma_charpoly(nil);
    CHECK(std::abs(a(1)) < 1e-15);
    CHECK(std::abs(a(2)) < 1e-15);
    const VectorXd b = sigma_charpoly(diag({2, 2, 2}));
    CHECK(b(1) == doctest::Approx(6));
    CHECK(b(2) == doctest::Approx(12));
    CHECK(b(3) == doctest::Approx(8));
}

TEST_CASE("property: sigma_eps, charpoly and e_r of the spectrum agree")
{
    oracle::Rng rng(12);
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + k % 4;
        const MatrixXd a = oracle::spd(rng, n);
        const MatrixXd s = oracle::symmetric(rng, n);
        const MatrixXd sf = a * s;
        const VectorXd kappa = oracle::product_eigenvalues(a, s);
        const VectorXd cp = sigma_charpoly(sf);
        for (int r = 0; r <= n; ++r) {
            const double ref = oracle::elementary(kappa, r);
            const double scale = std::max(1.0, oracle::elementary(kappa.cwiseAbs(), r));
            CHECK(std::abs(sigma_eps(sf, r) - ref) <= 1e-10 * scale);
            CHECK(std::abs(cp(r) - ref) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("Newton operators on the identity")
{
    const MatrixXd id = MatrixXd::Identity(3, 3);
    const auto p = newton_ops(id, sigma_charpoly(id));
    REQUIRE(p.size() == 3);
    CHECK((p[0] - id).norm() < 1e-14);
    CHECK((p[1] - 2 * id).norm() < 1e-14);
    CHECK((p[2] - id).norm() < 1e-14);
}

TEST_CASE("property: recurrence and permutation-symbol Newton operators agree")
{
    oracle::Rng rng(13);
    for (int k = 0; k < 50; ++k) {
        const int n = 2 + k % 4;
        const MatrixXd sf = oracle::spd(rng, n) * oracle::symmetric(rng, n);
        const auto rec = newton_recurrence(sf, sigma_charpoly(sf));
        for (int r = 0; r < n; ++r) {
            CHECK((rec[r] - newton_eps(sf, r)).cwiseAbs().maxCoeff() <= 1e-8 * std::pow(1.0 + sf.norm(), r));
        }
    }
}

TEST_CASE("negative: the literal permutation-symbol sum is the transposed operator")
{
    oracle::Rng rng(14);
    const MatrixXd sf = oracle::spd(rng, 3) * oracle::symmetric(rng, 3);
    const auto rec = newton_recurrence(sf, sigma_charpoly(sf));
    const MatrixXd literal = newton_eps_literal(sf, 1);
    CHECK((literal - rec[1]).norm() > 1e-3);
    CHECK((literal.transpose() - rec[1]).norm() < 1e-10);
}

TEST_CASE("trace identities on kappa = (1, 2, 3)")
{
    const CurvaturePoint pt = make_curvature_point(MatrixXd::Identity(3, 3), diag({1, 2, 3}));
    const MatrixXd& p1 = pt.p[1];
    CHECK(p1.trace() == doctest::Approx(2 * 6));
    CHECK((p1 * pt.s_f).trace() == doctest::Approx(22));
    CHECK((p1 * pt.s_f * pt.s_f).trace() == doctest::Approx(48));
    CHECK(trace_checks(pt).max() < 1e-12);

    const CurvaturePoint id = make_curvature_point(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3));
    CHECK(id.p[1].trace() == doctest::Approx(6));
}

TEST_CASE("property: T_r symmetric, normalization pin and H-form consistency")
{
    oracle::Rng rng(15);
    for (int k = 0; k < 200; ++k) {
        const int n = 2 + k % 5;
        const CurvaturePoint pt = make_curvature_point(oracle::spd(rng, n), oracle::symmetric(rng, n));
        for (int j = 0; j < n; ++j) {
            const MatrixXd& t = pt.t[j];
            CHECK((t - t.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, t.cwiseAbs().maxCoeff()));
            const double lhs = (j + 1) * pt.sigma_at(j + 1);
            CHECK(std::abs(lhs - b_coefficient(n, j) * pt.h_at(j + 1)) <= 1e-12 * std::max(1.0, std::abs(lhs)));
            const double sform = pt.sigma_at(1) * pt.sigma_at(j + 1) - (j + 2) * pt.sigma_at(j + 2);
            const double hform = oracle::choose(n, j + 1)
                * (n * pt.h_at(1) * pt.h_at(j + 1) - (n - j - 1) * pt.h_at(j + 2));
            CHECK(std::abs(sform - hform) <= 1e-10 * std::max(1.0, std::abs(sform)));
        }
    }
}

TEST_CASE("property: scale covariance of sigma and H")
{
    oracle::Rng rng(16);
    for (int k = 0; k < 50; ++k) {
        const int n = 2 + k % 4;
        const MatrixXd a = oracle::spd(rng, n);
        const MatrixXd s = oracle::symmetric(rng, n);
        const double lambda = oracle::uniform(rng, 0.3, 3.0);
        const CurvaturePoint p0 = make_curvature_point(a, s);
        const CurvaturePoint p1 = make_curvature_point(a, lambda * s);
        for (int r = 0; r <= n; ++r) {
            const double expect = std::pow(lambda, r) * p0.sigma_at(r);
            CHECK(std::abs(p1.sigma_at(r) - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
            CHECK(std::abs(p1.h_at(r) - std::pow(lambda, r) * p0.h_at(r)) <= 1e-10 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("Maclaurin gaps: umbilic equality and kappa = (1, 2, 3)")
{
    VectorXd k = VectorXd::Constant(4, 1.7);
    VectorXd h = mean_curvatures(oracle::elementary_vector(k));
    const MaclaurinReport u = maclaurin_check(h, 2, k);
    CHECK(u.applicable);
    CHECK(u.umbilic);
    for (double g : u.gaps) CHECK(std::abs(g) < 1e-12);

    VectorXd k3(3);
    k3 << 1, 2, 3;
    const MaclaurinReport m = maclaurin_check(mean_curvatures(oracle::elementary_vector(k3)), 0, k3);
    CHECK(m.gaps[0] == doctest::Approx(1.0 / 3.0));
    CHECK_FALSE(m.umbilic);
}

TEST_CASE("negative: Maclaurin gap fails outside the Garding cone")
{
    VectorXd k(3);
    k << -3, -1, -1;
    CHECK(oracle::elementary(k, 2) > 0);
    const MaclaurinReport m = maclaurin_check(mean_curvatures(oracle::elementary_vector(k)), 1, k);
    CHECK(m.gaps[1] == doctest::Approx(-8.0 / 9.0));
    CHECK_FALSE(m.gaps_ok);
}

TEST_CASE("discriminant on kappa = (1, 2, 3) and the umbilic perfect square")
{
    VectorXd k(3);
    k << 1, 2, 3;
    const DiscriminantReport d = discriminant_p(1, 1.0, 1.0, mean_curvatures(oracle::elementary_vector(k)));
    CHECK(d.delta == doctest::Approx(-44.0 / 9.0));

    const double c = 1.3;
    const VectorXd hu = mean_curvatures(oracle::elementary_vector(VectorXd::Constant(3, c)));
    const DiscriminantReport u = discriminant_p(1, 0.8, 0.7, hu);
    CHECK(std::abs(u.delta) < 1e-12);
    CHECK(std::abs(u(u.vertex())) < 1e-12);
}

TEST_CASE("discriminant rejects a nonpositive leading coefficient")
{
    // H_1 > 0 but H_2 < 0, so F H_1 H_2 < 0.
    VectorXd k(3);
    k << 3, -1, -1;
    CHECK_THROWS_AS(discriminant_p(1, 1.0, 1.0, mean_curvatures(oracle::elementary_vector(k))), ModelError);
}

TEST_CASE("property: P is nonnegative on Garding-cone samples")
{
    oracle::Rng rng(17);
    for (int k = 0; k < 2000; ++k) {
        const int n = 2 + k % 5;
        const int r = k % (n - 1);
        const VectorXd kappa = oracle::garding_kappa(rng, n, r);
        const VectorXd h = mean_curvatures(oracle::elementary_vector(kappa));
        const double f = oracle::uniform(rng, 0.5, 2.0);
        const double beta = oracle::uniform(rng, -2.0, 2.0);
        for (int j = 0; j <= r; ++j) {
            const DiscriminantReport d = discriminant_p(j, f, beta, h);
            const double z = oracle::uniform(rng, -5.0, 5.0);
            const double size = f * (std::abs(h(1) * h(j + 1)) * z * z + 2 * std::abs(h(j + 1) * beta * z) + std::abs(h(j)) * beta * beta);
            CHECK(d(z) >= -1e-10 * std::max(1.0, size));
        }
    }
}
