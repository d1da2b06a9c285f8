#include "doctest.h"
#include "oracles.hpp"

#include "wulff/anisotropy.hpp"

#include <cmath>

using namespace wulff;

namespace {

Vec e(int dim, int k)
{
    Vec v = Vec::Zero(dim);
    v(k) = 1.0;
    return v;
}

Mat quadric3()
{
    Mat q = Mat::Identity(3, 3);
    q(0, 0) = 4.0;
    return q;
}

Vec random_unit(oracle::Rng& rng, int dim)
{
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = oracle::uniform(rng, -1, 1);
    return v.normalized();
}

Mat tangent_frame(const Vec& x)
{
    const int dim = static_cast<int>(x.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    m.col(0) = x;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd q = qr.householderQ();
    return q.rightCols(dim - 1);
}

} // namespace

TEST_CASE("model values at axis points")
{
    oracle::Rng rng(1);
    const AnisotropyModel iso = AnisotropyModel::isotropic(3);
    CHECK(eval_F(iso, random_unit(rng, 3)) == doctest::Approx(1.0));
    CHECK(eval_F(AnisotropyModel::quadric(quadric3()), e(3, 0)) == doctest::Approx(2.0));
    CHECK(eval_F(AnisotropyModel::pnorm(3, 4), e(3, 0)) == doctest::Approx(1.0));
}

TEST_CASE("A_F for the isotropic and quadric models")
{
    oracle::Rng rng(2);
    const Vec x = random_unit(rng, 3);
    const Mat frame = tangent_frame(x);
    const Mat a = a_f_operator(AnisotropyModel::isotropic(3), x, frame);
    CHECK((a - Mat::Identity(2, 2)).norm() < 1e-12);

    Mat fr(3, 2);
    fr << 0, 0, 1, 0, 0, 1;
    const Mat aq = a_f_operator(AnisotropyModel::quadric(quadric3()), e(3, 0), fr);
    CHECK(aq(0, 0) == doctest::Approx(0.5));
    CHECK(aq(1, 1) == doctest::Approx(0.5));
    CHECK(std::abs(aq(0, 1)) < 1e-14);
}

TEST_CASE("property: quadric A_F matches the closed-form Hessian")
{
    oracle::Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const int dim = 3 + k % 3;
        const Eigen::MatrixXd q = oracle::spd(rng, dim);
        const AnisotropyModel model = AnisotropyModel::quadric(q);
        const Vec x = random_unit(rng, dim);
        const Mat frame = tangent_frame(x);
        const Eigen::MatrixXd ref = oracle::quadric_a_f(q, x, frame);
        CHECK((Eigen::MatrixXd(a_f_operator(model, x, frame)) - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("property: custom model derivatives match the quadric closed form")
{
    oracle::Rng rng(4);
    const Mat q = quadric3();
    const AnisotropyModel exact = AnisotropyModel::quadric(q);
    const AnisotropyModel fd = AnisotropyModel::custom(3, [q](const Vec& x) { return std::sqrt(x.dot(q * x)); });
    for (int k = 0; k < 20; ++k) {
        const Vec x = random_unit(rng, 3);
        const Mat frame = tangent_frame(x);
        CHECK((a_f_operator(exact, x, frame) - a_f_operator(fd, x, frame)).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((sphere_gradient(exact, x) - sphere_gradient(fd, x)).norm() < 1e-8);
    }
}

TEST_CASE("convexity scan")
{
    CHECK(convexity_scan(AnisotropyModel::isotropic(3), 16).min_eigenvalue == doctest::Approx(1.0));
    CHECK(convexity_scan(AnisotropyModel::quadric(quadric3()), 16).min_eigenvalue > 0.0);
    const ConvexityReport bad = convexity_scan(AnisotropyModel::gaussian_dip(e(3, 2), 0.9, 0.05), 32);
    CHECK(bad.min_eigenvalue < 0.0);
    CHECK_FALSE(bad.accepted());
}

TEST_CASE("Cahn-Hoffman map")
{
    oracle::Rng rng(5);
    const Vec x = random_unit(rng, 3);
    CHECK((cahn_hoffman(AnisotropyModel::isotropic(3), x) - x).norm() < 1e-14);
    const Vec y = cahn_hoffman(AnisotropyModel::quadric(quadric3()), e(3, 0));
    CHECK(y(0) == doctest::Approx(2.0));
    CHECK(std::abs(y(1)) + std::abs(y(2)) < 1e-14);
}

TEST_CASE("property: Cahn-Hoffman image of a quadric lies on the dual ellipsoid")
{
    oracle::Rng rng(6);
    const Eigen::MatrixXd q = oracle::spd(rng, 4);
    const AnisotropyModel model = AnisotropyModel::quadric(q);
    const Eigen::MatrixXd qi = q.inverse();
    for (int k = 0; k < 50; ++k) {
        const Eigen::VectorXd z = cahn_hoffman(model, random_unit(rng, 4));
        CHECK(z.dot(qi * z) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("property: rotated model is F composed with the inverse rotation")
{
    oracle::Rng rng(7);
    const AnisotropyModel base = AnisotropyModel::pnorm(3, 4);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::symmetric(rng, 3));
    const Mat rot = Eigen::MatrixXd(qr.householderQ());
    const AnisotropyModel rotated = base.rotated(rot);
    for (int k = 0; k < 20; ++k) {
        const Vec x = random_unit(rng, 3);
        CHECK(eval_F(rotated, x) == doctest::Approx(eval_F(base, rot.transpose() * x)).epsilon(1e-12));
    }
}

TEST_CASE("input errors")
{
    Vec x(3);
    x << 1, 1, 0;
    CHECK_THROWS_AS(eval_F(AnisotropyModel::isotropic(3), x), InputError);
    Mat q = quadric3();
    q(1, 1) = -1.0;
    CHECK_THROWS(AnisotropyModel::quadric(q));
}
