#include "wulff/anisotropy.hpp"

#include "wulff/sphere_chart.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace wulff {

namespace {

struct Isotropic final : AnisotropyModel::Impl {
    double value(const Vec& y) const override { return y.norm(); }
    Vec gradient(const Vec& y) const override { return y / y.norm(); }
    Mat hessian(const Vec& y) const override
    {
        const double r = y.norm();
        const Vec u = y / r;
        return (Mat::Identity(y.size(), y.size()) - u * u.transpose()) / r;
    }
};

struct Quadric final : AnisotropyModel::Impl {
    Mat q;
    explicit Quadric(Mat q_) : q(std::move(q_)) {}

    double value(const Vec& y) const override { return std::sqrt(y.dot(q * y)); }
    Vec gradient(const Vec& y) const override { return q * y / value(y); }
    Mat hessian(const Vec& y) const override
    {
        const double f = value(y);
        const Vec qy = q * y;
        return q / f - qy * qy.transpose() / (f * f * f);
    }
};

// G(y) = (sum y_i^p + blend |y|^p) / (1 + blend), F = G^(1/p).
struct PNorm final : AnisotropyModel::Impl {
    int p;
    double blend;
    PNorm(int p_, double blend_) : p(p_), blend(blend_) {}

    double g(const Vec& y) const
    {
        double s = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) s += std::pow(y(i), p);
        return (s + blend * std::pow(y.squaredNorm(), 0.5 * p)) / (1.0 + blend);
    }
    Vec g_grad(const Vec& y) const
    {
        const double r2 = y.squaredNorm();
        Vec d(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            d(i) = p * std::pow(y(i), p - 1) + blend * p * std::pow(r2, 0.5 * p - 1.0) * y(i);
        }
        return d / (1.0 + blend);
    }
    Mat g_hess(const Vec& y) const
    {
        const auto m = y.size();
        const double r2 = y.squaredNorm();
        Mat h = Mat::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) h(i, i) = p * (p - 1.0) * std::pow(y(i), p - 2);
        h += blend * p * std::pow(r2, 0.5 * p - 1.0) * Mat::Identity(m, m);
        if (p > 2) h += blend * p * (p - 2.0) * std::pow(r2, 0.5 * p - 2.0) * y * y.transpose();
        return h / (1.0 + blend);
    }

    double value(const Vec& y) const override { return std::pow(g(y), 1.0 / p); }
    Vec gradient(const Vec& y) const override
    {
        const double gv = g(y);
        return std::pow(gv, 1.0 / p - 1.0) / p * g_grad(y);
    }
    Mat hessian(const Vec& y) const override
    {
        const double gv = g(y);
        const Vec dg = g_grad(y);
        const double c1 = std::pow(gv, 1.0 / p - 1.0) / p;
        const double c2 = (1.0 / p) * (1.0 / p - 1.0) * std::pow(gv, 1.0 / p - 2.0);
        return c1 * g_hess(y) + c2 * dg * dg.transpose();
    }
};

struct Custom final : AnisotropyModel::Impl {
    std::function<double(const Vec&)> on_sphere;
    explicit Custom(std::function<double(const Vec&)> f) : on_sphere(std::move(f)) {}

    double value(const Vec& y) const override
    {
        const double r = y.norm();
        return r * on_sphere(y / r);
    }
    Vec gradient(const Vec& y) const override
    {
        const double h = 1e-5 * y.norm();
        Vec d(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            Vec e = Vec::Zero(y.size());
            e(i) = h;
            d(i) = (-value(y + 2 * e) + 8 * value(y + e) - 8 * value(y - e) + value(y - 2 * e)) / (12 * h);
        }
        return d;
    }
    Mat hessian(const Vec& y) const override
    {
        const auto m = y.size();
        const double h = 1e-4 * y.norm();
        Mat hess(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            Vec e = Vec::Zero(m);
            e(j) = h;
            // Column j by differentiating the value gradient along e_j.
            const Vec col = (-gradient(y + 2 * e) + 8 * gradient(y + e) - 8 * gradient(y - e)
                                + gradient(y - 2 * e))
                / (12 * h);
            hess.col(j) = col;
        }
        const Vec u = y / y.norm();
        const Mat proj = Mat::Identity(m, m) - u * u.transpose();
        Mat sym = 0.5 * (hess + hess.transpose());
        return proj * sym * proj;
    }
};

struct Rotated final : AnisotropyModel::Impl {
    std::shared_ptr<const AnisotropyModel::Impl> base;
    Mat rot;
    Rotated(std::shared_ptr<const AnisotropyModel::Impl> b, Mat r) : base(std::move(b)), rot(std::move(r)) {}

    double value(const Vec& y) const override { return base->value(rot.transpose() * y); }
    Vec gradient(const Vec& y) const override { return rot * base->gradient(rot.transpose() * y); }
    Mat hessian(const Vec& y) const override
    {
        return rot * base->hessian(rot.transpose() * y) * rot.transpose();
    }
};

void require_unit(const Vec& x)
{
    if (std::abs(x.norm() - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "expected a unit vector, got |x| = " << x.norm();
        throw InputError(msg.str());
    }
}

} // namespace

AnisotropyModel AnisotropyModel::isotropic(int ambient_dim)
{
    if (ambient_dim < 2) throw InputError("ambient dimension must be at least 2");
    return {Kind::isotropic, ambient_dim, "isotropic", std::make_shared<Isotropic>()};
}

AnisotropyModel AnisotropyModel::quadric(const Mat& q)
{
    if (q.rows() != q.cols() || q.rows() < 2) throw InputError("quadric matrix must be square");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * q.cwiseAbs().maxCoeff()) {
        throw InputError("quadric matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(q);
    if (eig.eigenvalues().minCoeff() <= 0.0) throw ModelError("quadric matrix must be positive definite");
    AnisotropyModel m(Kind::quadric, static_cast<int>(q.rows()), "quadric", std::make_shared<Quadric>(q));
    m.q_ = q;
    return m;
}

AnisotropyModel AnisotropyModel::pnorm(int ambient_dim, int p, double blend)
{
    if (p < 2 || p % 2 != 0) throw InputError("p-norm models require an even p >= 2");
    if (blend < 0.0) throw InputError("p-norm blend must be nonnegative");
    if (ambient_dim < 2) throw InputError("ambient dimension must be at least 2");
    AnisotropyModel m(Kind::pnorm, ambient_dim, "pnorm", std::make_shared<PNorm>(p, blend));
    m.p_ = p;
    m.blend_ = blend;
    return m;
}

AnisotropyModel AnisotropyModel::custom(int ambient_dim, std::function<double(const Vec&)> on_sphere,
    std::string name)
{
    if (ambient_dim < 2) throw InputError("ambient dimension must be at least 2");
    return {Kind::custom, ambient_dim, std::move(name), std::make_shared<Custom>(std::move(on_sphere))};
}

AnisotropyModel AnisotropyModel::gaussian_dip(const Vec& axis, double depth, double width)
{
    if (depth >= 1.0 || depth < 0.0 || width <= 0.0) throw InputError("dip needs 0 <= depth < 1, width > 0");
    const Vec a = axis.normalized();
    return custom(
        static_cast<int>(axis.size()),
        [a, depth, width](const Vec& x) { return 1.0 - depth * std::exp(-(1.0 - a.dot(x)) / width); },
        "dip");
}

AnisotropyModel AnisotropyModel::rotated(const Mat& rotation) const
{
    if (rotation.rows() != ambient_dim_ || rotation.cols() != ambient_dim_) {
        throw InputError("rotation has the wrong size");
    }
    if (kind_ == Kind::quadric) return quadric(rotation * q_ * rotation.transpose());
    AnisotropyModel m(kind_ == Kind::isotropic ? Kind::isotropic : Kind::custom, ambient_dim_, name_,
        std::make_shared<Rotated>(impl_, rotation));
    m.p_ = p_;
    m.blend_ = blend_;
    return m;
}

double eval_F(const AnisotropyModel& model, const Vec& x)
{
    require_unit(x);
    const double f = model.extension(x);
    if (!(f > 0.0)) {
        std::ostringstream msg;
        msg << "anisotropy " << model.name() << " is not positive at x = " << x.transpose();
        throw ModelError(msg.str());
    }
    return f;
}

Mat a_f_operator(const AnisotropyModel& model, const Vec& x, const Mat& frame)
{
    require_unit(x);
    if (frame.rows() != x.size() || frame.cols() != x.size() - 1) throw InputError("frame has the wrong shape");
    const auto n = frame.cols();
    const Mat gram = frame.transpose() * frame;
    if ((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12
        || (frame.transpose() * x).cwiseAbs().maxCoeff() > 1e-12) {
        throw InputError("frame must be orthonormal and tangent to the sphere at x");
    }
    const Mat a = frame.transpose() * model.extension_hess(x) * frame;
    return 0.5 * (a + a.transpose());
}

Vec sphere_gradient(const AnisotropyModel& model, const Vec& x)
{
    const Vec g = model.extension_grad(x);
    return g - g.dot(x) * x;
}

ConvexityReport convexity_scan(const AnisotropyModel& model, int resolution)
{
    if (resolution < 8) throw InputError("convexity scan resolution must be at least 8");
    const int n = model.ambient_dim() - 1;
    // Keep the tensor grid near 2^16 points in high dimension.
    while (resolution > 8 && 2.0 * std::pow(resolution, n) > 65536.0) resolution /= 2;
    std::vector<int> sizes(static_cast<std::size_t>(n), resolution);
    sizes.back() = 2 * resolution;

    ConvexityReport report;
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> angles(static_cast<std::size_t>(n));
    const double h = std::numbers::pi / resolution;
    while (true) {
        for (int d = 0; d < n; ++d) {
            angles[d] = d + 1 < n ? (idx[d] + 0.5) * h : idx[d] * h;
        }
        const Vec x = sphere_point(angles);
        Mat frame = sphere_tangents(angles);
        for (Eigen::Index c = 0; c < frame.cols(); ++c) frame.col(c).normalize();
        const Mat a = a_f_operator(model, x, frame);
        const double lo = Eigen::SelfAdjointEigenSolver<Mat>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
        ++report.samples;
        if (lo < report.min_eigenvalue) {
            report.min_eigenvalue = lo;
            report.argmin = x;
        }
        int d = n - 1;
        while (d >= 0 && ++idx[d] == sizes[d]) idx[d--] = 0;
        if (d < 0) break;
    }
    return report;
}

Vec cahn_hoffman(const AnisotropyModel& model, const Vec& x)
{
    require_unit(x);
    return model.extension_grad(x);
}

} // namespace wulff
