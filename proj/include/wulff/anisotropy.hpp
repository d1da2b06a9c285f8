#pragma once

#include "wulff/types.hpp"

#include <functional>
#include <memory>
#include <string>

namespace wulff {

/// Positive smooth anisotropy F on the unit sphere S^n, carried by its
/// degree-one homogeneous extension F~(y) = |y| F(y / |y|) to R^{n+1} \ {0}.
///
/// All derivative information comes from the extension: the ambient Hessian
/// of F~ restricted to the tangent space of S^n at x is the operator
/// A_F = D^2 F + F Id, and the ambient gradient at a unit x is the
/// Cahn-Hoffman point F(x) x + grad F(x).
class AnisotropyModel {
public:
    enum class Kind { isotropic, quadric, pnorm, custom };

    struct Impl {
        virtual ~Impl() = default;
        virtual double value(const Vec& y) const = 0;
        virtual Vec gradient(const Vec& y) const = 0;
        virtual Mat hessian(const Vec& y) const = 0;
    };

    /// F == 1 on S^n (ambient dimension n + 1).
    static AnisotropyModel isotropic(int ambient_dim);

    /// F~(y) = sqrt(y^T Q y), Q symmetric positive definite.
    static AnisotropyModel quadric(const Mat& q);

    /// Smoothed even p-norm:
    ///   F~(y) = ((sum_i y_i^p + blend |y|^p) / (1 + blend))^(1/p).
    /// blend = 0 is the plain p-norm, which is only weakly convex at the
    /// coordinate axes; any blend > 0 makes A_F uniformly positive.
    /// F = 1 at every coordinate axis point for all blends.
    static AnisotropyModel pnorm(int ambient_dim, int p, double blend = 1.0);

    /// Custom model from F on the sphere. Derivatives of the extension come
    /// from central differences (fourth order, gradient step 1e-5 |y|,
    /// Hessian step 1e-4 |y|) with the Hessian projected off the radial
    /// direction, which it annihilates exactly in the continuum.
    static AnisotropyModel custom(int ambient_dim, std::function<double(const Vec&)> on_sphere,
        std::string name = "custom");

    /// Custom model F(x) = 1 - depth * exp(-(1 - <x, axis>) / width).
    /// Deep narrow dips violate the convexity assumption.
    static AnisotropyModel gaussian_dip(const Vec& axis, double depth, double width);

    /// Model composed with a rotation: F'(y) = F(R^T y).
    AnisotropyModel rotated(const Mat& rotation) const;

    Kind kind() const { return kind_; }
    int ambient_dim() const { return ambient_dim_; }
    const std::string& name() const { return name_; }
    /// Quadric matrix (quadric models only), or p and blend (pnorm only).
    const Mat& q_matrix() const { return q_; }
    int p() const { return p_; }
    double blend() const { return blend_; }

    double extension(const Vec& y) const { return impl_->value(y); }
    Vec extension_grad(const Vec& y) const { return impl_->gradient(y); }
    Mat extension_hess(const Vec& y) const { return impl_->hessian(y); }

private:
    AnisotropyModel(Kind kind, int ambient_dim, std::string name, std::shared_ptr<const Impl> impl)
        : kind_(kind), ambient_dim_(ambient_dim), name_(std::move(name)), impl_(std::move(impl))
    {
    }

    Kind kind_;
    int ambient_dim_;
    std::string name_;
    std::shared_ptr<const Impl> impl_;
    Mat q_;
    int p_ = 0;
    double blend_ = 0.0;
};

/// F(x) for a unit vector x. Throws InputError if |x| != 1 (1e-12) and
/// ModelError if the value is not strictly positive.
double eval_F(const AnisotropyModel& model, const Vec& x);

/// Matrix of A_F at x in the given orthonormal tangent frame (columns).
/// Symmetrized; throws InputError for a non-orthonormal or non-tangent frame.
Mat a_f_operator(const AnisotropyModel& model, const Vec& x, const Mat& frame);

/// Tangential part of the ambient gradient: grad_{S^n} F at x.
Vec sphere_gradient(const AnisotropyModel& model, const Vec& x);

struct ConvexityReport {
    double min_eigenvalue = 0.0;
    Vec argmin;
    int samples = 0;
    bool accepted() const { return min_eigenvalue > 0.0; }
};

/// Smallest eigenvalue of A_F over a pole-offset angular grid with
/// `resolution` polar nodes (2 * resolution azimuthal), halved until the grid
/// has at most 2^16 points or the resolution reaches 8. Report only.
ConvexityReport convexity_scan(const AnisotropyModel& model, int resolution = 64);

/// Cahn-Hoffman map phi(x) = F(x) x + grad_{S^n} F(x); its image is the
/// boundary of the Wulff body.
Vec cahn_hoffman(const AnisotropyModel& model, const Vec& x);

} // namespace wulff
