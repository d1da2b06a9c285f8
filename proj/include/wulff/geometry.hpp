#pragma once

#include "wulff/anisotropy.hpp"
#include "wulff/types.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wulff {

/// Parameter manifold of a chart atlas: the unit sphere S^n (hyperspherical
/// angles on a pole-offset grid) or the flat torus T^2.
enum class ParamDomain { sphere, torus };

/// Central finite-difference weights on offsets 1..order/2 (the stencil is
/// antisymmetric for first and symmetric for second derivatives).
struct Stencil {
    int order = 4;
    std::vector<double> first;   ///< weight of f(+k) (f(-k) gets the negative)
    std::vector<double> second;  ///< weight of f(+k) and f(-k)
    double second_center = 0.0;
    static Stencil central(int order);
    int half_width() const { return order / 2; }
};

/// Structured grid over the parameter domain.
///
/// Sphere domain: n - 1 polar angles with `resolution` offset nodes
/// (k + 1/2) pi / N, then one azimuth with 2N nodes. Torus: two periodic
/// angles with 2N nodes each. All coordinates share the spacing pi / N.
class ChartGrid {
public:
    ChartGrid() = default;
    ChartGrid(ParamDomain domain, int n, int resolution);

    ParamDomain domain() const { return domain_; }
    int dimension() const { return n_; }
    int resolution() const { return resolution_; }
    double spacing() const { return spacing_; }
    const std::vector<int>& sizes() const { return sizes_; }
    bool is_polar(int dim) const { return polar_[static_cast<std::size_t>(dim)]; }
    std::size_t node_count() const { return count_; }

    std::vector<int> multi_index(std::size_t node) const;
    std::size_t linear_index(const std::vector<int>& idx) const;
    /// Node reached from `node` by `offset` steps along coordinate `dim`.
    /// Steps across a pole land on the reflected node of the same point.
    std::size_t neighbor(std::size_t node, int dim, int offset) const;

    std::vector<double> coordinates(std::size_t node) const;
    /// Parameter point: a unit vector on S^n or the angle pair on T^2.
    Vec param_point(std::size_t node) const;
    /// Orthonormal basis of the parameter tangent space along the coordinate
    /// directions (columns), and the coordinate scale factors.
    Mat param_tangent_basis(std::size_t node) const;
    Vec scale_factors(std::size_t node) const;
    /// Quadrature weight of the parameter measure (unit sphere or flat torus).
    double measure_weight(std::size_t node) const;

    /// Parameter point reached by the exponential map from p along the
    /// tangent vector `basis * s`.
    Vec exp_map(const Vec& p, const Mat& basis, const Vec& s) const;

private:
    ParamDomain domain_ = ParamDomain::sphere;
    int n_ = 0;
    int resolution_ = 0;
    double spacing_ = 0.0;
    std::vector<int> sizes_;
    std::vector<bool> polar_;
    std::vector<std::size_t> strides_;
    std::size_t count_ = 0;
    std::vector<double> fejer_;
};

/// Smooth map from the parameter domain into R^{n+1}.
struct ChartMap {
    ParamDomain domain = ParamDomain::sphere;
    int n = 2;
    std::function<Vec(const Vec&)> position;
    /// Optional closed-form inward unit normal.
    std::function<Vec(const Vec&)> normal;
    std::string description;
};

/// Normal speed as a function of the parameter point and the base geometry
/// there (position and inward unit normal).
using SpeedFunction = std::function<double(const Vec& param, const Vec& position, const Vec& normal)>;

struct BuildOptions {
    /// Local stencil step as a fraction of the grid spacing.
    double geometry_step_fraction = 0.125;
    /// Order of the local position stencils.
    int geometry_order = 8;
    /// Order of the chart-coordinate stencils used by field operators.
    int field_order = 16;
    /// Force the normal orientation (+1/-1 relative to the chart orientation)
    /// instead of choosing the one that makes the enclosed volume positive.
    std::optional<int> orientation;
};

namespace detail {
struct StencilCache;
}

/// Quadrature-node discretization of a closed hypersurface.
///
/// Conventions: nu is the inward unit normal and S = g^{-1} b with
/// b_ij = <X_ij, nu>, so the round sphere of radius rho has S = Id / rho and
/// <X, nu> = -rho.
struct SampledImmersion {
    int n = 0;
    ChartGrid grid;
    ChartMap map;
    BuildOptions options;
    int orientation = 1;

    std::vector<Vec> param;
    std::vector<Vec> position;
    std::vector<Vec> normal;
    std::vector<Eigen::MatrixXd> frame;     ///< (n+1) x n orthonormal tangent frame E
    std::vector<Eigen::MatrixXd> shape;     ///< S in frame E, symmetric
    std::vector<Eigen::MatrixXd> chart_jac; ///< dX/du_i = E * chart_jac.col(i)
    std::vector<double> weight;
    /// Field-operator neighbor table, built on first use and shared by copies.
    std::shared_ptr<detail::StencilCache> stencil_cache;

    std::size_t size() const { return position.size(); }
    int resolution() const { return grid.resolution(); }
    /// Inward unit normal of the underlying map at any parameter point.
    Vec normal_at(const Vec& param_point) const;
};

// Builders.
ChartMap sphere_map(int n, double radius, const Vec& center = {});
ChartMap ellipsoid_map(const Vec& semi_axes);
/// Wulff shape of `model` scaled by `scale`: X(x) = -scale * phi(x) with
/// inward normal x, which keeps S_F = Id / scale when F is evaluated at nu.
ChartMap wulff_map(const AnisotropyModel& model, double scale = 1.0);
ChartMap torus_map(double major, double minor);
ChartMap transformed_map(const ChartMap& base, const Mat& rotation, const Vec& translation);
ChartMap normal_graph_map(const SampledImmersion& base, SpeedFunction speed, double t);

/// Builds node geometry: positions, local 8th-order derivatives of the map in
/// exponential coordinates, frame, inward normal, S, weights.
/// Throws InputError for resolution < 16 and BuildError on a degenerate metric.
SampledImmersion build_parametric(const ChartMap& map, int resolution, const BuildOptions& options = {});

/// Chart-coordinate partial derivative of a node field.
double chart_partial(const SampledImmersion& imm, std::span<const double> field, std::size_t node, int dim);

/// Tangent gradient (frame components) of a scalar node field.
std::vector<Vec> surface_gradient(const SampledImmersion& imm, std::span<const double> field);

/// Divergence of a tangent field given in frame components.
std::vector<double> surface_divergence(const SampledImmersion& imm, std::span<const Vec> field);

/// Quadrature of a node field (deterministic pairwise summation).
double integrate(const SampledImmersion& imm, std::span<const double> field);
double total_area(const SampledImmersion& imm);

struct SupportAndTangent {
    std::vector<double> support;   ///< <X, nu>
    std::vector<Vec> tangent;      ///< X^T in frame components
};
SupportAndTangent support_and_tangent(const SampledImmersion& imm);

/// Node values of a speed function on a built immersion.
std::vector<double> sample_speed(const SampledImmersion& imm, const SpeedFunction& speed);

/// Normal-graph variation X_t = X + t f nu of a base immersion.
class VariationFamily {
public:
    VariationFamily(SampledImmersion base, SpeedFunction speed);

    const SampledImmersion& base() const { return base_; }
    const SpeedFunction& speed() const { return speed_; }
    const std::vector<double>& speed_values() const { return speed_values_; }

    /// Geometry of X_t rebuilt through build_parametric at the base resolution
    /// and orientation.
    SampledImmersion evaluate_at(double t) const;

private:
    SampledImmersion base_;
    SpeedFunction speed_;
    std::vector<double> speed_values_;
};

VariationFamily make_variation(const SampledImmersion& base, SpeedFunction speed);

} // namespace wulff
