#include "wulff/geometry.hpp"

#include "wulff/parallel.hpp"
#include "wulff/sphere_chart.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace wulff {

Stencil Stencil::central(int order)
{
    if (order < 2 || order > 16 || order % 2 != 0) throw InputError("stencil order must be even and in [2, 16]");
    Stencil s;
    s.order = order;
    const int m = order / 2;
    auto fact = [](int k) { return std::tgamma(k + 1.0); };
    for (int k = 1; k <= m; ++k) {
        const double c = (k % 2 == 1 ? 1.0 : -1.0) * fact(m) * fact(m) / (fact(m - k) * fact(m + k));
        s.first.push_back(c / k);
        s.second.push_back(2.0 * c / (k * k));
        s.second_center -= 4.0 * c / (k * k);
    }
    return s;
}

// ---------------------------------------------------------------------------
// ChartGrid

ChartGrid::ChartGrid(ParamDomain domain, int n, int resolution)
    : domain_(domain), n_(n), resolution_(resolution), spacing_(std::numbers::pi / resolution)
{
    if (domain == ParamDomain::torus && n != 2) throw InputError("torus charts are two-dimensional");
    if (n < 2 || n > 3) throw InputError("supported hypersurface dimensions are n = 2 and n = 3");
    for (int d = 0; d < n; ++d) {
        const bool polar = domain == ParamDomain::sphere && d + 1 < n;
        polar_.push_back(polar);
        sizes_.push_back(polar ? resolution : 2 * resolution);
    }
    strides_.assign(static_cast<std::size_t>(n), 1);
    for (int d = n - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * static_cast<std::size_t>(sizes_[d + 1]);
    count_ = strides_[0] * static_cast<std::size_t>(sizes_[0]);
    fejer_ = fejer_weights(resolution);
}

std::vector<int> ChartGrid::multi_index(std::size_t node) const
{
    std::vector<int> idx(static_cast<std::size_t>(n_));
    for (int d = 0; d < n_; ++d) {
        idx[d] = static_cast<int>(node / strides_[d]);
        node %= strides_[d];
    }
    return idx;
}

std::size_t ChartGrid::linear_index(const std::vector<int>& idx) const
{
    std::size_t node = 0;
    for (int d = 0; d < n_; ++d) node += strides_[d] * static_cast<std::size_t>(idx[d]);
    return node;
}

std::size_t ChartGrid::neighbor(std::size_t node, int dim, int offset) const
{
    auto idx = multi_index(node);
    idx[dim] += offset;
    const int size = sizes_[dim];
    if (polar_[dim] && (idx[dim] < 0 || idx[dim] >= size)) {
        // (psi, rest) with psi across 0 or pi is the point (-psi or 2pi - psi,
        // antipodal rest): later polar angles map to pi - angle, the azimuth
        // shifts by pi.
        idx[dim] = idx[dim] < 0 ? -1 - idx[dim] : 2 * size - 1 - idx[dim];
        for (int e = dim + 1; e < n_; ++e) {
            if (polar_[e]) {
                idx[e] = sizes_[e] - 1 - idx[e];
            } else {
                idx[e] += sizes_[e] / 2;
            }
        }
    }
    for (int e = 0; e < n_; ++e) {
        if (!polar_[e]) idx[e] = ((idx[e] % sizes_[e]) + sizes_[e]) % sizes_[e];
    }
    return linear_index(idx);
}

std::vector<double> ChartGrid::coordinates(std::size_t node) const
{
    const auto idx = multi_index(node);
    std::vector<double> u(static_cast<std::size_t>(n_));
    for (int d = 0; d < n_; ++d) u[d] = polar_[d] ? (idx[d] + 0.5) * spacing_ : idx[d] * spacing_;
    return u;
}

Vec ChartGrid::param_point(std::size_t node) const
{
    const auto u = coordinates(node);
    if (domain_ == ParamDomain::sphere) return sphere_point(u);
    Vec p(2);
    p << u[0], u[1];
    return p;
}

Mat ChartGrid::param_tangent_basis(std::size_t node) const
{
    if (domain_ == ParamDomain::torus) return Mat::Identity(2, 2);
    Mat t = sphere_tangents(coordinates(node));
    for (Eigen::Index c = 0; c < t.cols(); ++c) t.col(c).normalize();
    return t;
}

Vec ChartGrid::scale_factors(std::size_t node) const
{
    if (domain_ == ParamDomain::torus) return Vec::Ones(2);
    const Mat t = sphere_tangents(coordinates(node));
    Vec s(n_);
    for (int c = 0; c < n_; ++c) s(c) = t.col(c).norm();
    return s;
}

double ChartGrid::measure_weight(std::size_t node) const
{
    const auto idx = multi_index(node);
    double w = 1.0;
    for (int d = 0; d < n_; ++d) {
        if (!polar_[d]) {
            w *= spacing_;
            continue;
        }
        // The sphere measure carries sin^m of polar angle d with m = n - 1 - d.
        // Odd m: Fejer weights absorb one sine factor; even m: the integrand is
        // even and periodic, so the midpoint rule is spectrally accurate.
        const int m = n_ - 1 - d;
        const double psi = (idx[d] + 0.5) * spacing_;
        if (m % 2 == 1) {
            w *= fejer_[idx[d]] * std::pow(std::sin(psi), m - 1);
        } else {
            w *= spacing_ * std::pow(std::sin(psi), m);
        }
    }
    return w;
}

Vec ChartGrid::exp_map(const Vec& p, const Mat& basis, const Vec& s) const
{
    const Vec v = basis * s;
    if (domain_ == ParamDomain::torus) return p + v;
    const double len = v.norm();
    if (len == 0.0) return p;
    return std::cos(len) * p + std::sin(len) / len * v;
}

// ---------------------------------------------------------------------------
// Local jets of a chart map in exponential coordinates.

namespace {

struct Jet {
    Vec value;
    Mat jac;                 // (n+1) x n
    std::vector<Vec> hess;   // n*n ambient vectors, hess[a*n+b]
};

Jet local_jet(const ChartGrid& grid, const ChartMap& map, const Vec& p, const Mat& basis, double h,
    const Stencil& st, bool second)
{
    const int n = map.n;
    const int hw = st.half_width();
    Jet jet;
    jet.value = map.position(p);
    const auto m = jet.value.size();
    jet.jac = Mat::Zero(m, n);
    if (second) jet.hess.assign(static_cast<std::size_t>(n * n), Vec::Zero(m));

    auto along = [&](const Vec& dir, double step) { return map.position(grid.exp_map(p, basis, step * dir)); };

    for (int a = 0; a < n; ++a) {
        Vec e = Vec::Zero(n);
        e(a) = 1.0;
        Vec d1 = Vec::Zero(m);
        Vec d2 = st.second_center * jet.value;
        for (int k = 1; k <= hw; ++k) {
            const Vec plus = along(e, k * h);
            const Vec minus = along(e, -k * h);
            d1 += st.first[k - 1] * (plus - minus);
            d2 += st.second[k - 1] * (plus + minus);
        }
        jet.jac.col(a) = d1 / h;
        if (second) jet.hess[a * n + a] = d2 / (h * h);
    }
    if (!second) return jet;
    // Mixed second derivatives by polarization of second directional derivatives.
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            Vec sum = Vec::Zero(n);
            Vec diff = Vec::Zero(n);
            sum(a) = 1.0;
            sum(b) = 1.0;
            diff(a) = 1.0;
            diff(b) = -1.0;
            Vec dplus = st.second_center * jet.value;
            Vec dminus = st.second_center * jet.value;
            for (int k = 1; k <= hw; ++k) {
                dplus += st.second[k - 1] * (along(sum, k * h) + along(sum, -k * h));
                dminus += st.second[k - 1] * (along(diff, k * h) + along(diff, -k * h));
            }
            const Vec mixed = (dplus - dminus) / (4.0 * h * h);
            jet.hess[a * n + b] = mixed;
            jet.hess[b * n + a] = mixed;
        }
    }
    return jet;
}

// Unit vector orthogonal to the columns of jac with det[jac | nu] * handedness > 0.
Vec raw_normal(const Mat& jac, double handedness)
{
    const auto m = jac.rows();
    Eigen::HouseholderQR<Mat> qr(jac);
    const Mat q = qr.householderQ() * Mat::Identity(m, m);
    Vec nu = q.col(m - 1);
    Mat aug(m, m);
    aug << jac, nu;
    if (aug.determinant() * handedness < 0.0) nu = -nu;
    return nu;
}

// Orthonormal basis of the parameter tangent space at an arbitrary point,
// and its handedness relative to the ambient orientation of the domain.
std::pair<Mat, double> tangent_basis_at(const ChartGrid& grid, const Vec& p)
{
    if (grid.domain() == ParamDomain::torus) return {Mat::Identity(2, 2), 1.0};
    const auto m = p.size();
    const Mat pm = p;
    Eigen::HouseholderQR<Mat> qr(pm);
    const Mat q = qr.householderQ() * Mat::Identity(m, m);
    Mat basis = q.rightCols(m - 1);
    Mat aug(m, m);
    aug << basis, p;
    return {basis, aug.determinant() > 0.0 ? 1.0 : -1.0};
}

double handedness_of(const ChartGrid& grid, const Vec& p, const Mat& basis)
{
    if (grid.domain() == ParamDomain::torus) return 1.0;
    Mat aug(p.size(), p.size());
    aug << basis, p;
    return aug.determinant() > 0.0 ? 1.0 : -1.0;
}

Vec map_normal(const ChartGrid& grid, const ChartMap& map, int orientation, double step, int order, const Vec& p)
{
    if (map.normal) return map.normal(p);
    const auto [basis, hand] = tangent_basis_at(grid, p);
    const Jet jet = local_jet(grid, map, p, basis, step, Stencil::central(order), false);
    return orientation * raw_normal(jet.jac, hand);
}

} // namespace

Vec SampledImmersion::normal_at(const Vec& param_point) const
{
    return map_normal(grid, map, orientation, grid.spacing() * options.geometry_step_fraction,
        options.geometry_order, param_point);
}

// ---------------------------------------------------------------------------
// Builders

ChartMap sphere_map(int n, double radius, const Vec& center)
{
    if (!(radius > 0.0)) throw InputError("sphere radius must be positive");
    const Vec c = center.size() == 0 ? Vec(Vec::Zero(n + 1)) : center;
    if (c.size() != n + 1) throw InputError("sphere center has the wrong dimension");
    ChartMap map;
    map.domain = ParamDomain::sphere;
    map.n = n;
    map.position = [c, radius](const Vec& x) -> Vec { return c + radius * x; };
    map.normal = [](const Vec& x) -> Vec { return -x; };
    std::ostringstream d;
    d << "sphere(" << radius << ")";
    map.description = d.str();
    return map;
}

ChartMap ellipsoid_map(const Vec& semi_axes)
{
    if (semi_axes.size() < 3 || semi_axes.size() > 4 || semi_axes.minCoeff() <= 0.0) {
        throw InputError("ellipsoid needs 3 or 4 positive semi-axes");
    }
    ChartMap map;
    map.domain = ParamDomain::sphere;
    map.n = static_cast<int>(semi_axes.size()) - 1;
    map.position = [semi_axes](const Vec& x) -> Vec { return semi_axes.cwiseProduct(x); };
    map.normal = [semi_axes](const Vec& x) -> Vec { return -x.cwiseQuotient(semi_axes).normalized(); };
    std::ostringstream d;
    d << "ellipsoid(" << semi_axes.transpose() << ")";
    map.description = d.str();
    return map;
}

ChartMap wulff_map(const AnisotropyModel& model, double scale)
{
    if (!(scale > 0.0)) throw InputError("Wulff scale must be positive");
    if (model.ambient_dim() < 3 || model.ambient_dim() > 4) throw InputError("Wulff builder supports n = 2, 3");
    ChartMap map;
    map.domain = ParamDomain::sphere;
    map.n = model.ambient_dim() - 1;
    map.position = [model, scale](const Vec& x) -> Vec { return -scale * model.extension_grad(x); };
    map.normal = [](const Vec& x) -> Vec { return x; };
    std::ostringstream d;
    d << "wulff(" << model.name() << ", " << scale << ")";
    map.description = d.str();
    return map;
}

ChartMap torus_map(double major, double minor)
{
    if (!(minor > 0.0) || !(major > minor)) throw InputError("torus needs major > minor > 0");
    ChartMap map;
    map.domain = ParamDomain::torus;
    map.n = 2;
    map.position = [major, minor](const Vec& u) -> Vec {
        Vec x(3);
        const double ring = major + minor * std::cos(u(0));
        x << ring * std::cos(u(1)), ring * std::sin(u(1)), minor * std::sin(u(0));
        return x;
    };
    map.normal = [](const Vec& u) -> Vec {
        Vec nu(3);
        nu << -std::cos(u(0)) * std::cos(u(1)), -std::cos(u(0)) * std::sin(u(1)), -std::sin(u(0));
        return nu;
    };
    std::ostringstream d;
    d << "torus(" << major << ", " << minor << ")";
    map.description = d.str();
    return map;
}

ChartMap transformed_map(const ChartMap& base, const Mat& rotation, const Vec& translation)
{
    ChartMap map = base;
    auto pos = base.position;
    map.position = [pos, rotation, translation](const Vec& p) -> Vec { return rotation * pos(p) + translation; };
    if (base.normal) {
        auto nrm = base.normal;
        map.normal = [nrm, rotation](const Vec& p) -> Vec { return rotation * nrm(p); };
    }
    map.description = "moved " + base.description;
    return map;
}

ChartMap normal_graph_map(const SampledImmersion& base, SpeedFunction speed, double t)
{
    ChartMap map;
    map.domain = base.map.domain;
    map.n = base.n;
    const ChartGrid grid = base.grid;
    const ChartMap inner = base.map;
    const int orientation = base.orientation;
    const double step = base.grid.spacing() * base.options.geometry_step_fraction;
    const int order = base.options.geometry_order;
    map.position = [=](const Vec& p) -> Vec {
        const Vec x = inner.position(p);
        const Vec nu = map_normal(grid, inner, orientation, step, order, p);
        return x + t * speed(p, x, nu) * nu;
    };
    std::ostringstream d;
    d << "normal_graph(" << inner.description << ", t=" << t << ")";
    map.description = d.str();
    return map;
}

SampledImmersion build_parametric(const ChartMap& map, int resolution, const BuildOptions& options)
{
    if (resolution < 16) throw InputError("resolution must be at least 16");
    if (!map.position) throw InputError("chart map has no position function");
    SampledImmersion imm;
    imm.n = map.n;
    imm.grid = ChartGrid(map.domain, map.n, resolution);
    imm.map = map;
    imm.options = options;
    imm.stencil_cache = std::make_shared<detail::StencilCache>();

    const std::size_t count = imm.grid.node_count();
    const int n = map.n;
    const double h = imm.grid.spacing() * options.geometry_step_fraction;
    const Stencil st = Stencil::central(options.geometry_order);

    imm.param.resize(count);
    imm.position.resize(count);
    imm.normal.resize(count);
    imm.frame.resize(count);
    imm.shape.resize(count);
    imm.chart_jac.resize(count);
    imm.weight.resize(count);

    parallel_for(count, [&](std::size_t i) {
        const Vec p = imm.grid.param_point(i);
        const Mat basis = imm.grid.param_tangent_basis(i);
        const Jet jet = local_jet(imm.grid, map, p, basis, h, st, true);

        // Gram-Schmidt: jac = E R with R upper triangular, positive diagonal.
        const auto m = jet.value.size();
        Mat e(m, n);
        Mat r = Mat::Zero(n, n);
        for (int a = 0; a < n; ++a) {
            Vec v = jet.jac.col(a);
            for (int b = 0; b < a; ++b) {
                r(b, a) = e.col(b).dot(v);
                v -= r(b, a) * e.col(b);
            }
            r(a, a) = v.norm();
            e.col(a) = v / r(a, a);
        }
        const double scale = std::max(1e-300, jet.jac.cwiseAbs().maxCoeff());
        const double det_r = r.diagonal().prod();
        if (!(std::abs(det_r) > 1e-12 * std::pow(scale, n))) {
            std::ostringstream msg;
            msg << "degenerate metric at node " << i << " (chart index";
            for (int k : imm.grid.multi_index(i)) msg << ' ' << k;
            msg << ") of " << map.description;
            throw BuildError(msg.str());
        }
        const Vec nu = raw_normal(jet.jac, handedness_of(imm.grid, p, basis));

        Mat b(n, n);
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n; ++c) b(a, c) = jet.hess[a * n + c].dot(nu);
        }
        const Mat rinv = r.inverse();
        Mat s = rinv.transpose() * b * rinv;
        s = 0.5 * (s + s.transpose());

        imm.param[i] = p;
        imm.position[i] = jet.value;
        imm.normal[i] = nu;
        imm.frame[i] = e;
        imm.shape[i] = s;
        imm.chart_jac[i] = r * imm.grid.scale_factors(i).asDiagonal();
        imm.weight[i] = det_r * imm.grid.measure_weight(i);
    });

    if (options.orientation) {
        imm.orientation = *options.orientation >= 0 ? 1 : -1;
    } else {
        std::vector<double> support(count);
        for (std::size_t i = 0; i < count; ++i) support[i] = imm.weight[i] * imm.position[i].dot(imm.normal[i]);
        // Inward normal <=> enclosed volume -(1/(n+1)) int <X, nu> > 0.
        imm.orientation = pairwise_sum(support) <= 0.0 ? 1 : -1;
    }
    if (imm.orientation < 0) {
        for (std::size_t i = 0; i < count; ++i) {
            imm.normal[i] = -imm.normal[i];
            imm.shape[i] = -imm.shape[i];
        }
    }
    return imm;
}

// ---------------------------------------------------------------------------
// Field operators

namespace detail {

// Stencil neighbors of every node: for node i, dim d, offset slot s
// (s < hw: +(s+1), else -(s-hw+1)).
struct NeighborTable {
    Stencil st;
    int n = 0;
    int hw = 0;
    std::vector<std::size_t> idx;

    explicit NeighborTable(const SampledImmersion& imm)
        : st(Stencil::central(imm.options.field_order)), n(imm.n), hw(st.half_width())
    {
        const std::size_t count = imm.size();
        idx.resize(count * static_cast<std::size_t>(n * 2 * hw));
        parallel_for(count, [&](std::size_t i) {
            for (int d = 0; d < n; ++d) {
                for (int k = 1; k <= hw; ++k) {
                    idx[slot(i, d, k - 1)] = imm.grid.neighbor(i, d, k);
                    idx[slot(i, d, hw + k - 1)] = imm.grid.neighbor(i, d, -k);
                }
            }
        });
    }

    std::size_t slot(std::size_t node, int dim, int s) const
    {
        return (node * static_cast<std::size_t>(n) + static_cast<std::size_t>(dim)) * static_cast<std::size_t>(2 * hw)
            + static_cast<std::size_t>(s);
    }

    double partial(std::span<const double> field, std::size_t node, int dim, double spacing) const
    {
        double d = 0.0;
        for (int k = 0; k < hw; ++k) {
            d += st.first[k] * (field[idx[slot(node, dim, k)]] - field[idx[slot(node, dim, hw + k)]]);
        }
        return d / spacing;
    }
};

struct StencilCache {
    std::once_flag once;
    std::unique_ptr<const NeighborTable> table;
};

} // namespace detail

namespace {

using detail::NeighborTable;

const NeighborTable& neighbor_table(const SampledImmersion& imm, std::unique_ptr<const NeighborTable>& local)
{
    if (!imm.stencil_cache) {
        local = std::make_unique<const NeighborTable>(imm);
        return *local;
    }
    auto& cache = *imm.stencil_cache;
    std::call_once(cache.once, [&] { cache.table = std::make_unique<const NeighborTable>(imm); });
    return *cache.table;
}

} // namespace

double chart_partial(const SampledImmersion& imm, std::span<const double> field, std::size_t node, int dim)
{
    const Stencil st = Stencil::central(imm.options.field_order);
    double d = 0.0;
    for (int k = 1; k <= st.half_width(); ++k) {
        d += st.first[k - 1] * (field[imm.grid.neighbor(node, dim, k)] - field[imm.grid.neighbor(node, dim, -k)]);
    }
    return d / imm.grid.spacing();
}

std::vector<Vec> surface_gradient(const SampledImmersion& imm, std::span<const double> field)
{
    if (field.size() != imm.size()) throw InputError("field size does not match the immersion");
    const int n = imm.n;
    std::unique_ptr<const NeighborTable> local;
    const NeighborTable& table = neighbor_table(imm, local);
    const double h = imm.grid.spacing();
    std::vector<Vec> grad(imm.size());
    parallel_for(imm.size(), [&](std::size_t i) {
        Vec partial(n);
        for (int d = 0; d < n; ++d) partial(d) = table.partial(field, i, d, h);
        const Mat c = imm.chart_jac[i];
        grad[i] = c.transpose().partialPivLu().solve(partial);
    });
    return grad;
}

std::vector<double> surface_divergence(const SampledImmersion& imm, std::span<const Vec> field)
{
    if (field.size() != imm.size()) throw InputError("field size does not match the immersion");
    const int n = imm.n;
    const auto m = static_cast<std::size_t>(n + 1);
    std::unique_ptr<const NeighborTable> local;
    const NeighborTable& table = neighbor_table(imm, local);
    const double h = imm.grid.spacing();
    // Ambient components, one scalar node field per coordinate.
    std::vector<std::vector<double>> ambient(m, std::vector<double>(imm.size()));
    for (std::size_t i = 0; i < imm.size(); ++i) {
        const Vec w = imm.frame[i] * field[i];
        for (std::size_t c = 0; c < m; ++c) ambient[c][i] = w(static_cast<Eigen::Index>(c));
    }
    std::vector<double> div(imm.size());
    parallel_for(imm.size(), [&](std::size_t i) {
        // div W = sum_d <d_d W, eps^d> with the dual basis eps = E C^{-T}.
        const Mat c = imm.chart_jac[i];
        const Mat dual = Mat(imm.frame[i]) * Mat(c.transpose().inverse());
        double total = 0.0;
        for (int d = 0; d < n; ++d) {
            for (std::size_t k = 0; k < m; ++k) {
                total += table.partial(ambient[k], i, d, h) * dual(static_cast<Eigen::Index>(k), d);
            }
        }
        div[i] = total;
    });
    return div;
}

double integrate(const SampledImmersion& imm, std::span<const double> field)
{
    if (field.size() != imm.size()) throw InputError("field size does not match the immersion");
    std::vector<double> terms(imm.size());
    for (std::size_t i = 0; i < imm.size(); ++i) terms[i] = imm.weight[i] * field[i];
    return pairwise_sum(terms);
}

double total_area(const SampledImmersion& imm)
{
    return pairwise_sum(imm.weight);
}

SupportAndTangent support_and_tangent(const SampledImmersion& imm)
{
    SupportAndTangent out;
    out.support.resize(imm.size());
    out.tangent.resize(imm.size());
    for (std::size_t i = 0; i < imm.size(); ++i) {
        out.support[i] = imm.position[i].dot(imm.normal[i]);
        out.tangent[i] = imm.frame[i].transpose() * imm.position[i];
    }
    return out;
}

std::vector<double> sample_speed(const SampledImmersion& imm, const SpeedFunction& speed)
{
    std::vector<double> values(imm.size());
    parallel_for(imm.size(), [&](std::size_t i) {
        const Vec& p = imm.param[i];
        values[i] = speed(p, imm.map.position(p), imm.normal_at(p));
    });
    return values;
}

VariationFamily::VariationFamily(SampledImmersion base, SpeedFunction speed)
    : base_(std::move(base)), speed_(std::move(speed))
{
    if (!speed_) throw InputError("variation needs a speed function");
    speed_values_ = sample_speed(base_, speed_);
}

SampledImmersion VariationFamily::evaluate_at(double t) const
{
    BuildOptions opts = base_.options;
    opts.orientation = base_.orientation;
    return build_parametric(normal_graph_map(base_, speed_, t), base_.resolution(), opts);
}

VariationFamily make_variation(const SampledImmersion& base, SpeedFunction speed)
{
    return VariationFamily(base, std::move(speed));
}

} // namespace wulff
