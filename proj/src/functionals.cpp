#include "wulff/functionals.hpp"

#include "wulff/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace wulff {

std::vector<double> CurvatureField::sigma(int r) const
{
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = points[i].sigma_at(r);
    return out;
}

std::vector<double> CurvatureField::mean_curvature(int r) const
{
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = points[i].h_at(r);
    return out;
}

CurvatureField compute_curvature_field(const SampledImmersion& imm, const AnisotropyModel& model, bool cross_check)
{
    if (model.ambient_dim() != imm.n + 1) throw InputError("anisotropy dimension does not match the immersion");
    CurvatureField field;
    field.n = imm.n;
    field.points.resize(imm.size());
    field.f_nu.resize(imm.size());
    field.sphere_grad.resize(imm.size());
    parallel_for(imm.size(), [&](std::size_t i) {
        const Vec nu = imm.normal[i].normalized();
        const Mat frame = imm.frame[i];
        const Mat a = a_f_operator(model, nu, frame);
        field.points[i] = make_curvature_point(a, imm.shape[i], cross_check);
        field.f_nu[i] = eval_F(model, nu);
        field.sphere_grad[i] = frame.transpose() * sphere_gradient(model, nu);
    });
    return field;
}

double b_coefficient(int n, int j)
{
    return (j + 1) * binomial(n, j + 1);
}

double area_r(const SampledImmersion& imm, const CurvatureField& field, int r)
{
    if (r < 0 || r > imm.n) throw InputError("r-area index out of range");
    std::vector<double> integrand(imm.size());
    for (std::size_t i = 0; i < imm.size(); ++i) integrand[i] = field.f_nu[i] * field.points[i].sigma_at(r);
    return integrate(imm, integrand);
}

double area_r(const SampledImmersion& imm, const AnisotropyModel& model, int r)
{
    if (r < 0 || r > imm.n) throw InputError("r-area index out of range");
    return area_r(imm, compute_curvature_field(imm, model), r);
}

void validate_rs(int n, int r, int s, const std::vector<double>& a)
{
    if (r < 0 || r > s || s > n - 2) {
        std::ostringstream msg;
        msg << "(r, s) = (" << r << ", " << s << ") must satisfy 0 <= r <= s <= n - 2 with n = " << n;
        throw InputError(msg.str());
    }
    if (a.size() != static_cast<std::size_t>(s - r + 1)) throw InputError("need one coefficient per j in r..s");
    double total = 0.0;
    for (double v : a) {
        if (v < 0.0) throw InputError("coefficients a_j must be nonnegative");
        total += v;
    }
    if (!(total > 0.0)) throw InputError("at least one coefficient a_j must be positive");
}

double area_rs(const SampledImmersion& imm, const CurvatureField& field, int r, int s, const std::vector<double>& a)
{
    validate_rs(imm.n, r, s, a);
    double total = 0.0;
    for (int j = r; j <= s; ++j) total += a[j - r] * area_r(imm, field, j);
    return total;
}

double area_rs(const SampledImmersion& imm, const AnisotropyModel& model, int r, int s, const std::vector<double>& a)
{
    validate_rs(imm.n, r, s, a);
    return area_rs(imm, compute_curvature_field(imm, model), r, s, a);
}

double signed_volume(const SampledImmersion& imm)
{
    return integrate(imm, support_and_tangent(imm).support) / (imm.n + 1);
}

double enclosed_volume(const SampledImmersion& imm)
{
    return -signed_volume(imm);
}

double minkowski_residual(const SampledImmersion& imm, const CurvatureField& field, int r)
{
    if (r < 0 || r > imm.n - 1) throw InputError("Minkowski index out of range");
    std::vector<double> integrand(imm.size());
    for (std::size_t i = 0; i < imm.size(); ++i) {
        const auto& pt = field.points[i];
        integrand[i] = field.f_nu[i] * pt.h_at(r) + pt.h_at(r + 1) * imm.position[i].dot(imm.normal[i]);
    }
    return integrate(imm, integrand);
}

double minkowski_residual(const SampledImmersion& imm, const AnisotropyModel& model, int r)
{
    if (r < 0 || r > imm.n - 1) throw InputError("Minkowski index out of range");
    return minkowski_residual(imm, compute_curvature_field(imm, model), r);
}

FdEstimate fd_derivative(const std::function<double(double)>& g, int order, const FdOptions& options)
{
    if (order != 1 && order != 2) throw InputError("finite-difference order must be 1 or 2");
    if (options.steps.size() < 2) throw InputError("need at least two finite-difference steps");
    const double center = order == 2 ? g(0.0) : 0.0;
    std::vector<double> d;
    for (double h : options.steps) {
        const double p1 = g(h), m1 = g(-h), p2 = g(2 * h), m2 = g(-2 * h);
        if (order == 1) {
            d.push_back((-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h));
        } else {
            d.push_back((-p2 + 16 * p1 - 30 * center + 16 * m1 - m2) / (12 * h * h));
        }
    }
    FdEstimate best;
    best.error_estimate = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        const double est = std::abs(d[k] - d[k + 1]);
        if (est < best.error_estimate) {
            best.error_estimate = est;
            best.value = d[k + 1];
            best.step = options.steps[k + 1];
        }
    }
    if (!(best.error_estimate <= options.rel_tol * std::abs(best.value) + options.abs_tol)) {
        std::ostringstream msg;
        msg << "no finite-difference plateau: best estimate " << best.value << " with error " << best.error_estimate;
        throw ConditioningError(msg.str());
    }
    return best;
}

VariationCheck first_variation_check(const VariationFamily& family, const AnisotropyModel& model, int r,
    const FdOptions& options)
{
    const auto& base = family.base();
    if (r < 0 || r > base.n - 1) throw InputError("first variation index out of range");
    const auto fd = fd_derivative([&](double t) { return area_r(family.evaluate_at(t), model, r); }, 1, options);
    const CurvatureField field = compute_curvature_field(base, model);
    std::vector<double> integrand(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        integrand[i] = family.speed_values()[i] * field.points[i].h_at(r + 1);
    }
    VariationCheck out;
    out.fd_derivative = fd.value;
    out.step = fd.step;
    out.formula_value = -b_coefficient(base.n, r) * integrate(base, integrand);
    out.gap = std::abs(out.fd_derivative - out.formula_value);
    return out;
}

VariationSweep first_variation_sweep(const VariationFamily& family, const AnisotropyModel& model,
    const FdOptions& options)
{
    const auto& base = family.base();
    const int n = base.n;
    std::map<double, std::vector<double>> cache;
    auto values = [&](double t) -> const std::vector<double>& {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        const SampledImmersion xt = family.evaluate_at(t);
        const CurvatureField field = compute_curvature_field(xt, model);
        std::vector<double> v;
        for (int r = 0; r < n; ++r) v.push_back(area_r(xt, field, r));
        v.push_back(signed_volume(xt));
        return cache.emplace(t, std::move(v)).first->second;
    };

    const CurvatureField field = compute_curvature_field(base, model);
    VariationSweep out;
    for (int r = 0; r <= n; ++r) {
        const auto fd = fd_derivative([&](double t) { return values(t)[static_cast<std::size_t>(r)]; }, 1, options);
        VariationCheck c;
        c.fd_derivative = fd.value;
        c.step = fd.step;
        if (r < n) {
            std::vector<double> integrand(base.size());
            for (std::size_t i = 0; i < base.size(); ++i) {
                integrand[i] = family.speed_values()[i] * field.points[i].h_at(r + 1);
            }
            c.formula_value = -b_coefficient(n, r) * integrate(base, integrand);
        } else {
            c.formula_value = integrate(base, family.speed_values());
        }
        c.gap = std::abs(c.fd_derivative - c.formula_value);
        if (r < n) {
            out.area.push_back(c);
        } else {
            out.volume = c;
        }
    }
    return out;
}

VariationCheck volume_variation_check(const VariationFamily& family, const FdOptions& options)
{
    const auto fd = fd_derivative([&](double t) { return signed_volume(family.evaluate_at(t)); }, 1, options);
    VariationCheck out;
    out.fd_derivative = fd.value;
    out.step = fd.step;
    out.formula_value = integrate(family.base(), family.speed_values());
    out.gap = std::abs(out.fd_derivative - out.formula_value);
    return out;
}

} // namespace wulff
