#include "wulff/stability.hpp"

#include "wulff/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace wulff {

namespace {

double l2_norm(const SampledImmersion& imm, std::span<const double> f)
{
    std::vector<double> sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
    return std::sqrt(std::max(0.0, integrate(imm, sq)));
}

void check_j(const StabilityProblem& p, int j)
{
    if (j < 0 || j > p.n() - 2) throw InputError("operator index j must satisfy 0 <= j <= n - 2");
}

} // namespace

std::vector<double> StabilityProblem::beta_field() const
{
    std::vector<double> out(immersion.size(), 0.0);
    for (int j = r; j <= s; ++j) {
        const double c = a_at(j) * b(j);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * field.points[i].h_at(j + 1);
    }
    return out;
}

StabilityProblem make_problem(SampledImmersion immersion, const AnisotropyModel& model, int r, int s,
    std::vector<double> a)
{
    validate_rs(immersion.n, r, s, a);
    CurvatureField field = compute_curvature_field(immersion, model);
    return StabilityProblem{std::move(immersion), model, r, s, std::move(a), std::move(field)};
}

std::vector<double> q_field(const StabilityProblem& problem, int j, QReading reading)
{
    check_j(problem, j);
    std::vector<double> q(problem.immersion.size());
    parallel_for(q.size(), [&](std::size_t i) {
        const auto& pt = problem.field.points[i];
        if (reading == QReading::t_s2) {
            q[i] = (pt.t[j] * pt.shape * pt.shape).trace();
        } else {
            q[i] = (pt.p[j] * pt.s_f * pt.s_f).trace();
        }
    });
    return q;
}

std::vector<double> op_Lj(const StabilityProblem& problem, int j, std::span<const double> f)
{
    check_j(problem, j);
    const auto& imm = problem.immersion;
    if (f.size() != imm.size()) throw InputError("field size does not match the immersion");
    std::vector<Vec> grad = surface_gradient(imm, f);
    parallel_for(grad.size(), [&](std::size_t i) { grad[i] = problem.field.points[i].t[j] * grad[i]; });
    return surface_divergence(imm, grad);
}

std::vector<double> op_Ij(const StabilityProblem& problem, int j, std::span<const double> f, QReading reading)
{
    std::vector<double> out = op_Lj(problem, j, f);
    const std::vector<double> q = q_field(problem, j, reading);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += q[i] * f[i];
    return out;
}

std::vector<double> op_R(const StabilityProblem& problem, std::span<const double> f, QReading reading)
{
    std::vector<double> out(f.size(), 0.0);
    for (int j = problem.r; j <= problem.s; ++j) {
        const double c = (j + 1) * problem.a_at(j);
        const std::vector<double> ij = op_Ij(problem, j, f, reading);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * ij[i];
    }
    return out;
}

std::vector<bool> interior_mask(const SampledImmersion& imm)
{
    const ChartGrid& grid = imm.grid;
    std::vector<bool> mask(imm.size(), true);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const std::vector<int> idx = grid.multi_index(i);
        for (int d = 0; d < grid.dimension(); ++d) {
            if (grid.is_polar(d) && (idx[d] == 0 || idx[d] == grid.sizes()[d] - 1)) mask[i] = false;
        }
    }
    return mask;
}

Lemma26Residuals lemma26_residuals(const StabilityProblem& problem, int j)
{
    check_j(problem, j);
    const auto& imm = problem.immersion;
    const auto& field = problem.field;
    const SupportAndTangent st = support_and_tangent(imm);
    const std::vector<double> sigma1 = field.sigma(j + 1);
    const std::vector<Vec> grad_sigma = surface_gradient(imm, sigma1);
    const std::vector<double> i_support = op_Ij(problem, j, st.support);
    const std::vector<double> i_f = op_Ij(problem, j, field.f_nu);
    const std::vector<bool> interior = interior_mask(imm);

    Lemma26Residuals out;
    out.res1.resize(imm.size());
    out.res2.resize(imm.size());
    for (std::size_t i = 0; i < imm.size(); ++i) {
        const auto& pt = field.points[i];
        const double rhs1 = -grad_sigma[i].dot(st.tangent[i]) - (j + 1) * pt.sigma_at(j + 1);
        const double rhs2 = -grad_sigma[i].dot(field.sphere_grad[i]) + pt.sigma_at(1) * pt.sigma_at(j + 1)
            - (j + 2) * pt.sigma_at(j + 2);
        out.res1[i] = i_support[i] - rhs1;
        out.res2[i] = i_f[i] - rhs2;
        out.max1 = std::max(out.max1, std::abs(out.res1[i]));
        out.max2 = std::max(out.max2, std::abs(out.res2[i]));
        if (interior[i]) {
            out.interior_max1 = std::max(out.interior_max1, std::abs(out.res1[i]));
            out.interior_max2 = std::max(out.interior_max2, std::abs(out.res2[i]));
        }
    }
    return out;
}

TestFunction build_test_function(const StabilityProblem& problem, const TestFunctionOptions& options)
{
    const auto& imm = problem.immersion;
    const auto& field = problem.field;
    TestFunction out;

    const std::vector<double> beta_nodes = problem.beta_field();
    out.beta = integrate(imm, beta_nodes) / total_area(imm);
    for (double v : beta_nodes) out.beta_deviation = std::max(out.beta_deviation, std::abs(v - out.beta));
    out.beta_constant = out.beta_deviation <= options.beta_tol * std::max(std::abs(out.beta), 1.0);

    out.min_h_s1 = std::numeric_limits<double>::infinity();
    for (const auto& pt : field.points) out.min_h_s1 = std::min(out.min_h_s1, pt.h_at(problem.s + 1));
    out.h_positive = out.min_h_s1 > 0.0;

    std::vector<double> num(imm.size(), 0.0);
    for (std::size_t i = 0; i < imm.size(); ++i) {
        for (int j = problem.r; j <= problem.s; ++j) {
            num[i] += problem.a_at(j) * problem.b(j) * field.f_nu[i] * field.points[i].h_at(j);
        }
    }
    out.alpha = integrate(imm, num) / integrate(imm, field.f_nu);

    const double alpha = out.alpha;
    const double beta = out.beta;
    const AnisotropyModel model = problem.model;
    out.speed = [=](const Vec&, const Vec& x, const Vec& nu) { return alpha * eval_F(model, nu) + beta * x.dot(nu); };
    out.f = sample_speed(imm, out.speed);

    const SupportAndTangent st = support_and_tangent(imm);
    out.f_norm = l2_norm(imm, out.f);
    out.f_scale = std::abs(alpha) * l2_norm(imm, field.f_nu) + std::abs(beta) * l2_norm(imm, st.support);
    out.mean_zero_residual = std::abs(integrate(imm, out.f));
    out.degenerate = out.f_norm <= options.degenerate_tol * out.f_scale;
    return out;
}

JacobiOperatorValue jacobi_qform_operator(const StabilityProblem& problem, std::span<const double> f,
    QReading reading, double mean_zero_tol)
{
    const auto& imm = problem.immersion;
    if (f.size() != imm.size()) throw InputError("field size does not match the immersion");
    const double norm = l2_norm(imm, f);
    const double mean = std::abs(integrate(imm, f));
    if (mean > mean_zero_tol * (norm * std::sqrt(total_area(imm)) + 1e-300)) {
        std::ostringstream msg;
        msg << "variation speed is not mean-zero: |int f| = " << mean;
        throw InputError(msg.str());
    }

    JacobiOperatorValue out;
    const std::vector<double> rf = op_R(problem, f, reading);
    std::vector<double> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * rf[i];
    out.direct = -integrate(imm, prod);

    const std::vector<Vec> grad = surface_gradient(imm, f);
    for (int j = problem.r; j <= problem.s; ++j) {
        const std::vector<double> q = q_field(problem, j, reading);
        std::vector<double> integrand(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            integrand[i] = grad[i].dot(problem.field.points[i].t[j] * grad[i]) - q[i] * f[i] * f[i];
        }
        out.by_parts += (j + 1) * problem.a_at(j) * integrate(imm, integrand);
    }
    return out;
}

double jacobi_qform_closed_form(const StabilityProblem& problem, const TestFunction& test)
{
    const auto& imm = problem.immersion;
    const int n = problem.n();
    std::vector<double> integrand(imm.size());
    for (std::size_t i = 0; i < imm.size(); ++i) {
        const auto& pt = problem.field.points[i];
        double rf = 0.0;
        for (int j = problem.r; j <= problem.s; ++j) {
            rf += problem.a_at(j) * problem.b(j)
                * (test.alpha * (n * pt.h_at(1) * pt.h_at(j + 1) - (n - j - 1) * pt.h_at(j + 2))
                    - test.beta * (j + 1) * pt.h_at(j + 1));
        }
        integrand[i] = test.f[i] * rf;
    }
    return -integrate(imm, integrand);
}

JacobiFdValue jacobi_qform_fd(const StabilityProblem& problem, const SpeedFunction& speed, double lambda,
    const FdOptions& options)
{
    const VariationFamily family(problem.immersion, speed);
    std::map<double, double> cache;
    auto g = [&](double t) {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        const SampledImmersion xt = t == 0.0 ? problem.immersion : family.evaluate_at(t);
        const CurvatureField field = t == 0.0 ? problem.field : compute_curvature_field(xt, problem.model);
        const double value = area_rs(xt, field, problem.r, problem.s, problem.a) + lambda * signed_volume(xt);
        cache.emplace(t, value);
        return value;
    };
    const FdEstimate second = fd_derivative(g, 2, options);
    FdOptions first_options = options;
    first_options.rel_tol = std::numeric_limits<double>::infinity();
    const FdEstimate first = fd_derivative(g, 1, first_options);

    JacobiFdValue out;
    out.second = second.value;
    out.step = second.step;
    out.error_estimate = second.error_estimate;
    out.first = first.value;
    return out;
}

std::vector<GroupedTerm> grouped_terms(const StabilityProblem& problem, const TestFunction& test)
{
    const auto& imm = problem.immersion;
    const auto& field = problem.field;
    const int n = problem.n();
    const double alpha = test.alpha;
    const double beta = test.beta;
    std::vector<GroupedTerm> out;
    for (int j = problem.r; j <= problem.s; ++j) {
        const double ab = problem.a_at(j) * problem.b(j);
        GroupedTerm term;
        term.j = j;
        term.min_gap = std::numeric_limits<double>::infinity();
        term.max_gap = -std::numeric_limits<double>::infinity();
        term.min_p_alpha = std::numeric_limits<double>::infinity();
        term.max_delta = -std::numeric_limits<double>::infinity();
        term.max_gap_integrand = -std::numeric_limits<double>::infinity();
        term.max_quadratic_integrand = -std::numeric_limits<double>::infinity();
        std::vector<double> g1(imm.size()), g2(imm.size());
        for (std::size_t i = 0; i < imm.size(); ++i) {
            const auto& pt = field.points[i];
            const double fv = field.f_nu[i];
            const double h1 = pt.h_at(1), hj = pt.h_at(j), hj1 = pt.h_at(j + 1), hj2 = pt.h_at(j + 2);
            const double gap = h1 * hj1 - hj2;
            const double p_alpha = fv * (h1 * hj1 * alpha * alpha - 2 * hj1 * alpha * beta + hj * beta * beta);
            g1[i] = -ab * (n - j - 1) * alpha * alpha * fv * gap;
            g2[i] = -ab * (j + 1) * p_alpha;
            term.min_gap = std::min(term.min_gap, gap);
            term.max_gap = std::max(term.max_gap, gap);
            term.min_p_alpha = std::min(term.min_p_alpha, p_alpha);
            term.max_delta = std::max(term.max_delta, 4 * beta * beta * fv * fv * hj1 * (hj1 - h1 * hj));

            // Sign tests relative to the size of the pieces that cancel.
            const double s1 = ab * (n - j - 1) * alpha * alpha * fv * (std::abs(h1 * hj1) + std::abs(hj2));
            const double s2 = ab * (j + 1) * fv
                * (std::abs(h1 * hj1) * alpha * alpha + 2 * std::abs(hj1 * alpha * beta) + std::abs(hj) * beta * beta);
            term.max_gap_integrand = std::max(term.max_gap_integrand, s1 > 0 ? g1[i] / s1 : 0.0);
            term.max_quadratic_integrand = std::max(term.max_quadratic_integrand, s2 > 0 ? g2[i] / s2 : 0.0);
        }
        term.gap_term = integrate(imm, g1);
        term.quadratic_term = integrate(imm, g2);
        out.push_back(term);
    }
    return out;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::wulff_equality: return "wulff-equality";
    case Verdict::stable_consistent: return "stable-consistent";
    case Verdict::hypothesis_violated: return "hypothesis-violated";
    }
    return "unknown";
}

StabilityReport theorem_pipeline(const StabilityProblem& problem, const PipelineOptions& options)
{
    const auto& imm = problem.immersion;
    const auto& field = problem.field;
    const TestFunction test = build_test_function(problem, options.test);

    StabilityReport rep;
    rep.n = problem.n();
    rep.r = problem.r;
    rep.s = problem.s;
    rep.a = problem.a;
    rep.resolution = imm.resolution();
    rep.alpha = test.alpha;
    rep.beta = test.beta;
    rep.beta_deviation = test.beta_deviation;
    rep.min_h_s1 = test.min_h_s1;
    rep.mean_zero_residual = test.mean_zero_residual;
    rep.f_norm = test.f_norm;
    rep.f_scale = test.f_scale;
    rep.degenerate = test.degenerate;
    rep.hypotheses_hold = test.hypotheses_hold();

    for (int j = problem.r; j <= problem.s; ++j) {
        const std::vector<double> q1 = q_field(problem, j, QReading::t_s2);
        const std::vector<double> q2 = q_field(problem, j, QReading::p_sf2);
        double gap = 0.0;
        for (std::size_t i = 0; i < q1.size(); ++i) gap = std::max(gap, std::abs(q1[i] - q2[i]));
        rep.q_reading_gap.push_back(gap);
    }

    rep.grouped = grouped_terms(problem, test);
    for (const auto& t : rep.grouped) {
        rep.j2_grouped += t.gap_term + t.quadratic_term;
        rep.max_equality_gap = std::max({rep.max_equality_gap, std::abs(t.min_gap), std::abs(t.max_gap)});
        if (t.max_gap_integrand > options.sign_tol || t.max_quadratic_integrand > options.sign_tol) rep.signs_ok = false;
    }

    double mean_kappa = 0.0;
    for (const auto& pt : field.points) {
        rep.kappa_spread = std::max(rep.kappa_spread, pt.kappa.maxCoeff() - pt.kappa.minCoeff());
        mean_kappa += pt.kappa.mean();
    }
    mean_kappa /= static_cast<double>(field.size());
    for (const auto& pt : field.points) {
        const Eigen::MatrixXd diff = pt.s_f - mean_kappa * Eigen::MatrixXd::Identity(rep.n, rep.n);
        rep.sf_identity_error = std::max(rep.sf_identity_error, diff.cwiseAbs().maxCoeff());
    }

    rep.mean_zero_ok = test.degenerate
        || test.mean_zero_residual <= options.mean_zero_tol * test.f_norm * std::sqrt(total_area(imm));

    if (!rep.hypotheses_hold) {
        rep.exploratory = true;
        rep.verdict = Verdict::hypothesis_violated;
        return rep;
    }

    const double zero_scale = test.degenerate ? test.f_scale : test.f_norm * test.f_norm;
    const double zero_tol = options.route_abs_tol * zero_scale;
    // The operator routes are evaluated regardless; the mean-zero status is a
    // reported flag here rather than a precondition.
    const double mean_zero_tol = std::numeric_limits<double>::infinity();

    const JacobiOperatorValue op = jacobi_qform_operator(problem, test.f, QReading::t_s2, mean_zero_tol);
    rep.j2_operator = op.direct;
    rep.j2_by_parts = op.by_parts;
    rep.j2_operator_alt_q = jacobi_qform_operator(problem, test.f, QReading::p_sf2, mean_zero_tol).direct;
    rep.j2_closed_form = jacobi_qform_closed_form(problem, test);

    auto agree = [&](double x, double y) {
        return std::abs(x - y) <= std::max(options.route_rel_tol * std::abs(y), zero_tol);
    };
    rep.routes_agree = agree(op.direct, op.by_parts) && agree(*rep.j2_closed_form, op.direct);
    bool all_zero = std::abs(op.direct) <= zero_tol && std::abs(op.by_parts) <= zero_tol
        && std::abs(*rep.j2_closed_form) <= zero_tol;

    if (options.run_fd) {
        FdOptions fd = options.fd;
        fd.abs_tol = std::max(fd.abs_tol, 0.1 * zero_tol);
        const JacobiFdValue v = jacobi_qform_fd(problem, test.speed, test.beta, fd);
        rep.j2_fd = v.second;
        rep.j1_fd = v.first;
        rep.fd_step = v.step;
        rep.routes_agree = rep.routes_agree && agree(op.direct, v.second);
        all_zero = all_zero && std::abs(v.second) <= zero_tol;
    }

    const double j2_max = std::max({op.direct, op.by_parts, *rep.j2_closed_form, rep.j2_fd.value_or(op.direct)});
    if (rep.max_equality_gap <= options.equality_gap_tol && all_zero) {
        rep.verdict = Verdict::wulff_equality;
    } else {
        rep.verdict = Verdict::stable_consistent;
        if (j2_max > zero_tol) rep.signs_ok = false;
    }
    return rep;
}

} // namespace wulff
