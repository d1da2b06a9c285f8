#include "doctest.h"
#include "oracles.hpp"

#include "wulff/stability.hpp"

#include <cmath>

using namespace wulff;

namespace {

Mat quadric3()
{
    Mat q = Mat::Identity(3, 3);
    q(0, 0) = 4.0;
    return q;
}

SpeedFunction random_speed(oracle::Rng& rng, double amplitude)
{
    Eigen::Vector3d c;
    for (int i = 0; i < 3; ++i) c(i) = amplitude * oracle::uniform(rng, -1, 1);
    const double c2 = amplitude * oracle::uniform(rng, -1, 1);
    return [c, c2](const Vec& p, const Vec&, const Vec&) {
        return c(0) * p(0) + c(1) * p(1) + c(2) * p(2) + c2 * (p(0) * p(1) + p(2) * p(2));
    };
}

std::vector<double> mean_zero(const SampledImmersion& imm, std::vector<double> f)
{
    const double mean = integrate(imm, f) / total_area(imm);
    for (double& v : f) v -= mean;
    return f;
}

double dot(const SampledImmersion& imm, const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
    return integrate(imm, p);
}

} // namespace

TEST_CASE("operator oracles on the unit sphere")
{
    const StabilityProblem p = make_problem(build_parametric(sphere_map(2, 1.0), 32), AnisotropyModel::isotropic(3), 0, 0, {1.0});
    const std::vector<double> one(p.immersion.size(), 1.0);
    for (double v : op_Lj(p, 0, one)) CHECK(v == 0.0);
    for (double v : q_field(p, 0)) CHECK(v == doctest::Approx(2.0).epsilon(1e-6));
    for (double v : p.beta_field()) CHECK(v == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Jacobi form: translations on the sphere and the zero field")
{
    const StabilityProblem p = make_problem(build_parametric(sphere_map(2, 1.0), 32), AnisotropyModel::isotropic(3), 0, 0, {1.0});
    const auto& imm = p.immersion;
    std::vector<double> z(imm.size());
    for (std::size_t i = 0; i < imm.size(); ++i) z[i] = imm.position[i](2);
    const JacobiOperatorValue jz = jacobi_qform_operator(p, z);
    CHECK(std::abs(jz.direct) < 1e-5);
    CHECK(std::abs(jz.by_parts) < 1e-5);
    const std::vector<double> zero(imm.size(), 0.0);
    const JacobiOperatorValue j0 = jacobi_qform_operator(p, zero);
    CHECK(j0.direct == 0.0);
    CHECK(j0.by_parts == 0.0);
    const std::vector<double> one(imm.size(), 1.0);
    CHECK_THROWS_AS(jacobi_qform_operator(p, one), InputError);
}

TEST_CASE("property: R is symmetric")
{
    oracle::Rng rng(31);
    const AnisotropyModel model = AnisotropyModel::pnorm(3, 4);
    Vec a(3);
    a << 1.5, 1.0, 0.75;
    const StabilityProblem p = make_problem(build_parametric(ellipsoid_map(a), 32), model, 0, 0, {2.0});
    const auto& imm = p.immersion;
    for (int k = 0; k < 3; ++k) {
        const std::vector<double> f = sample_speed(imm, random_speed(rng, 0.5));
        const std::vector<double> h = sample_speed(imm, random_speed(rng, 0.5));
        const double fh = dot(imm, h, op_R(p, f));
        const double hf = dot(imm, f, op_R(p, h));
        CHECK(std::abs(fh - hf) <= 1e-6 * std::sqrt(dot(imm, f, f) * dot(imm, h, h)));
    }
}

TEST_CASE("operator identities on the Wulff shape")
{
    const AnisotropyModel model = AnisotropyModel::quadric(quadric3());
    const StabilityProblem p = make_problem(build_parametric(wulff_map(model), 64), model, 0, 0, {1.0});
    const Lemma26Residuals r = lemma26_residuals(p, 0);
    CHECK(r.interior_max1 < 1e-4);
    CHECK(r.interior_max2 < 1e-4);
}

TEST_CASE("Jacobi routes agree on the Wulff shape for a mean-zero field")
{
    oracle::Rng rng(32);
    const AnisotropyModel model = AnisotropyModel::quadric(quadric3());
    const StabilityProblem p = make_problem(build_parametric(wulff_map(model), 32), model, 0, 0, {1.0});
    const auto& imm = p.immersion;
    const SpeedFunction raw = random_speed(rng, 0.3);
    const double mean = integrate(imm, sample_speed(imm, raw)) / total_area(imm);
    const SpeedFunction speed = [raw, mean](const Vec& q, const Vec& x, const Vec& nu) { return raw(q, x, nu) - mean; };
    const std::vector<double> f = sample_speed(imm, speed);
    const JacobiOperatorValue op = jacobi_qform_operator(p, f);
    const double lambda = integrate(imm, p.beta_field()) / total_area(imm);
    const JacobiFdValue fd = jacobi_qform_fd(p, speed, lambda);
    const double tol = std::max(1e-3 * std::abs(fd.second), 1e-4 * dot(imm, f, f));
    CHECK(std::abs(op.direct - fd.second) <= tol);
    CHECK(std::abs(op.direct - op.by_parts) <= tol);
    CHECK(std::abs(fd.first) <= 1e-6 * std::sqrt(dot(imm, f, f)));
}

TEST_CASE("pipeline verdicts")
{
    const AnisotropyModel model = AnisotropyModel::quadric(quadric3());
    SUBCASE("Wulff shape with its own model")
    {
        const StabilityReport rep = theorem_pipeline(make_problem(build_parametric(wulff_map(model), 32), model, 0, 0, {1.0}));
        CHECK(rep.verdict == Verdict::wulff_equality);
        CHECK(rep.degenerate);
        CHECK(rep.routes_agree);
        CHECK(rep.sf_identity_error < 1e-5);
    }
    SUBCASE("unit sphere, isotropic")
    {
        const StabilityReport rep = theorem_pipeline(
            make_problem(build_parametric(sphere_map(2, 1.0), 32), AnisotropyModel::isotropic(3), 0, 0, {1.0}));
        CHECK(rep.verdict == Verdict::wulff_equality);
        CHECK(rep.degenerate);
    }
    SUBCASE("ellipsoid with a mismatched model")
    {
        Vec a(3);
        a << 1.5, 1.0, 0.75;
        const StabilityReport rep = theorem_pipeline(make_problem(build_parametric(ellipsoid_map(a), 32), model, 0, 0, {1.0}));
        CHECK(rep.verdict == Verdict::hypothesis_violated);
        CHECK(rep.exploratory);
        CHECK_FALSE(rep.j2_fd.has_value());
    }
}

TEST_CASE("translated Wulff shape: non-degenerate test function with zero second variation")
{
    const AnisotropyModel model = AnisotropyModel::quadric(quadric3());
    Vec c(3);
    c << 0.3, -0.2, 0.25;
    const ChartMap moved = transformed_map(wulff_map(model), Mat::Identity(3, 3), c);
    const StabilityProblem p = make_problem(build_parametric(moved, 32), model, 0, 0, {1.0});
    const TestFunction tf = build_test_function(p);
    CHECK_FALSE(tf.degenerate);
    // f = beta <c, nu> once the Wulff part cancels.
    for (std::size_t i = 0; i < p.immersion.size(); i += 37) {
        CHECK(tf.f[i] == doctest::Approx(tf.beta * c.dot(p.immersion.normal[i])).epsilon(1e-5).scale(tf.f_scale));
    }
    const StabilityReport rep = theorem_pipeline(p);
    CHECK(rep.verdict == Verdict::wulff_equality);
    CHECK(std::abs(*rep.j2_operator) <= 1e-4 * rep.f_norm * rep.f_norm);
    CHECK(std::abs(*rep.j2_fd) <= 1e-4 * rep.f_norm * rep.f_norm);
}

TEST_CASE("property: rigidity, perturbed Wulff shapes are never reported as equality")
{
    oracle::Rng rng(33);
    const AnisotropyModel model = AnisotropyModel::pnorm(3, 4);
    const SampledImmersion base = build_parametric(wulff_map(model), 32);
    for (int k = 0; k < 3; ++k) {
        const SpeedFunction bump = random_speed(rng, 1.0);
        const SpeedFunction speed = [bump](const Vec& q, const Vec& x, const Vec& nu) { return bump(q, x, nu) * q(0) * q(1); };
        const ChartMap moved = normal_graph_map(base, speed, 0.05);
        const StabilityReport rep = theorem_pipeline(make_problem(build_parametric(moved, 32), model, 0, 0, {1.0}));
        CHECK(rep.verdict != Verdict::wulff_equality);
    }
}

TEST_CASE("property: homothety leaves the verdict and S_F identity unchanged")
{
    const AnisotropyModel model = AnisotropyModel::quadric(quadric3());
    for (double lambda : {0.5, 2.0}) {
        const StabilityReport rep =
            theorem_pipeline(make_problem(build_parametric(wulff_map(model, lambda), 32), model, 0, 0, {1.0}));
        CHECK(rep.verdict == Verdict::wulff_equality);
        CHECK(rep.beta == doctest::Approx(theorem_pipeline(make_problem(build_parametric(wulff_map(model), 32), model, 0, 0,
                                              {1.0})).beta / lambda).epsilon(1e-6));
    }
}

TEST_CASE("grouped terms are nonpositive on a convex surface with constant beta")
{
    const AnisotropyModel model = AnisotropyModel::pnorm(3, 4);
    const StabilityProblem p = make_problem(build_parametric(wulff_map(model), 32), model, 0, 0, {1.0});
    const TestFunction tf = build_test_function(p);
    for (const auto& t : grouped_terms(p, tf)) {
        CHECK(t.gap_term <= 1e-10);
        CHECK(t.quadratic_term <= 1e-10);
        CHECK(t.min_gap >= -1e-8);
    }
}
