#include "wulff/suites.hpp"

#include "wulff/curvalg.hpp"
#include "wulff/sampling.hpp"
#include "wulff/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wulff {

using nlohmann::ordered_json;

namespace {

struct Setup {
    AnisotropyModel model;
    ChartMap surface;
};

Setup setup(const RunConfig& cfg)
{
    const AnisotropyModel model = make_model(cfg.anisotropy, cfg.n);
    return Setup{model, make_surface(cfg.surface, model, cfg.n)};
}

std::pair<int, int> resolution_pair(int n)
{
    return n / 2 >= 16 ? std::make_pair(n / 2, n) : std::make_pair(n, 2 * n);
}

double scaled_gap(double a, double b, double scale)
{
    return std::abs(a - b) / std::max(scale, 1e-300);
}

SuiteResult convexity_suite(const RunConfig& cfg)
{
    const AnisotropyModel model = make_model(cfg.anisotropy, cfg.n);
    const ConvexityReport rep = convexity_scan(model);
    SuiteResult out{"convexity", rep.accepted(), {}};
    out.details["min_eigenvalue"] = rep.min_eigenvalue;
    out.details["argmin"] = std::vector<double>(rep.argmin.data(), rep.argmin.data() + rep.argmin.size());
    out.details["samples"] = rep.samples;
    return out;
}

SuiteResult calibration_suite(const RunConfig& cfg)
{
    const double rho = cfg.surface.kind == "sphere" ? cfg.surface.radius : 1.0;
    const int n = cfg.n;
    const AnisotropyModel iso = AnisotropyModel::isotropic(n + 1);
    const SampledImmersion imm = build_parametric(sphere_map(n, rho), cfg.resolution);
    const CurvatureField field = compute_curvature_field(imm, iso);

    double h_err = 0.0;
    for (const auto& pt : field.points) {
        for (int r = 0; r <= n; ++r) h_err = std::max(h_err, std::abs(pt.h_at(r) - std::pow(rho, -r)));
    }
    double mink = 0.0;
    for (int r = 0; r < n; ++r) mink = std::max(mink, std::abs(minkowski_residual(imm, field, r)));

    const SpeedFunction speeds[] = {
        [](const Vec&, const Vec&, const Vec&) { return -1.0; },
        [](const Vec& p, const Vec&, const Vec&) { return 0.2 * p(p.size() - 1) + 0.1; },
    };
    double fv_gap = 0.0, vol_gap = 0.0;
    for (const auto& speed : speeds) {
        const VariationSweep sweep = first_variation_sweep(VariationFamily(imm, speed), iso);
        for (const auto& c : sweep.area) fv_gap = std::max(fv_gap, c.gap);
        vol_gap = std::max(vol_gap, sweep.volume.gap);
    }

    const double tol_h = cfg.tolerance("calibration_h", 1e-6);
    const double tol_m = cfg.tolerance("calibration_minkowski", 1e-8);
    const double tol_fv = cfg.tolerance("calibration_first_variation", 1e-5);
    const double tol_v = cfg.tolerance("calibration_volume", 1e-6);
    SuiteResult out{"calibration", h_err <= tol_h && mink <= tol_m && fv_gap <= tol_fv && vol_gap <= tol_v, {}};
    out.details["radius"] = rho;
    out.details["resolution"] = cfg.resolution;
    out.details["max_mean_curvature_error"] = h_err;
    out.details["max_minkowski_residual"] = mink;
    out.details["max_first_variation_gap"] = fv_gap;
    out.details["max_volume_variation_gap"] = vol_gap;
    return out;
}

SuiteResult traces_suite(const RunConfig& cfg)
{
    Rng rng(cfg.seed);
    const int n = cfg.n;
    double sigma_gap = 0.0, newton_gap = 0.0, trace_gap = 0.0, trace_uncorrected_min = 0.0, sym_gap = 0.0,
           pin_gap = 0.0;
    trace_uncorrected_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.samples; ++k) {
        const Eigen::MatrixXd a = random_spd(rng, n);
        const Eigen::MatrixXd s = random_symmetric(rng, n);
        const CurvaturePoint pt = make_curvature_point(a, s);
        const Eigen::VectorXd abs_e = elementary_symmetric(pt.kappa.cwiseAbs());
        const double kmax = pt.kappa.cwiseAbs().maxCoeff();
        const Eigen::VectorXd charpoly = sigma_charpoly(pt.s_f);
        for (int r = 0; r <= n; ++r) {
            const double scale = std::max(1.0, abs_e(r));
            sigma_gap = std::max(sigma_gap, scaled_gap(sigma_eps(pt.s_f, r), charpoly(r), scale));
        }
        const auto rec = newton_recurrence(pt.s_f, pt.sigma);
        for (int r = 0; r < n; ++r) {
            const double scale = std::pow(1.0 + kmax, r) * std::max(1.0, a.norm());
            newton_gap = std::max(newton_gap, (rec[r] - newton_eps(pt.s_f, r)).cwiseAbs().maxCoeff() / scale);
            sym_gap = std::max(sym_gap, (pt.t[r] - pt.t[r].transpose()).cwiseAbs().maxCoeff() / scale);
            const double pin = (r + 1) * pt.sigma_at(r + 1) - b_coefficient(n, r) * pt.h_at(r + 1);
            pin_gap = std::max(pin_gap, std::abs(pin) / std::max(1.0, (r + 1) * std::abs(pt.sigma_at(r + 1))));
        }
        const TraceResiduals tr = trace_checks(pt);
        const double scale = std::pow(1.0 + kmax, n + 1);
        trace_gap = std::max(trace_gap, tr.max() / scale);
        double unc = 0.0;
        for (double v : tr.trace_ps2_uncorrected) unc = std::max(unc, v / scale);
        trace_uncorrected_min = std::min(trace_uncorrected_min, unc);
    }
    const bool ok = sigma_gap <= cfg.tolerance("traces_sigma", 1e-10) && newton_gap <= cfg.tolerance("traces_newton", 1e-8)
        && trace_gap <= cfg.tolerance("traces_identity", 1e-8) && sym_gap <= cfg.tolerance("traces_symmetry", 1e-10)
        && pin_gap <= cfg.tolerance("traces_normalization", 1e-12);
    SuiteResult out{"traces", ok, {}};
    out.details["n"] = n;
    out.details["samples"] = cfg.samples;
    out.details["sigma_eps_vs_charpoly"] = sigma_gap;
    out.details["newton_recurrence_vs_eps"] = newton_gap;
    out.details["trace_identities"] = trace_gap;
    out.details["trace_ps2_without_factor_min_residual"] = trace_uncorrected_min;
    out.details["t_symmetry"] = sym_gap;
    out.details["normalization_pin"] = pin_gap;
    return out;
}

struct ConeStats {
    long samples = 0;
    long umbilic = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    long inequality_violations = 0;
    long non_umbilic_equalities = 0;
    double max_delta = -std::numeric_limits<double>::infinity();
    double min_p = std::numeric_limits<double>::infinity();
    long discriminant_violations = 0;
};

ConeStats cone_sampling(const RunConfig& cfg, bool discriminant)
{
    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = cfg.n;
    if (n < 2) throw InputError("cone sampling needs n >= 2");
    ConeStats st;
    for (int k = 0; k < cfg.samples; ++k) {
        const int r = static_cast<int>(u(rng) * (n - 1)) % (n - 1);
        const Eigen::VectorXd kappa = random_cone_kappa(rng, n, r);
        const Eigen::VectorXd h = mean_curvatures(elementary_symmetric(kappa));
        const MaclaurinReport rep = maclaurin_check(h, r, kappa);
        const double spread = kappa.maxCoeff() - kappa.minCoeff();
        ++st.samples;
        if (spread <= 1e-6) ++st.umbilic;
        st.min_gap = std::min(st.min_gap, rep.min_gap);
        if (!rep.gaps_ok || !rep.positivity_ok) ++st.inequality_violations;
        for (double g : rep.gaps) {
            if (std::abs(g) <= 1e-10 && spread > 1e-6) ++st.non_umbilic_equalities;
        }
        if (!discriminant) continue;
        const double f_value = 0.5 + 1.5 * u(rng);
        const double beta = 6.0 * u(rng) - 3.0;
        for (int j = 0; j <= r; ++j) {
            DiscriminantReport d;
            try {
                d = discriminant_p(j, f_value, beta, h);
            } catch (const std::exception&) {
                ++st.discriminant_violations;
                continue;
            }
            st.max_delta = std::max(st.max_delta, d.delta / std::max(d.scale, 1e-300));
            const double vertex = d.vertex();
            const double width = 2.0 * (std::abs(vertex) + 1.0);
            for (int i = 0; i <= 200; ++i) {
                const double z = vertex + width * (i / 100.0 - 1.0);
                const double size = f_value
                    * (std::abs(h(1) * h(j + 1)) * z * z + 2 * std::abs(h(j + 1) * beta * z) + std::abs(h(j)) * beta * beta);
                const double p = d(z) / std::max(1.0, size);
                st.min_p = std::min(st.min_p, p);
                if (p < -1e-10) ++st.discriminant_violations;
            }
        }
    }
    return st;
}

SuiteResult maclaurin_suite(const RunConfig& cfg)
{
    const ConeStats st = cone_sampling(cfg, false);
    SuiteResult out{"maclaurin", st.inequality_violations == 0 && st.non_umbilic_equalities == 0, {}};
    out.details["n"] = cfg.n;
    out.details["samples"] = st.samples;
    out.details["umbilic_samples"] = st.umbilic;
    out.details["min_gap"] = st.min_gap;
    out.details["inequality_violations"] = st.inequality_violations;
    out.details["non_umbilic_equalities"] = st.non_umbilic_equalities;
    return out;
}

SuiteResult discriminant_suite(const RunConfig& cfg)
{
    const ConeStats st = cone_sampling(cfg, true);
    SuiteResult out{"discriminant", st.discriminant_violations == 0, {}};
    out.details["n"] = cfg.n;
    out.details["samples"] = st.samples;
    out.details["max_relative_discriminant"] = st.max_delta;
    out.details["min_normalized_p_on_grid"] = st.min_p;
    out.details["violations"] = st.discriminant_violations;
    return out;
}

SuiteResult minkowski_suite(const RunConfig& cfg)
{
    const Setup su = setup(cfg);
    const auto [nc, nf] = resolution_pair(cfg.resolution);
    const double tol = cfg.tolerance("minkowski", 1e-6);
    const double floor = cfg.tolerance("minkowski_floor", 1e-10);
    const SampledImmersion coarse = build_parametric(su.surface, nc);
    const SampledImmersion fine = build_parametric(su.surface, nf);
    const CurvatureField fc = compute_curvature_field(coarse, su.model);
    const CurvatureField ff = compute_curvature_field(fine, su.model);
    SuiteResult out{"minkowski", true, {}};
    out.details["resolutions"] = {nc, nf};
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < cfg.n; ++r) {
        const double c = std::abs(minkowski_residual(coarse, fc, r));
        const double f = std::abs(minkowski_residual(fine, ff, r));
        const bool ok = f <= tol && refines(c, f, floor);
        out.passed = out.passed && ok;
        rows.push_back({{"r", r}, {"coarse", c}, {"fine", f}, {"order", order_estimate(c, f, floor)}, {"passed", ok}});
    }
    out.details["residuals"] = rows;
    return out;
}

SuiteResult first_variation_suite(const RunConfig& cfg)
{
    const Setup su = setup(cfg);
    const SampledImmersion base = build_parametric(su.surface, cfg.resolution);
    Rng rng(cfg.seed);
    SuiteResult out{"first_variation", true, {}};
    ordered_json rows = ordered_json::array();
    const double rel = cfg.tolerance("first_variation_rel", 1e-4);
    const double abs_tol = cfg.tolerance("first_variation_abs", 1e-6);
    const double vol_tol = cfg.tolerance("volume_variation", 1e-6);
    for (int k = 0; k < 3; ++k) {
        const SpeedFunction speed = random_low_harmonic(rng, base);
        const VariationSweep sweep = first_variation_sweep(VariationFamily(base, speed), su.model);
        for (int r = 0; r < cfg.n; ++r) {
            const auto& c = sweep.area[static_cast<std::size_t>(r)];
            const bool ok = c.gap <= std::max(rel * std::abs(c.formula_value), abs_tol);
            out.passed = out.passed && ok;
            rows.push_back({{"speed", k}, {"functional", "area_r"}, {"r", r}, {"fd", c.fd_derivative},
                {"formula", c.formula_value}, {"gap", c.gap}, {"step", c.step}, {"passed", ok}});
        }
        const auto& v = sweep.volume;
        const bool ok = v.gap <= vol_tol * std::max(1.0, std::abs(v.formula_value));
        out.passed = out.passed && ok;
        rows.push_back({{"speed", k}, {"functional", "volume"}, {"fd", v.fd_derivative}, {"formula", v.formula_value},
            {"gap", v.gap}, {"step", v.step}, {"passed", ok}});
    }
    out.details["resolution"] = cfg.resolution;
    out.details["checks"] = rows;
    return out;
}

SuiteResult lemma26_suite(const RunConfig& cfg)
{
    const Setup su = setup(cfg);
    const auto [nc, nf] = resolution_pair(cfg.resolution);
    const double tol = cfg.tolerance("lemma26", 1e-4);
    const double floor = cfg.tolerance("lemma26_floor", 1e-7);
    std::vector<double> a(static_cast<std::size_t>(cfg.n - 1), 1.0);
    const StabilityProblem pc = make_problem(build_parametric(su.surface, nc), su.model, 0, cfg.n - 2, a);
    const StabilityProblem pf = make_problem(build_parametric(su.surface, nf), su.model, 0, cfg.n - 2, a);
    SuiteResult out{"lemma26", true, {}};
    out.details["resolutions"] = {nc, nf};
    ordered_json rows = ordered_json::array();
    for (int j = 0; j <= cfg.n - 2; ++j) {
        const Lemma26Residuals c = lemma26_residuals(pc, j);
        const Lemma26Residuals f = lemma26_residuals(pf, j);
        const bool ok1 = f.interior_max1 <= tol && refines(c.interior_max1, f.interior_max1, floor, 4.0);
        const bool ok2 = f.interior_max2 <= tol && refines(c.interior_max2, f.interior_max2, floor, 4.0);
        out.passed = out.passed && ok1 && ok2;
        rows.push_back({{"j", j}, {"identity", 1}, {"coarse", c.interior_max1}, {"fine", f.interior_max1},
            {"fine_all_nodes", f.max1}, {"order", order_estimate(c.interior_max1, f.interior_max1, floor)}, {"passed", ok1}});
        rows.push_back({{"j", j}, {"identity", 2}, {"coarse", c.interior_max2}, {"fine", f.interior_max2},
            {"fine_all_nodes", f.max2}, {"order", order_estimate(c.interior_max2, f.interior_max2, floor)}, {"passed", ok2}});
    }
    out.details["residuals"] = rows;
    return out;
}

SuiteResult jacobi_suite(const RunConfig& cfg)
{
    const Setup su = setup(cfg);
    const StabilityProblem problem =
        make_problem(build_parametric(su.surface, cfg.resolution), su.model, cfg.problem.r, cfg.problem.s, cfg.problem.a);
    const auto& imm = problem.immersion;
    const std::vector<double> beta_nodes = problem.beta_field();
    const double lambda = integrate(imm, beta_nodes) / total_area(imm);

    Rng rng(cfg.seed);
    const double rel = cfg.tolerance("jacobi_rel", 1e-3);
    const double abs_tol = cfg.tolerance("jacobi_abs", 1e-4);
    const double sym_tol = cfg.tolerance("jacobi_symmetry", 1e-6);
    SuiteResult out{"jacobi", true, {}};
    ordered_json rows = ordered_json::array();
    std::vector<std::vector<double>> fields;
    for (int k = 0; k < 3; ++k) {
        const SpeedFunction speed = mean_zero_speed(imm, random_low_harmonic(rng, imm));
        const std::vector<double> f = sample_speed(imm, speed);
        fields.push_back(f);
        std::vector<double> sq(f.size()), corr(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            sq[i] = f[i] * f[i];
            corr[i] = (lambda - beta_nodes[i]) * problem.field.points[i].shape.trace() * sq[i];
        }
        const double norm2 = integrate(imm, sq);
        // Off critical surfaces the second derivative of B + lambda V picks up
        // -int (lambda - beta) tr(S) f^2 from the area element.
        const double correction = -integrate(imm, corr);
        const JacobiOperatorValue op = jacobi_qform_operator(problem, f);
        const JacobiOperatorValue alt = jacobi_qform_operator(problem, f, QReading::p_sf2);
        const JacobiFdValue fd = jacobi_qform_fd(problem, speed, lambda);
        const double predicted = op.direct + correction;
        const double tol = std::max(rel * std::abs(fd.second), abs_tol * norm2);
        const bool ok = std::abs(predicted - fd.second) <= tol && std::abs(op.direct - op.by_parts) <= tol;
        out.passed = out.passed && ok;
        rows.push_back({{"field", k}, {"operator", op.direct}, {"by_parts", op.by_parts}, {"operator_alt_q", alt.direct},
            {"criticality_correction", correction}, {"fd", fd.second}, {"fd_step", fd.step}, {"norm2", norm2},
            {"gap", std::abs(predicted - fd.second)}, {"gap_alt_q", std::abs(alt.direct + correction - fd.second)},
            {"passed", ok}});
    }
    // Bilinear symmetry of R.
    const auto& f = fields[0];
    const auto& h = fields[1];
    const std::vector<double> rf = op_R(problem, f);
    const std::vector<double> rh = op_R(problem, h);
    std::vector<double> a(f.size()), b(f.size()), ff(f.size()), hh(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        a[i] = h[i] * rf[i];
        b[i] = f[i] * rh[i];
        ff[i] = f[i] * f[i];
        hh[i] = h[i] * h[i];
    }
    const double sym = std::abs(integrate(imm, a) - integrate(imm, b));
    const double sym_scale = std::sqrt(integrate(imm, ff) * integrate(imm, hh));
    const bool sym_ok = sym <= sym_tol * sym_scale;
    out.passed = out.passed && sym_ok;
    out.details["resolution"] = cfg.resolution;
    out.details["lambda"] = lambda;
    out.details["checks"] = rows;
    out.details["symmetry_gap"] = sym;
    out.details["symmetry_scale"] = sym_scale;
    out.details["symmetry_passed"] = sym_ok;
    return out;
}

} // namespace

bool refines(double coarse, double fine, double floor, double ratio)
{
    return fine <= floor || coarse >= ratio * fine;
}

ordered_json order_estimate(double coarse, double fine, double floor)
{
    if (fine <= floor || coarse <= floor) return nullptr;
    return std::log2(coarse / fine);
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg)
{
    if (name == "convexity") return convexity_suite(cfg);
    if (name == "calibration") return calibration_suite(cfg);
    if (name == "traces") return traces_suite(cfg);
    if (name == "maclaurin") return maclaurin_suite(cfg);
    if (name == "discriminant") return discriminant_suite(cfg);
    if (name == "minkowski") return minkowski_suite(cfg);
    if (name == "first_variation") return first_variation_suite(cfg);
    if (name == "lemma26") return lemma26_suite(cfg);
    if (name == "jacobi") return jacobi_suite(cfg);
    throw InputError("unknown suite '" + name + "'");
}

} // namespace wulff
