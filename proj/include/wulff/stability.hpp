#pragma once

#include "wulff/functionals.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wulff {

/// Weighted anisotropic area B = sum_{j=r..s} a_j A_{j,F} on a sampled
/// immersion, with the node curvature field precomputed.
struct StabilityProblem {
    SampledImmersion immersion;
    AnisotropyModel model;
    int r = 0;
    int s = 0;
    std::vector<double> a;
    CurvatureField field;

    int n() const { return immersion.n; }
    double a_at(int j) const { return a[j - r]; }
    double b(int j) const { return b_coefficient(immersion.n, j); }
    /// Node values of sum a_j b_j H_{j+1}.
    std::vector<double> beta_field() const;
};

StabilityProblem make_problem(SampledImmersion immersion, const AnisotropyModel& model, int r, int s,
    std::vector<double> a);

/// Zeroth-order coefficient of I_j.
enum class QReading {
    t_s2,   ///< tr(T_j S^2), the default
    p_sf2   ///< tr(P_j S_F^2)
};

std::vector<double> q_field(const StabilityProblem& problem, int j, QReading reading = QReading::t_s2);

/// L_j f = div(T_j grad f).
std::vector<double> op_Lj(const StabilityProblem& problem, int j, std::span<const double> f);

/// I_j f = L_j f + q_j f.
std::vector<double> op_Ij(const StabilityProblem& problem, int j, std::span<const double> f,
    QReading reading = QReading::t_s2);

/// R f = sum_j (j + 1) a_j I_j f.
std::vector<double> op_R(const StabilityProblem& problem, std::span<const double> f,
    QReading reading = QReading::t_s2);

struct Lemma26Residuals {
    std::vector<double> res1;   ///< I_j<X,nu> + <grad sigma_{j+1}, X^T> + (j+1) sigma_{j+1}
    std::vector<double> res2;   ///< I_j F(nu) + <grad sigma_{j+1}, grad F o nu> - sigma_1 sigma_{j+1} + (j+2) sigma_{j+2}
    double max1 = 0.0;
    double max2 = 0.0;
    double interior_max1 = 0.0; ///< excludes the node rows next to chart poles
    double interior_max2 = 0.0;
};

Lemma26Residuals lemma26_residuals(const StabilityProblem& problem, int j);

/// True for nodes away from the polar rows of a sphere chart.
std::vector<bool> interior_mask(const SampledImmersion& imm);

struct TestFunction {
    std::vector<double> f;
    SpeedFunction speed;
    double alpha = 0.0;
    double beta = 0.0;
    double beta_deviation = 0.0;
    double min_h_s1 = 0.0;         ///< min over nodes of H_{s+1}
    double mean_zero_residual = 0.0;
    double f_norm = 0.0;           ///< L2 norm of f
    double f_scale = 0.0;          ///< |alpha| |F(nu)|_2 + |beta| |<X,nu>|_2
    bool beta_constant = false;
    bool h_positive = false;
    bool degenerate = false;       ///< f vanishes relative to f_scale

    bool hypotheses_hold() const { return beta_constant && h_positive; }
};

struct TestFunctionOptions {
    double beta_tol = 1e-6;        ///< relative to max(|beta|, 1)
    double degenerate_tol = 1e-6;  ///< relative to f_scale
};

/// f = alpha F(nu) + beta <X, nu> with beta the node mean of
/// sum a_j b_j H_{j+1} and alpha = int sum a_j b_j F H_j / int F.
TestFunction build_test_function(const StabilityProblem& problem, const TestFunctionOptions& options = {});

struct JacobiOperatorValue {
    double direct = 0.0;    ///< -int f R f
    double by_parts = 0.0;  ///< sum (j+1) a_j (int <T_j grad f, grad f> - int q_j f^2)
};

/// Throws InputError unless |int f| <= mean_zero_tol * (|f|_2 sqrt(area) + tiny).
JacobiOperatorValue jacobi_qform_operator(const StabilityProblem& problem, std::span<const double> f,
    QReading reading = QReading::t_s2, double mean_zero_tol = 1e-8);

/// -int f R f with R assembled from the closed forms for I_j F(nu) and
/// I_j <X, nu>, dropping the gradient terms that cancel when beta is constant.
double jacobi_qform_closed_form(const StabilityProblem& problem, const TestFunction& test);

struct JacobiFdValue {
    double second = 0.0;
    double first = 0.0;
    double step = 0.0;
    double error_estimate = 0.0;
};

/// Second and first t-derivatives of B(X_t) + lambda * signed_volume(X_t)
/// along X_t = X + t f nu.
JacobiFdValue jacobi_qform_fd(const StabilityProblem& problem, const SpeedFunction& speed, double lambda,
    const FdOptions& options = {});

struct GroupedTerm {
    int j = 0;
    double gap_term = 0.0;          ///< -a_j b_j (n-j-1) alpha^2 int F (H H_{j+1} - H_{j+2})
    double quadratic_term = 0.0;    ///< -a_j b_j (j+1) int P_j(alpha)
    double max_gap_integrand = 0.0; ///< pointwise max of the gap-term integrand
    double max_quadratic_integrand = 0.0;
    double min_gap = 0.0;           ///< min over nodes of H H_{j+1} - H_{j+2}
    double max_gap = 0.0;
    double min_p_alpha = 0.0;       ///< min over nodes of P_j(alpha)
    double max_delta = 0.0;         ///< max over nodes of the discriminant of P_j
};

std::vector<GroupedTerm> grouped_terms(const StabilityProblem& problem, const TestFunction& test);

enum class Verdict { wulff_equality, stable_consistent, hypothesis_violated };
std::string to_string(Verdict v);

struct PipelineOptions {
    TestFunctionOptions test;
    FdOptions fd;
    double route_rel_tol = 1e-3;
    double route_abs_tol = 1e-4;    ///< relative to f_scale^2
    double equality_gap_tol = 1e-6;
    double sign_tol = 1e-10;        ///< pointwise sign tolerance of the grouped-term integrands
    double equality_term_tol = 1e-8;
    double mean_zero_tol = 1e-6;    ///< relative, see jacobi_qform_operator
    bool run_fd = true;
};

struct StabilityReport {
    int n = 0;
    int r = 0;
    int s = 0;
    std::vector<double> a;
    int resolution = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double beta_deviation = 0.0;
    double min_h_s1 = 0.0;
    double mean_zero_residual = 0.0;
    double f_norm = 0.0;
    double f_scale = 0.0;
    bool degenerate = false;
    bool hypotheses_hold = false;
    bool exploratory = false;
    std::optional<double> j2_operator;
    std::optional<double> j2_by_parts;
    std::optional<double> j2_closed_form;
    std::optional<double> j2_fd;
    std::optional<double> j1_fd;
    std::optional<double> fd_step;
    std::optional<double> j2_operator_alt_q;   ///< operator route with q = tr(P_j S_F^2)
    double j2_grouped = 0.0;
    std::vector<GroupedTerm> grouped;
    std::vector<double> q_reading_gap;         ///< per j, max |tr(T_j S^2) - tr(P_j S_F^2)|
    double max_equality_gap = 0.0;
    double kappa_spread = 0.0;                 ///< max over nodes of max kappa - min kappa
    double sf_identity_error = 0.0;            ///< max |S_F - Id / mean kappa|
    bool mean_zero_ok = true;
    bool routes_agree = true;
    bool signs_ok = true;
    Verdict verdict = Verdict::hypothesis_violated;
};

StabilityReport theorem_pipeline(const StabilityProblem& problem, const PipelineOptions& options = {});

} // namespace wulff
