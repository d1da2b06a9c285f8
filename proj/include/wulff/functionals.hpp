#pragma once

#include "wulff/anisotropy.hpp"
#include "wulff/curvalg.hpp"
#include "wulff/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wulff {

/// Curvature algebra evaluated at every node of an immersion, with A_F and
/// F taken at the inward normal.
struct CurvatureField {
    int n = 0;
    std::vector<CurvaturePoint> points;
    std::vector<double> f_nu;        ///< F(nu)
    std::vector<Vec> sphere_grad;    ///< grad_{S^n} F at nu, frame components

    std::size_t size() const { return points.size(); }
    std::vector<double> sigma(int r) const;
    std::vector<double> mean_curvature(int r) const;
};

CurvatureField compute_curvature_field(const SampledImmersion& imm, const AnisotropyModel& model,
    bool cross_check = false);

/// b_j = (j + 1) C(n, j + 1).
double b_coefficient(int n, int j);

/// Scalar functional together with the grid it came from.
struct FunctionalValue {
    double value = 0.0;
    int resolution = 0;
    std::string provenance;
};

/// A_{r,F} = int F(nu) sigma_r.
double area_r(const SampledImmersion& imm, const CurvatureField& field, int r);
double area_r(const SampledImmersion& imm, const AnisotropyModel& model, int r);

/// B_{r,s,F} = sum_{j=r..s} a_j A_{j,F}, with 0 <= r <= s <= n - 2 and
/// a_j >= 0 not all zero (a has s - r + 1 entries).
double area_rs(const SampledImmersion& imm, const CurvatureField& field, int r, int s, const std::vector<double>& a);
double area_rs(const SampledImmersion& imm, const AnisotropyModel& model, int r, int s, const std::vector<double>& a);
void validate_rs(int n, int r, int s, const std::vector<double>& a);

/// Enclosed volume -(1/(n+1)) int <X, nu> (positive for the inward normal).
double enclosed_volume(const SampledImmersion& imm);
/// (1/(n+1)) int <X, nu>: the volume functional whose t-derivative along
/// X + t f nu is int f, i.e. minus the enclosed volume.
double signed_volume(const SampledImmersion& imm);

/// int (F(nu) H_r + H_{r+1} <X, nu>), which vanishes on closed hypersurfaces.
double minkowski_residual(const SampledImmersion& imm, const CurvatureField& field, int r);
double minkowski_residual(const SampledImmersion& imm, const AnisotropyModel& model, int r);

/// Central finite-difference derivative with a step-halving plateau search.
struct FdEstimate {
    double value = 0.0;
    double step = 0.0;
    double error_estimate = 0.0;
};

struct FdOptions {
    std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
    /// Plateau acceptance: best Richardson estimate <= rel * |value| + abs.
    double rel_tol = 1e-2;
    double abs_tol = 1e-9;
};

/// First (order = 1) or second (order = 2) derivative at 0 by five-point
/// stencils. Each step h gives D(h); the Richardson estimate of D(h') is
/// |D(h) - D(h')| for consecutive steps, and the step with the smallest
/// estimate wins. Throws ConditioningError without a plateau.
FdEstimate fd_derivative(const std::function<double(double)>& g, int order, const FdOptions& options = {});

struct VariationCheck {
    double fd_derivative = 0.0;
    double formula_value = 0.0;
    double gap = 0.0;
    double step = 0.0;
};

/// d/dt A_{r,F}(X_t) at 0 by finite differences against
/// -b_r int f H_{r+1} = -(r + 1) int f sigma_{r+1}.
VariationCheck first_variation_check(const VariationFamily& family, const AnisotropyModel& model, int r,
    const FdOptions& options = {});

/// All first-variation checks of one family from shared rebuilt geometries:
/// area[r] for r = 0 .. n - 1, and the volume check.
struct VariationSweep {
    std::vector<VariationCheck> area;
    VariationCheck volume;
};
VariationSweep first_variation_sweep(const VariationFamily& family, const AnisotropyModel& model,
    const FdOptions& options = {});

/// d/dt signed_volume(X_t) at 0 against int f.
VariationCheck volume_variation_check(const VariationFamily& family, const FdOptions& options = {});

} // namespace wulff
