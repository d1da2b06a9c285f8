#pragma once

#include "wulff/types.hpp"

#include <functional>
#include <vector>

namespace wulff {

// Pointwise anisotropic curvature algebra.
//
// Normalization: sigma_r is the plain elementary symmetric function of the
// anisotropic principal curvatures, sigma_r = e_r(kappa), and
// H_r = sigma_r / C(n, r). With this choice (r + 1) sigma_{r+1} = b_r H_{r+1}
// where b_r = (r + 1) C(n, r + 1).

inline constexpr int max_curvature_dim = 8;

/// Anisotropic curvature data at one point of a hypersurface.
struct CurvaturePoint {
    int n = 0;
    Eigen::MatrixXd a_f;              ///< A_F in the orthonormal frame
    Eigen::MatrixXd shape;            ///< S in the orthonormal frame
    Eigen::MatrixXd s_f;              ///< S_F = A_F S
    Eigen::VectorXd kappa;            ///< sorted anisotropic principal curvatures
    Eigen::VectorXd sigma;            ///< sigma_0 .. sigma_n, padded with two zeros
    Eigen::VectorXd h;                ///< H_0 .. H_n, padded with two zeros
    std::vector<Eigen::MatrixXd> p;   ///< Newton operators P_0 .. P_{n-1}
    std::vector<Eigen::MatrixXd> t;   ///< T_r = P_r A_F

    /// sigma_r / H_r with the conventions sigma_r = H_r = 0 for r > n.
    double sigma_at(int r) const { return r <= n + 1 ? sigma(r) : 0.0; }
    double h_at(int r) const { return r <= n + 1 ? h(r) : 0.0; }
};

/// S_F = A_F S. Throws ModelError when A_F is not symmetric positive definite.
Eigen::MatrixXd sf_operator(const Eigen::MatrixXd& a_f, const Eigen::MatrixXd& shape);

/// sigma_r from the permutation-symbol sum. The r! ordered index tuples of
/// each r-subset contribute identically, so the sum runs over subsets and
/// the signed permutations of each subset.
double sigma_eps(const Eigen::MatrixXd& s_f, int r);

/// sigma_0 .. sigma_n from the Faddeev-LeVerrier recurrence for
/// det(lambda I - S_F) = sum_r (-1)^r sigma_r lambda^(n - r).
Eigen::VectorXd sigma_charpoly(const Eigen::MatrixXd& s_f);

/// Newton operators by the recurrence P_0 = Id, P_r = sigma_r Id - S_F P_{r-1}.
std::vector<Eigen::MatrixXd> newton_recurrence(const Eigen::MatrixXd& s_f, const Eigen::VectorXd& sigma);

/// Newton operator P_r from the permutation-symbol sum, reading the symbol
/// with S^F_{ij} = (row i, column j). The literal sum yields the
/// transpose of the Newton polynomial in S_F; see newton_eps.
Eigen::MatrixXd newton_eps_literal(const Eigen::MatrixXd& s_f, int r);

/// P_r from the permutation-symbol sum, oriented so that T_r = P_r A_F is
/// symmetric (the transpose of newton_eps_literal).
Eigen::MatrixXd newton_eps(const Eigen::MatrixXd& s_f, int r);

/// P_0 .. P_{n-1} by the recurrence. When cross_check is set and n <= 5 the
/// permutation-symbol construction is also run; a max-entry mismatch above
/// 1e-8 * scale throws ConsistencyError.
std::vector<Eigen::MatrixXd> newton_ops(const Eigen::MatrixXd& s_f, const Eigen::VectorXd& sigma,
    bool cross_check = false);

/// Real eigenvalues of A_F S, sorted. Uses the symmetric similarity
/// A_F^{1/2} S A_F^{1/2}.
Eigen::VectorXd anisotropic_principal_curvatures(const Eigen::MatrixXd& a_f, const Eigen::MatrixXd& shape);

/// Real parts of the eigenvalues of a general S_F (fallback when A_F is
/// unavailable), sorted.
Eigen::VectorXd principal_curvatures_direct(const Eigen::MatrixXd& s_f);

/// Full pointwise evaluation from A_F and S.
CurvaturePoint make_curvature_point(const Eigen::MatrixXd& a_f, const Eigen::MatrixXd& shape,
    bool cross_check = false);

/// H_0 .. H_n from sigma_0 .. sigma_n, padded with two zeros.
Eigen::VectorXd mean_curvatures(const Eigen::VectorXd& sigma);

/// Elementary symmetric polynomials e_0 .. e_n of a list of values.
Eigen::VectorXd elementary_symmetric(const Eigen::VectorXd& values);

struct TraceResiduals {
    // Index r = 0 .. n-1.
    std::vector<double> trace_p;      ///< |tr P_r - (n - r) sigma_r|
    std::vector<double> trace_ps;     ///< |tr(P_r S_F) - (r + 1) sigma_{r+1}|
    std::vector<double> trace_ps2;    ///< |tr(P_r S_F^2) - (sigma_1 sigma_{r+1} - (r + 2) sigma_{r+2})|
    /// |tr(P_r S_F^2) - (sigma_1 sigma_{r+1} - sigma_{r+2})|, the form without
    /// the (r + 2) factor. Nonzero in general; kept for reporting.
    std::vector<double> trace_ps2_uncorrected;
    double max() const;
};

TraceResiduals trace_checks(const CurvaturePoint& point);

struct MaclaurinReport {
    bool applicable = false;     ///< H_{r+1} > 0
    bool positivity_ok = true;   ///< H_j > 0 for 1 <= j <= r
    bool gaps_ok = true;         ///< H H_{j+1} - H_{j+2} >= -tol for 0 <= j <= r
    std::vector<double> gaps;    ///< H H_{j+1} - H_{j+2}, j = 0 .. r
    double min_gap = 0.0;
    bool umbilic = false;        ///< max kappa - min kappa <= 1e-8 |kappa|
};

/// Maclaurin-type inequalities for curvatures in the Garding cone of order
/// r + 1. kappa is used only for the umbilicity flag and may be empty.
MaclaurinReport maclaurin_check(const Eigen::VectorXd& h, int r, const Eigen::VectorXd& kappa = {},
    double tol = 1e-10);

/// Quadratic P_{j,F,x}(z) = F (H H_{j+1} z^2 - 2 H_{j+1} beta z + H_j beta^2).
struct DiscriminantReport {
    double delta = 0.0;        ///< 4 beta^2 F^2 H_{j+1} (H_{j+1} - H H_j)
    double leading = 0.0;      ///< F H H_{j+1}
    double scale = 0.0;        ///< magnitude used for the sign tolerance
    double f_value = 0.0;
    double beta = 0.0;
    int j = 0;
    Eigen::VectorXd h;
    double operator()(double z) const;
    /// Vertex of the parabola, beta / H.
    double vertex() const;
};

/// Builds P_{j,F,x}. Throws ModelError when the leading coefficient is not
/// positive, and ConsistencyError when delta > 1e-10 * scale.
DiscriminantReport discriminant_p(int j, double f_value, double beta, const Eigen::VectorXd& h);

} // namespace wulff
