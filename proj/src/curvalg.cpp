#include "wulff/curvalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace wulff {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* what)
{
    if (m.rows() != m.cols() || m.rows() < 1) throw InputError(std::string(what) + " must be square");
    if (m.rows() > max_curvature_dim) throw InputError("curvature algebra supports n <= 8");
}

// Signature of a permutation given as an index array.
int permutation_sign(const std::vector<int>& perm)
{
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t j = i + 1; j < perm.size(); ++j) {
            if (perm[i] > perm[j]) sign = -sign;
        }
    }
    return sign;
}

// Calls visit(subset) for every increasing r-subset of `pool`.
template <typename Visit>
void for_each_subset(const std::vector<int>& pool, int r, Visit&& visit)
{
    const int m = static_cast<int>(pool.size());
    if (r > m) return;
    std::vector<int> pick(static_cast<std::size_t>(r));
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<int> subset(static_cast<std::size_t>(r));
    while (true) {
        for (int k = 0; k < r; ++k) subset[k] = pool[pick[k]];
        visit(subset);
        int k = r - 1;
        while (k >= 0 && pick[k] == m - r + k) --k;
        if (k < 0) return;
        ++pick[k];
        for (int l = k + 1; l < r; ++l) pick[l] = pick[l - 1] + 1;
    }
}

} // namespace

Eigen::MatrixXd sf_operator(const Eigen::MatrixXd& a_f, const Eigen::MatrixXd& shape)
{
    require_square(a_f, "A_F");
    require_square(shape, "S");
    if (a_f.rows() != shape.rows()) throw InputError("A_F and S differ in size");
    const double a_scale = std::max(1.0, a_f.cwiseAbs().maxCoeff());
    if ((a_f - a_f.transpose()).cwiseAbs().maxCoeff() > 1e-10 * a_scale) {
        throw ModelError("A_F is not symmetric");
    }
    const double s_scale = std::max(1.0, shape.cwiseAbs().maxCoeff());
    if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-8 * s_scale) {
        throw InputError("shape operator is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a_f);
    if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0) {
        throw ModelError("A_F is not positive definite (convexity assumption violated)");
    }
    return a_f * shape;
}

double sigma_eps(const Eigen::MatrixXd& s_f, int r)
{
    require_square(s_f, "S_F");
    const int n = static_cast<int>(s_f.rows());
    if (r < 0 || r > n) throw InputError("sigma index out of range");
    if (r == 0) return 1.0;
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    double total = 0.0;
    for_each_subset(pool, r, [&](const std::vector<int>& subset) {
        std::vector<int> perm(static_cast<std::size_t>(r));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            double term = permutation_sign(perm);
            for (int k = 0; k < r; ++k) term *= s_f(subset[k], subset[perm[k]]);
            total += term;
        } while (std::next_permutation(perm.begin(), perm.end()));
    });
    return total;
}

Eigen::VectorXd sigma_charpoly(const Eigen::MatrixXd& s_f)
{
    require_square(s_f, "S_F");
    const auto n = s_f.rows();
    // c(k) is the coefficient of lambda^k in det(lambda I - S_F).
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    c(n) = 1.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = s_f * m + c(n - k + 1) * id;
        c(n - k) = -(s_f * m).trace() / static_cast<double>(k);
    }
    Eigen::VectorXd sigma(n + 1);
    for (Eigen::Index r = 0; r <= n; ++r) sigma(r) = (r % 2 == 0 ? 1.0 : -1.0) * c(n - r);
    return sigma;
}

std::vector<Eigen::MatrixXd> newton_recurrence(const Eigen::MatrixXd& s_f, const Eigen::VectorXd& sigma)
{
    const auto n = s_f.rows();
    std::vector<Eigen::MatrixXd> p;
    p.reserve(static_cast<std::size_t>(n));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    p.push_back(id);
    for (Eigen::Index r = 1; r < n; ++r) p.push_back(sigma(r) * id - s_f * p.back());
    return p;
}

Eigen::MatrixXd newton_eps_literal(const Eigen::MatrixXd& s_f, int r)
{
    require_square(s_f, "S_F");
    const int n = static_cast<int>(s_f.rows());
    if (r < 0 || r >= n) throw InputError("Newton operator index out of range");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> pool;
        for (int k = 0; k < n; ++k) {
            if (k != i) pool.push_back(k);
        }
        for_each_subset(pool, r, [&](const std::vector<int>& subset) {
            // U = (i, subset); sum over permutations pi of positions with the
            // column index of the leading slot equal to j = U[pi(0)].
            std::vector<int> u{i};
            u.insert(u.end(), subset.begin(), subset.end());
            std::vector<int> perm(static_cast<std::size_t>(r + 1));
            std::iota(perm.begin(), perm.end(), 0);
            do {
                double term = permutation_sign(perm);
                for (int k = 1; k <= r; ++k) term *= s_f(u[k], u[perm[k]]);
                p(i, u[perm[0]]) += term;
            } while (std::next_permutation(perm.begin(), perm.end()));
        });
    }
    return p;
}

Eigen::MatrixXd newton_eps(const Eigen::MatrixXd& s_f, int r)
{
    return newton_eps_literal(s_f, r).transpose();
}

std::vector<Eigen::MatrixXd> newton_ops(const Eigen::MatrixXd& s_f, const Eigen::VectorXd& sigma, bool cross_check)
{
    auto p = newton_recurrence(s_f, sigma);
    const auto n = s_f.rows();
    if (cross_check && n <= 5) {
        const double scale = std::max(1.0, std::pow(s_f.cwiseAbs().maxCoeff(), static_cast<double>(n - 1)));
        for (Eigen::Index r = 0; r < n; ++r) {
            const double gap = (newton_eps(s_f, static_cast<int>(r)) - p[r]).cwiseAbs().maxCoeff();
            if (gap > 1e-8 * scale) {
                std::ostringstream msg;
                msg << "Newton operator P_" << r << " constructions disagree by " << gap;
                throw ConsistencyError(msg.str());
            }
        }
    }
    return p;
}

Eigen::VectorXd anisotropic_principal_curvatures(const Eigen::MatrixXd& a_f, const Eigen::MatrixXd& shape)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> root(a_f);
    const Eigen::MatrixXd half = root.operatorSqrt();
    Eigen::MatrixXd sym = half * shape * half;
    sym = 0.5 * (sym + sym.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
}

Eigen::VectorXd principal_curvatures_direct(const Eigen::MatrixXd& s_f)
{
    Eigen::VectorXd k = Eigen::EigenSolver<Eigen::MatrixXd>(s_f, false).eigenvalues().real();
    std::sort(k.data(), k.data() + k.size());
    return k;
}

Eigen::VectorXd elementary_symmetric(const Eigen::VectorXd& values)
{
    const auto n = values.size();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
    e(0) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index r = i + 1; r >= 1; --r) e(r) += values(i) * e(r - 1);
    }
    return e;
}

Eigen::VectorXd mean_curvatures(const Eigen::VectorXd& sigma)
{
    const auto n = sigma.size() - 1;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n + 3);
    for (Eigen::Index r = 0; r <= n; ++r) {
        h(r) = sigma(r) / binomial(static_cast<int>(n), static_cast<int>(r));
    }
    return h;
}

CurvaturePoint make_curvature_point(const Eigen::MatrixXd& a_f, const Eigen::MatrixXd& shape, bool cross_check)
{
    CurvaturePoint pt;
    pt.n = static_cast<int>(shape.rows());
    pt.a_f = a_f;
    pt.shape = shape;
    pt.s_f = sf_operator(a_f, shape);
    pt.kappa = anisotropic_principal_curvatures(a_f, shape);
    const Eigen::VectorXd sigma = sigma_charpoly(pt.s_f);
    pt.sigma = Eigen::VectorXd::Zero(pt.n + 3);
    pt.sigma.head(pt.n + 1) = sigma;
    pt.h = mean_curvatures(sigma);
    pt.p = newton_ops(pt.s_f, sigma, cross_check);
    pt.t.reserve(pt.p.size());
    for (const auto& p : pt.p) pt.t.push_back(p * a_f);
    return pt;
}

double TraceResiduals::max() const
{
    double m = 0.0;
    for (const auto* v : {&trace_p, &trace_ps, &trace_ps2}) {
        for (double x : *v) m = std::max(m, x);
    }
    return m;
}

TraceResiduals trace_checks(const CurvaturePoint& point)
{
    TraceResiduals res;
    const int n = point.n;
    const Eigen::MatrixXd s2 = point.s_f * point.s_f;
    for (int r = 0; r < n; ++r) {
        const auto& p = point.p[r];
        const double s1 = point.sigma_at(1);
        res.trace_p.push_back(std::abs(p.trace() - (n - r) * point.sigma_at(r)));
        res.trace_ps.push_back(std::abs((p * point.s_f).trace() - (r + 1) * point.sigma_at(r + 1)));
        const double tps2 = (p * s2).trace();
        res.trace_ps2.push_back(std::abs(tps2 - (s1 * point.sigma_at(r + 1) - (r + 2) * point.sigma_at(r + 2))));
        res.trace_ps2_uncorrected.push_back(std::abs(tps2 - (s1 * point.sigma_at(r + 1) - point.sigma_at(r + 2))));
    }
    return res;
}

MaclaurinReport maclaurin_check(const Eigen::VectorXd& h, int r, const Eigen::VectorXd& kappa, double tol)
{
    auto at = [&](int k) { return k < h.size() ? h(k) : 0.0; };
    MaclaurinReport rep;
    if (r < 0 || r + 1 >= h.size()) throw InputError("Maclaurin index out of range");
    rep.applicable = at(r + 1) > 0.0;
    if (kappa.size() > 0) {
        const double spread = kappa.maxCoeff() - kappa.minCoeff();
        rep.umbilic = spread <= 1e-8 * std::max(1e-300, kappa.cwiseAbs().maxCoeff());
    }
    if (!rep.applicable) return rep;
    for (int j = 1; j <= r; ++j) {
        if (!(at(j) > 0.0)) rep.positivity_ok = false;
    }
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= r; ++j) {
        const double gap = at(1) * at(j + 1) - at(j + 2);
        const double scale = std::max({1.0, std::abs(at(1) * at(j + 1)), std::abs(at(j + 2))});
        rep.gaps.push_back(gap);
        rep.min_gap = std::min(rep.min_gap, gap);
        if (gap < -tol * scale) rep.gaps_ok = false;
    }
    return rep;
}

double DiscriminantReport::operator()(double z) const
{
    const double h1 = h(1);
    const double hj = h(j);
    const double hj1 = h(j + 1);
    return f_value * (h1 * hj1 * z * z - 2.0 * hj1 * beta * z + hj * beta * beta);
}

double DiscriminantReport::vertex() const
{
    return beta / h(1);
}

DiscriminantReport discriminant_p(int j, double f_value, double beta, const Eigen::VectorXd& h)
{
    if (j < 0 || j + 1 >= h.size()) throw InputError("discriminant index out of range");
    if (!(f_value > 0.0)) throw ModelError("F(nu) must be positive");
    DiscriminantReport rep;
    rep.j = j;
    rep.f_value = f_value;
    rep.beta = beta;
    rep.h = h;
    const double h1 = h(1);
    const double hj = h(j);
    const double hj1 = h(j + 1);
    rep.leading = f_value * h1 * hj1;
    if (!(rep.leading > 0.0)) {
        throw ModelError("leading coefficient F H H_{j+1} is not positive");
    }
    rep.delta = 4.0 * beta * beta * f_value * f_value * hj1 * (hj1 - h1 * hj);
    rep.scale = 4.0 * beta * beta * f_value * f_value * std::abs(hj1) * std::max(std::abs(hj1), std::abs(h1 * hj));
    if (rep.delta > 1e-10 * rep.scale) {
        std::ostringstream msg;
        msg << "discriminant of P_" << j << " is positive (" << rep.delta << ")";
        throw ConsistencyError(msg.str());
    }
    return rep;
}

} // namespace wulff
