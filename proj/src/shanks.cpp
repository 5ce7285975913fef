#include "xtrap/shanks.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace xtrap::shanks {

namespace {

// Constrained minimizer of ||W g||^2 s.t. e^T g = 1 for a weighted difference
// matrix W = (metric factor) * dS, solved without forming the Gram matrix.
// Near-kernel data short-circuits to the normalized smallest singular vector,
// which is the exact constrained minimizer for sequences in the kernel.
Vector constrained_alpha_lambda0(const Matrix& w) {
    const Index n = w.cols();
    Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullV);
    const Index r = svd.singularValues().size();
    const double smax = (r > 0) ? svd.singularValues()(0) : 0.0;
    const double smin = (r == n) ? svd.singularValues()(r - 1) : 0.0;

    if (smax == 0.0) {
        // Zero difference matrix (constant sequence): any sum-one vector
        // attains the minimum; take the first iterate.
        Vector g = Vector::Zero(n);
        g[0] = 1.0;
        return g;
    }

    if (smin <= 1e-10 * smax) {
        Vector v = svd.matrixV().col(n - 1);
        const double denom = v.sum();
        if (std::abs(denom) > 1e-8) return v / denom;
        // Kernel vector orthogonal to e: fall through to the reduced solve.
    }

    // Eliminate the constraint: g = e/n + Z eta with Z an orthonormal basis
    // of the complement of e, then solve the unconstrained least squares.
    const Vector e = Vector::Ones(n);
    Eigen::HouseholderQR<Matrix> qr(e);
    Matrix q = qr.householderQ();
    Matrix z = q.rightCols(n - 1);
    Vector g0 = e / static_cast<double>(n);
    Matrix wz = w * z;
    Eigen::JacobiSVD<Matrix> ls(wz, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double csmax = ls.singularValues()(0);
    const double csmin = ls.singularValues()(ls.singularValues().size() - 1);
    if (csmin == 0.0 || (csmax / csmin) * (csmax / csmin) > linalg::kSingularCondition)
        throw SingularSystem("solve_alpha: constrained system condition estimate exceeds 1e14 at lambda = 0");
    Vector eta = ls.solve(-(w * g0));
    Vector g = g0 + z * eta;
    return g / g.sum();
}

AlphaCoeffs solve_alpha_impl(const Matrix& dS, const MetricSpec& m, double lambda) {
    if (dS.cols() < 2) throw std::invalid_argument("solve_alpha: need k >= 1 (at least two columns)");
    if (lambda < 0.0) throw std::invalid_argument("solve_alpha: lambda must be nonnegative");
    if (lambda == 0.0) return AlphaCoeffs{constrained_alpha_lambda0(m.weighted(dS))};
    return AlphaCoeffs{linalg::sum_constrained_solve(m.gram(dS), lambda)};
}

} // namespace

AlphaCoeffs solve_alpha_minres(const Matrix& dS, const MetricSpec& m, double lambda) {
    return solve_alpha_impl(dS, m, lambda);
}

std::pair<Vector, double> solve_alpha_svd(const Matrix& dS) {
    if (dS.cols() < 2) throw std::invalid_argument("solve_alpha_svd: need k >= 1");
    return linalg::smallest_right_singular_vector(dS);
}

BetaCoeffs solve_beta_rre(const Matrix& d2S, const Vector& rhs, const MetricSpec& m, double lambda) {
    if (d2S.cols() < 1) throw std::invalid_argument("solve_beta_rre: need k >= 1");
    return BetaCoeffs{linalg::ridge_solve(d2S, m, rhs, lambda)};
}

BetaCoeffs solve_beta_general_y(const Matrix& d2S, const Vector& rhs, const Matrix& y) {
    if (y.rows() != d2S.rows() || y.cols() != d2S.cols())
        throw std::invalid_argument("solve_beta_general_y: Y must conform with d2S");
    Matrix a = y.transpose() * d2S;
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin == 0.0 || smax / smin > linalg::kSingularCondition)
        throw SingularSystem("solve_beta_general_y: Y^T d2S condition estimate exceeds 1e14");
    return BetaCoeffs{svd.solve(y.transpose() * rhs)};
}

AlphaCoeffs solve_alpha_topological(const Matrix& stacked_dS, const MetricSpec& m, double lambda) {
    return solve_alpha_impl(stacked_dS, m, lambda);
}

BetaCoeffs solve_beta_topological(const Matrix& stacked_d2S, const Vector& stacked_rhs, const MetricSpec& m,
                                  double lambda) {
    return solve_beta_rre(stacked_d2S, stacked_rhs, m, lambda);
}

ThetaCoeffs solve_theta_coupled(const Matrix& dC, const Vector& c, const MetricSpec& m, double lambda) {
    if (dC.rows() != c.size()) throw std::invalid_argument("solve_theta_coupled: dimension mismatch");
    return ThetaCoeffs{linalg::ridge_solve(dC, m, c, lambda)};
}

Vector combine_alpha(const Matrix& s_slice, const AlphaCoeffs& alpha) {
    if (s_slice.cols() != alpha.values.size())
        throw std::invalid_argument("combine_alpha: slice width must match coefficient count");
    return s_slice * alpha.values;
}

Vector combine_beta(const Vector& s_anchor, const Matrix& dS_slice, const BetaCoeffs& beta) {
    if (dS_slice.cols() != beta.values.size())
        throw std::invalid_argument("combine_beta: slice width must match coefficient count");
    if (beta.values.size() == 0) return s_anchor;
    return s_anchor - dS_slice * beta.values;
}

} // namespace xtrap::shanks
