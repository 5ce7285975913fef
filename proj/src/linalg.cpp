#include "xtrap/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace xtrap::linalg {

namespace {

// Symmetric condition estimate |lambda|_max / |lambda|_min.
double symmetric_condition(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
    const Vector ev = eig.eigenvalues().cwiseAbs();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    if (hi == 0.0) return std::numeric_limits<double>::infinity();
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

void fix_sign(Vector& v) {
    for (Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

} // namespace

MetricSpec MetricSpec::identity() {
    MetricSpec s;
    s.rep_ = Identity{};
    return s;
}

MetricSpec MetricSpec::explicit_spsd(Matrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("metric matrix must be square");
    const double scale = m.norm();
    if ((m - m.transpose()).norm() > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("metric matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("metric matrix must be positive semidefinite");
    // Clamp roundoff negatives so the square root stays real; M itself is
    // applied as given.
    Vector ev = eig.eigenvalues().cwiseMax(0.0);
    MetricSpec s;
    s.rep_ = Explicit{std::move(m), ev.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose()};
    return s;
}

MetricSpec MetricSpec::factor(Matrix y) {
    MetricSpec s;
    s.rep_ = Factor{std::move(y)};
    return s;
}

bool MetricSpec::is_identity() const { return std::holds_alternative<Identity>(rep_); }

Matrix MetricSpec::gram(const Matrix& x) const {
    if (const auto* e = std::get_if<Explicit>(&rep_)) return x.transpose() * (e->m * x);
    if (const auto* f = std::get_if<Factor>(&rep_)) {
        Matrix yx = f->y.transpose() * x;
        return yx.transpose() * yx;
    }
    return x.transpose() * x;
}

Vector MetricSpec::apply_xt_m(const Matrix& x, const Vector& y) const {
    if (const auto* e = std::get_if<Explicit>(&rep_)) return x.transpose() * (e->m * y);
    if (const auto* f = std::get_if<Factor>(&rep_)) return (f->y.transpose() * x).transpose() * (f->y.transpose() * y);
    return x.transpose() * y;
}

Matrix MetricSpec::weighted(const Matrix& x) const {
    if (const auto* e = std::get_if<Explicit>(&rep_)) return e->sqrt * x;
    if (const auto* f = std::get_if<Factor>(&rep_)) return f->y.transpose() * x;
    return x;
}

Vector MetricSpec::weighted(const Vector& v) const {
    if (const auto* e = std::get_if<Explicit>(&rep_)) return e->sqrt * v;
    if (const auto* f = std::get_if<Factor>(&rep_)) return f->y.transpose() * v;
    return v;
}

Vector ridge_solve(const Matrix& x, const MetricSpec& m, const Vector& y, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge_solve: lambda must be nonnegative");
    if (x.rows() != y.size()) throw std::invalid_argument("ridge_solve: dimension mismatch");

    if (lambda > 0.0) {
        Matrix a = m.gram(x);
        a.diagonal().array() += lambda;
        return a.ldlt().solve(m.apply_xt_m(x, y));
    }

    // lambda = 0: least squares on the weighted matrix, equilibrated by
    // column so the condition estimate reflects solvability rather than
    // column scaling.
    Matrix wx = m.weighted(x);
    Vector wy = m.weighted(y);
    Vector scale(wx.cols());
    for (Index j = 0; j < wx.cols(); ++j) {
        const double n = wx.col(j).norm();
        scale[j] = (n > 0.0) ? n : 1.0;
    }
    Matrix wxs = wx * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Matrix> svd(wxs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin == 0.0 || (smax / smin) * (smax / smin) > kSingularCondition)
        throw SingularSystem("ridge_solve: X^T M X condition estimate exceeds 1e14 at lambda = 0");
    Vector b = svd.solve(wy);
    return scale.cwiseInverse().asDiagonal() * b;
}

Vector sum_constrained_solve(const Matrix& a, double lambda) {
    if (a.rows() != a.cols()) throw std::invalid_argument("sum_constrained_solve: A must be square");
    if (lambda < 0.0) throw std::invalid_argument("sum_constrained_solve: lambda must be nonnegative");
    const Index n = a.rows();
    const Vector e = Vector::Ones(n);

    Matrix shifted = a;
    shifted.diagonal().array() += lambda;

    const double cond = symmetric_condition(shifted);
    if (cond <= kSingularCondition) {
        Vector z = shifted.ldlt().solve(e);
        const double denom = e.dot(z);
        if (std::abs(denom) < 1e-14 * z.lpNorm<1>())
            throw DegenerateNormalization("sum_constrained_solve: e^T (A + lambda I)^{-1} e is numerically zero");
        Vector alpha = z / denom;
        return alpha / alpha.sum();
    }

    // A + lambda I is numerically singular. The constrained minimizer can
    // still be well defined (exact kernel data with e^T v != 0): solve on the
    // orthogonal complement of e instead.
    Eigen::HouseholderQR<Matrix> qr(e);
    Matrix q = qr.householderQ();
    Matrix z = q.rightCols(n - 1); // orthonormal basis of e^perp
    Matrix r = z.transpose() * shifted * z;
    if (n > 1 && symmetric_condition(r) > kSingularCondition)
        throw SingularSystem("sum_constrained_solve: constrained system condition estimate exceeds 1e14");
    Vector g0 = e / static_cast<double>(n);
    Vector eta = (n > 1) ? Vector(r.ldlt().solve(-(z.transpose() * (shifted * g0)))) : Vector();
    Vector gamma = (n > 1) ? Vector(g0 + z * eta) : g0;
    if (!gamma.allFinite())
        throw SingularSystem("sum_constrained_solve: reduced solve produced non-finite coefficients");
    return gamma / gamma.sum();
}

std::pair<Vector, double> smallest_right_singular_vector(const Matrix& x) {
    // Full V so kernel directions of wide matrices are available.
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullV);
    const Index n = x.cols();
    const Index r = svd.singularValues().size();
    // Columns of V beyond the number of computed singular values correspond
    // to singular value zero.
    double sigma = 0.0;
    Index idx = n - 1;
    if (r == n) {
        sigma = svd.singularValues()(r - 1);
        idx = r - 1;
    }
    Vector v = svd.matrixV().col(idx);
    fix_sign(v);
    return {v, sigma};
}

Matrix svd_shift(const Matrix& x, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("svd_shift: lambda must be nonnegative");
    if (lambda == 0.0) return x;
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = svd.singularValues();
    Vector shifted = (s.array().square() + lambda).sqrt();
    return svd.matrixU() * shifted.asDiagonal() * svd.matrixV().transpose();
}

} // namespace xtrap::linalg
