#ifndef XTRAP_LINALG_HPP
#define XTRAP_LINALG_HPP

#include <utility>
#include <variant>

#include "xtrap/types.hpp"

namespace xtrap::linalg {

// Metric defining the (semi-)norm ||v||_M^2 = v^T M v used by the coefficient
// solvers. Three representations: the identity, an explicit symmetric
// positive-semidefinite matrix, or a factor Y with M = Y Y^T.
class MetricSpec {
public:
    static MetricSpec identity();
    static MetricSpec explicit_spsd(Matrix m);
    static MetricSpec factor(Matrix y);

    bool is_identity() const;

    // X^T M X
    Matrix gram(const Matrix& x) const;
    // X^T M y
    Vector apply_xt_m(const Matrix& x, const Vector& y) const;
    // W X with W^T W = M, so plain least squares on (W X, W y) solves the
    // M-weighted problem.
    Matrix weighted(const Matrix& x) const;
    Vector weighted(const Vector& v) const;

private:
    struct Identity {};
    struct Explicit {
        Matrix m;
        Matrix sqrt; // W = Lambda^{1/2} Q^T from the eigendecomposition
    };
    struct Factor {
        Matrix y;
    };

    MetricSpec() = default;
    std::variant<Identity, Explicit, Factor> rep_;
};

// Threshold above which a Gram-matrix condition estimate counts as singular.
inline constexpr double kSingularCondition = 1e14;

// Solves min_b ||y - X b||_M^2 + lambda ||b||^2.
// lambda = 0 uses an SVD least-squares path on the weighted matrix (with
// column equilibration) and throws SingularSystem when the condition estimate
// of X^T M X exceeds 1e14; lambda > 0 solves the shifted normal equations
// (X^T M X + lambda I) b = X^T M y.
Vector ridge_solve(const Matrix& x, const MetricSpec& m, const Vector& y, double lambda);

// Solves min_g g^T (A + lambda I) g subject to e^T g = 1 for symmetric A,
// returning (A + lambda I)^{-1} e normalized to unit coefficient sum.
// When A + lambda I is numerically singular but the constrained problem is
// still well posed (exact kernel data), falls back to a reduced solve on the
// orthogonal complement of e.
Vector sum_constrained_solve(const Matrix& a, double lambda);

// Returns (v, sigma_min) with v the unit right singular vector of the
// smallest singular value. Deterministic: sign fixed so the first nonzero
// entry of v is positive.
std::pair<Vector, double> smallest_right_singular_vector(const Matrix& x);

// Replaces each singular value s_i of X by sqrt(s_i^2 + lambda), keeping the
// singular vectors, so that Xt^T Xt = X^T X + lambda I for tall X.
Matrix svd_shift(const Matrix& x, double lambda);

} // namespace xtrap::linalg

#endif
