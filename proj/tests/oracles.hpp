// Test-only oracles, independent of the library's solve paths.
#ifndef XTRAP_TESTS_ORACLES_HPP
#define XTRAP_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <random>

#include "xtrap/types.hpp"

namespace oracles {

using xtrap::Index;
using xtrap::Matrix;
using xtrap::Vector;

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
    return m;
}

inline Vector random_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

// Least squares min ||y - X b|| via Householder QR (the library's lambda = 0
// path goes through an equilibrated SVD).
inline Vector qr_least_squares(const Matrix& x, const Vector& y) {
    return x.householderQr().solve(y);
}

// Constrained minimizer of g^T A g s.t. e^T g = 1 via the bordered KKT
// system [2A, e; e^T, 0] [g; mu] = [0; 1].
inline Vector kkt_sum_constrained(const Matrix& a) {
    const Index n = a.rows();
    Matrix kkt = Matrix::Zero(n + 1, n + 1);
    kkt.topLeftCorner(n, n) = 2.0 * a;
    kkt.topRightCorner(n, 1).setOnes();
    kkt.bottomLeftCorner(1, n).setOnes();
    Vector rhs = Vector::Zero(n + 1);
    rhs[n] = 1.0;
    Vector sol = kkt.fullPivLu().solve(rhs);
    return sol.head(n);
}

// Dense-hat-matrix GCV functional p ||(I - A(lambda)) y||^2 / tr(I - A(lambda))^2.
inline double dense_gcv_value(const Matrix& x, const Vector& y, double lambda) {
    const Index p = x.rows();
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    Matrix hat = x * gram.fullPivLu().solve(Matrix(x.transpose()));
    Matrix rest = Matrix::Identity(p, p) - hat;
    const double tr = rest.trace();
    return static_cast<double>(p) * (rest * y).squaredNorm() / (tr * tr);
}

// A linear fixed-point kernel instance: M = Q D Q^T with distinct eigenvalue
// moduli in [0.8 rho, rho] (so the minimal polynomial has full degree and the
// Krylov difference windows stay well conditioned) and a generic start.
struct LinearKernelInstance {
    Matrix m;
    Vector b;
    Vector s0;
    Vector solution; // (I - M)^{-1} b
};

inline LinearKernelInstance linear_kernel_instance(Index p, double rho, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> moduli(0.8, 1.0);
    std::bernoulli_distribution coin(0.5);
    Matrix d = Matrix::Zero(p, p);
    double max_modulus = 0.0;
    Index i = 0;
    while (i < p) {
        const double r = moduli(rng);
        max_modulus = std::max(max_modulus, r);
        if (i + 1 < p && coin(rng)) {
            // conjugate pair: 2x2 rotation block of radius r
            std::uniform_real_distribution<double> ang(0.3, 2.8);
            const double a = ang(rng);
            d(i, i) = r * std::cos(a);
            d(i, i + 1) = -r * std::sin(a);
            d(i + 1, i) = r * std::sin(a);
            d(i + 1, i + 1) = r * std::cos(a);
            i += 2;
        } else {
            d(i, i) = coin(rng) ? r : -r;
            i += 1;
        }
    }
    d *= rho / max_modulus; // spectral radius exactly rho
    Eigen::HouseholderQR<Matrix> qr(random_matrix(p, p, rng));
    Matrix q = qr.householderQ();
    LinearKernelInstance inst;
    inst.m = q * d * q.transpose();
    inst.b = random_vector(p, rng);
    inst.s0 = random_vector(p, rng);
    inst.solution = (Matrix::Identity(p, p) - inst.m).fullPivLu().solve(inst.b);
    return inst;
}

// Picard iterates s_0 .. s_count-1 of s_{n+1} = M s_n + b.
inline std::vector<Vector> picard_iterates(const LinearKernelInstance& inst, Index count) {
    std::vector<Vector> out;
    out.push_back(inst.s0);
    for (Index n = 1; n < count; ++n) out.push_back(inst.m * out.back() + inst.b);
    return out;
}

} // namespace oracles

#endif
