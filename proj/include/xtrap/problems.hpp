#ifndef XTRAP_PROBLEMS_HPP
#define XTRAP_PROBLEMS_HPP

#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "xtrap/types.hpp"

namespace xtrap::problems {

using SparseMatrix = Eigen::SparseMatrix<double>;

// A fixed-point map G: R^p -> R^p with residual F(s) = G(s) - s.
struct FixedPointProblem {
    Index dim = 0;
    std::function<Vector(const Vector&)> evaluate;
    Vector initial_guess;
    std::optional<Vector> known_solution;
    bool pure = true; // G deterministic and side-effect free
    std::string name;

    Vector residual(const Vector& s) const { return evaluate(s) - s; }
};

// Column-stochastic sparse matrix (every column sums to one, entries >= 0).
struct SparseStochasticMatrix {
    SparseMatrix values; // compressed column storage
    Index dimension() const { return values.rows(); }
};

// G(s) = M s + b with known solution (I - M)^{-1} b attached. Throws
// SingularProblem when I - M is not numerically invertible.
FixedPointProblem make_linear_problem(const Matrix& m, const Vector& b, const Vector& s0);

// PageRank power iteration G(u) = alpha S u + (1 - alpha)/n (e^T u) e,
// computed matrix-free in the rank-one part.
FixedPointProblem make_pagerank_problem(const SparseStochasticMatrix& s, double alpha, const Vector& u0);

// Reads a Matrix Market coordinate file (pattern or real), normalizes each
// nonzero column to sum one and replaces dangling (zero) columns by the
// uniform column.
SparseStochasticMatrix ingest_matrix_market(const std::string& path);

// Random column-stochastic matrix with ~nnz_per_col nonzeros per column;
// deterministic for a fixed seed.
SparseStochasticMatrix make_random_stochastic(Index n, Index nnz_per_col, std::uint64_t seed);

enum class PoissonVariant { q1u2, q1u4 }; // q(u) = 1 + u^2 or 1 + u^4

// Lagged-diffusivity Picard map for -div(q(u) grad u) + u_x = f on [0,1]^2,
// 5-point finite differences on a uniform grid with grid_n intervals per
// side ((grid_n - 1)^2 interior unknowns), harmonic-mean face coefficients,
// centered convection. f is manufactured by applying the discrete operator
// to the sampled reference surface exp(-2x) sin(3 pi y), whose interior
// samples are attached as the known solution.
FixedPointProblem make_nonlinear_poisson_problem(Index grid_n, PoissonVariant variant);

// Picard map G(u) = A^{-1} (-lambda_b exp(u)) for -lap(u) + u_x +
// lambda_b exp(u) = 0 with zero Dirichlet data; A = -lap + d/dx is factored
// once.
FixedPointProblem make_bratu_problem(Index grid_n, double lambda_b);

// Test/verification helpers for the finite-difference problems.
namespace fd {

// Reference surface of the manufactured problem at (x, y).
double poisson_reference(double x, double y);

// Applies the nonlinear-Poisson difference stencil (coefficients frozen at
// u_coeff, boundary values from the reference surface) to interior values v.
Vector apply_poisson_operator(Index grid_n, PoissonVariant variant, const Vector& u_coeff, const Vector& v);

// Interior samples of the reference surface.
Vector poisson_reference_interior(Index grid_n);

// Analytic right-hand side -div(q(u) grad u) + u_x evaluated at the interior
// nodes for the reference surface.
Vector poisson_analytic_rhs(Index grid_n, PoissonVariant variant);

} // namespace fd

} // namespace xtrap::problems

#endif
