#include "xtrap/problems.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace xtrap::problems {

namespace {

constexpr double kStochasticTol = 1e-12;

void check_stochastic(const SparseStochasticMatrix& s) {
    const Index n = s.dimension();
    if (n == 0 || s.values.cols() != n) throw NotStochastic("matrix must be square and non-empty");
    Vector colsum = Vector::Zero(n);
    for (int k = 0; k < s.values.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s.values, k); it; ++it) {
            if (it.value() < 0.0) throw NotStochastic("negative entry in stochastic matrix");
            colsum[it.col()] += it.value();
        }
    }
    for (Index j = 0; j < n; ++j) {
        if (std::abs(colsum[j] - 1.0) > kStochasticTol)
            throw NotStochastic("column " + std::to_string(j) + " sums to " + std::to_string(colsum[j]));
    }
}

} // namespace

FixedPointProblem make_linear_problem(const Matrix& m, const Vector& b, const Vector& s0) {
    const Index p = m.rows();
    if (m.cols() != p || b.size() != p || s0.size() != p)
        throw std::invalid_argument("make_linear_problem: dimension mismatch");
    Matrix a = Matrix::Identity(p, p) - m;
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(p - 1);
    if (smin == 0.0 || smax / smin > 1e12)
        throw SingularProblem("make_linear_problem: I - M condition estimate exceeds 1e12");
    Vector solution = svd.solve(b);

    FixedPointProblem prob;
    prob.dim = p;
    prob.name = "linear";
    prob.evaluate = [m, b](const Vector& s) { return Vector(m * s + b); };
    prob.initial_guess = s0;
    prob.known_solution = solution;
    return prob;
}

FixedPointProblem make_pagerank_problem(const SparseStochasticMatrix& s, double alpha, const Vector& u0) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("make_pagerank_problem: alpha must be in [0,1)");
    check_stochastic(s);
    const Index n = s.dimension();
    if (u0.size() != n) throw std::invalid_argument("make_pagerank_problem: u0 dimension mismatch");
    if (u0.minCoeff() < 0.0 || std::abs(u0.sum() - 1.0) > kStochasticTol)
        throw NotStochastic("make_pagerank_problem: u0 must be a stochastic vector");

    SparseMatrix mat = s.values;
    FixedPointProblem prob;
    prob.dim = n;
    prob.name = "pagerank";
    prob.evaluate = [mat, alpha, n](const Vector& u) {
        // Rank-one teleportation applied without materializing e e^T.
        Vector g = alpha * (mat * u);
        g.array() += (1.0 - alpha) / static_cast<double>(n) * u.sum();
        return g;
    };
    prob.initial_guess = u0;
    return prob;
}

SparseStochasticMatrix ingest_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    long line_no = 0;
    std::string line;

    if (!std::getline(in, line)) throw ParseError("empty file", 1);
    ++line_no;
    {
        std::istringstream banner(line);
        std::string tag, object, format, field, symmetry;
        banner >> tag >> object >> format >> field >> symmetry;
        if (tag != "%%MatrixMarket" || object != "matrix") throw ParseError("missing MatrixMarket banner", line_no);
        if (format != "coordinate") throw ParseError("only coordinate format is supported", line_no);
        if (field != "real" && field != "integer" && field != "pattern")
            throw ParseError("unsupported field type '" + field + "'", line_no);
        if (symmetry != "general" && symmetry != "symmetric")
            throw ParseError("unsupported symmetry '" + symmetry + "'", line_no);

        const bool pattern = (field == "pattern");
        const bool symmetric = (symmetry == "symmetric");

        long rows = -1, cols = -1, nnz = -1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '%') continue;
            std::istringstream sz(line);
            if (!(sz >> rows >> cols >> nnz)) throw ParseError("malformed size line", line_no);
            break;
        }
        if (rows < 0) throw ParseError("missing size line", line_no);
        if (rows == 0 || cols == 0) throw EmptyMatrix("matrix has zero dimension");
        if (rows != cols) throw ParseError("matrix must be square for stochastic ingestion", line_no);

        const Index n = rows;
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
        long seen = 0;
        while (seen < nnz) {
            if (!std::getline(in, line)) throw ParseError("unexpected end of file: expected more entries", line_no);
            ++line_no;
            if (line.empty() || line[0] == '%') continue;
            std::istringstream entry(line);
            long i = 0, j = 0;
            double v = 1.0;
            if (!(entry >> i >> j)) throw ParseError("malformed entry", line_no);
            if (!pattern && !(entry >> v)) throw ParseError("missing value", line_no);
            if (i < 1 || i > n || j < 1 || j > n) throw ParseError("entry index out of range", line_no);
            if (v < 0.0) throw ParseError("negative value not supported for stochastic ingestion", line_no);
            trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
            if (symmetric && i != j) trips.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
            ++seen;
        }

        SparseMatrix raw(n, n);
        raw.setFromTriplets(trips.begin(), trips.end());

        // Scale each nonzero column to unit sum; dangling columns become uniform.
        Vector colsum = Vector::Zero(n);
        for (int k = 0; k < raw.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(raw, k); it; ++it) colsum[it.col()] += it.value();

        std::vector<Eigen::Triplet<double>> fixed;
        fixed.reserve(trips.size() + static_cast<std::size_t>(n));
        for (int k = 0; k < raw.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(raw, k); it; ++it)
                if (colsum[it.col()] > 0.0)
                    fixed.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                       it.value() / colsum[it.col()]);
        const double uniform = 1.0 / static_cast<double>(n);
        for (Index j = 0; j < n; ++j)
            if (colsum[j] <= 0.0)
                for (Index i = 0; i < n; ++i)
                    fixed.emplace_back(static_cast<int>(i), static_cast<int>(j), uniform);

        SparseStochasticMatrix out;
        out.values = SparseMatrix(n, n);
        out.values.setFromTriplets(fixed.begin(), fixed.end());
        return out;
    }
}

SparseStochasticMatrix make_random_stochastic(Index n, Index nnz_per_col, std::uint64_t seed) {
    if (n < 1 || nnz_per_col < 1 || nnz_per_col > n)
        throw std::invalid_argument("make_random_stochastic: need 1 <= nnz_per_col <= n");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> row(0, n - 1);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n * nnz_per_col));
    std::vector<Index> picked;
    for (Index j = 0; j < n; ++j) {
        picked.clear();
        while (static_cast<Index>(picked.size()) < nnz_per_col) {
            Index i = row(rng);
            if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
        }
        const double w = 1.0 / static_cast<double>(nnz_per_col);
        for (Index i : picked) trips.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
    }
    SparseStochasticMatrix out;
    out.values = SparseMatrix(n, n);
    out.values.setFromTriplets(trips.begin(), trips.end());
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference problems on the unit square.

namespace fd {

double poisson_reference(double x, double y) { return std::exp(-2.0 * x) * std::sin(3.0 * std::numbers::pi * y); }

namespace {

double q_of(PoissonVariant variant, double u) {
    const double u2 = u * u;
    return (variant == PoissonVariant::q1u2) ? 1.0 + u2 : 1.0 + u2 * u2;
}

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

struct Grid {
    Index n;        // intervals per side
    double h;       // mesh width
    Index m;        // interior nodes per side = n - 1
    Index size() const { return m * m; }
    Index idx(Index i, Index j) const { return (j - 1) * m + (i - 1); } // i, j in 1..m
};

// Value of the field at node (i, j): interior values from v, boundary values
// from the reference surface.
double node_value(const Grid& g, const Vector& v, Index i, Index j, bool zero_boundary) {
    if (i == 0 || i == g.n || j == 0 || j == g.n)
        return zero_boundary ? 0.0 : poisson_reference(i * g.h, j * g.h);
    return v[g.idx(i, j)];
}

struct Assembled {
    SparseMatrix a;      // interior x interior
    Vector boundary_rhs; // contributions of the fixed boundary values
};

// Difference operator -div(q(u) grad .) + d/dx with harmonic-mean face
// coefficients; q frozen at the field u (boundary samples from the reference
// surface when zero_boundary is false).
Assembled assemble(const Grid& g, PoissonVariant variant, const Vector& u, bool constant_q, bool zero_boundary) {
    const double h2 = g.h * g.h;
    const double c1 = 1.0 / (2.0 * g.h);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(5 * g.size()));
    Vector rhs = Vector::Zero(g.size());

    auto q_at = [&](Index i, Index j) {
        if (constant_q) return 1.0;
        return q_of(variant, node_value(g, u, i, j, zero_boundary));
    };

    for (Index j = 1; j <= g.m; ++j) {
        for (Index i = 1; i <= g.m; ++i) {
            const Index row = g.idx(i, j);
            const double qc = q_at(i, j);
            const double qe = harmonic_mean(qc, q_at(i + 1, j));
            const double qw = harmonic_mean(qc, q_at(i - 1, j));
            const double qn = harmonic_mean(qc, q_at(i, j + 1));
            const double qs = harmonic_mean(qc, q_at(i, j - 1));

            trips.emplace_back(static_cast<int>(row), static_cast<int>(row), (qe + qw + qn + qs) / h2);

            struct Neighbor {
                Index i, j;
                double coeff;
            };
            const Neighbor nb[4] = {{i + 1, j, -qe / h2 + c1},
                                    {i - 1, j, -qw / h2 - c1},
                                    {i, j + 1, -qn / h2},
                                    {i, j - 1, -qs / h2}};
            for (const auto& nbk : nb) {
                if (nbk.i == 0 || nbk.i == g.n || nbk.j == 0 || nbk.j == g.n) {
                    if (!zero_boundary)
                        rhs[row] += nbk.coeff * poisson_reference(nbk.i * g.h, nbk.j * g.h);
                } else {
                    trips.emplace_back(static_cast<int>(row), static_cast<int>(g.idx(nbk.i, nbk.j)), nbk.coeff);
                }
            }
        }
    }

    Assembled out;
    out.a = SparseMatrix(g.size(), g.size());
    out.a.setFromTriplets(trips.begin(), trips.end());
    // Full operator on a field v with the given boundary data: A v + boundary_rhs.
    out.boundary_rhs = rhs;
    return out;
}

Grid make_grid(Index grid_n) {
    if (grid_n < 8) throw std::invalid_argument("grid_n must be >= 8");
    return Grid{grid_n, 1.0 / static_cast<double>(grid_n), grid_n - 1};
}

} // namespace

Vector apply_poisson_operator(Index grid_n, PoissonVariant variant, const Vector& u_coeff, const Vector& v) {
    const Grid g = make_grid(grid_n);
    if (u_coeff.size() != g.size() || v.size() != g.size())
        throw std::invalid_argument("apply_poisson_operator: dimension mismatch");
    Assembled op = assemble(g, variant, u_coeff, /*constant_q=*/false, /*zero_boundary=*/false);
    return op.a * v + op.boundary_rhs;
}

Vector poisson_reference_interior(Index grid_n) {
    const Grid g = make_grid(grid_n);
    Vector u(g.size());
    for (Index j = 1; j <= g.m; ++j)
        for (Index i = 1; i <= g.m; ++i) u[g.idx(i, j)] = poisson_reference(i * g.h, j * g.h);
    return u;
}

Vector poisson_analytic_rhs(Index grid_n, PoissonVariant variant) {
    const Grid g = make_grid(grid_n);
    const double pi3 = 3.0 * std::numbers::pi;
    Vector f(g.size());
    for (Index j = 1; j <= g.m; ++j) {
        for (Index i = 1; i <= g.m; ++i) {
            const double x = i * g.h, y = j * g.h;
            const double u = poisson_reference(x, y);
            const double ux = -2.0 * u;
            const double uy = pi3 * std::exp(-2.0 * x) * std::cos(pi3 * y);
            const double uxx = 4.0 * u;
            const double uyy = -pi3 * pi3 * u;
            const double q = q_of(variant, u);
            const double dq = (variant == PoissonVariant::q1u2) ? 2.0 * u : 4.0 * u * u * u;
            f[g.idx(i, j)] = -dq * (ux * ux + uy * uy) - q * (uxx + uyy) + ux;
        }
    }
    return f;
}

} // namespace fd

FixedPointProblem make_nonlinear_poisson_problem(Index grid_n, PoissonVariant variant) {
    const auto g = fd::poisson_reference_interior(grid_n); // triggers grid_n validation
    // f is manufactured by applying the discrete operator to the sampled
    // reference surface, so the discrete problem has that surface as its
    // exact solution.
    const Vector f = fd::apply_poisson_operator(grid_n, variant, g, g);

    FixedPointProblem prob;
    prob.dim = (grid_n - 1) * (grid_n - 1);
    prob.name = (variant == PoissonVariant::q1u2) ? "poisson-q1u2" : "poisson-q1u4";
    prob.initial_guess = Vector::Zero(prob.dim);
    prob.known_solution = g;
    prob.evaluate = [grid_n, variant, f](const Vector& u) {
        const fd::Grid grid = fd::make_grid(grid_n);
        fd::Assembled op = fd::assemble(grid, variant, u, false, false);
        Eigen::SparseLU<SparseMatrix> lu(op.a);
        if (lu.info() != Eigen::Success) throw LinearSolveFailed("nonlinear poisson: inner factorization failed");
        Vector v = lu.solve(f - op.boundary_rhs);
        if (lu.info() != Eigen::Success) throw LinearSolveFailed("nonlinear poisson: inner solve failed");
        return v;
    };
    return prob;
}

FixedPointProblem make_bratu_problem(Index grid_n, double lambda_b) {
    const fd::Grid grid = fd::make_grid(grid_n);
    fd::Assembled op = fd::assemble(grid, PoissonVariant::q1u2, Vector::Zero(grid.size()), /*constant_q=*/true,
                                    /*zero_boundary=*/true);
    auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
    lu->compute(op.a);
    if (lu->info() != Eigen::Success) throw LinearSolveFailed("bratu: factorization of the linear part failed");

    FixedPointProblem prob;
    prob.dim = grid.size();
    prob.name = "bratu";
    prob.initial_guess = Vector::Zero(prob.dim);
    prob.evaluate = [lu, lambda_b](const Vector& u) {
        Vector rhs = -lambda_b * u.array().exp();
        Vector v = lu->solve(rhs);
        if (lu->info() != Eigen::Success) throw LinearSolveFailed("bratu: inner solve failed");
        return v;
    };
    return prob;
}

} // namespace xtrap::problems
