#include "xtrap/lambda.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace xtrap::lambda {

namespace {

void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("regularization grid must be non-empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0)
            throw std::invalid_argument("regularization grid entries must be finite and nonnegative");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("regularization grid must be strictly increasing");
    }
}

} // namespace

RegularizationPolicy RegularizationPolicy::fixed(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("fixed lambda must be nonnegative");
    RegularizationPolicy p;
    p.rep_ = Fixed{lambda};
    return p;
}

RegularizationPolicy RegularizationPolicy::grid_search(std::vector<double> grid) {
    validate_grid(grid);
    RegularizationPolicy p;
    p.rep_ = GridSearch{std::move(grid)};
    return p;
}

RegularizationPolicy RegularizationPolicy::gcv(std::vector<double> grid) {
    validate_grid(grid);
    RegularizationPolicy p;
    p.rep_ = Gcv{std::move(grid)};
    return p;
}

const std::vector<double>& RegularizationPolicy::grid() const {
    if (const auto* g = std::get_if<GridSearch>(&rep_)) return g->grid;
    if (const auto* g = std::get_if<Gcv>(&rep_)) return g->grid;
    throw std::logic_error("RegularizationPolicy::grid: fixed policy has no grid");
}

std::vector<double> default_grid() {
    return {1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0};
}

Selection grid_search_select(const std::vector<Candidate>& candidates,
                             const std::function<double(std::size_t, const Vector&)>& residual_norm_of) {
    if (candidates.empty()) throw std::invalid_argument("grid_search_select: no candidates");
    bool found = false;
    Selection best{};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!candidates[i].extrapolated.allFinite()) continue;
        const double r = residual_norm_of(i, candidates[i].extrapolated);
        if (!std::isfinite(r)) continue;
        // <= so later (larger-lambda) candidates win exact ties.
        if (!found || r <= best.residual_norm) {
            best = Selection{candidates[i].lambda, candidates[i].extrapolated, r, i};
            found = true;
        }
    }
    if (!found) throw AllCandidatesFailed("grid_search_select: every candidate produced a non-finite residual");
    return best;
}

double gcv_select(const Matrix& x, const Vector& y, const std::vector<double>& grid) {
    validate_grid(grid);
    const double p = static_cast<double>(x.rows());
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector s2 = svd.singularValues().array().square();
    const Vector uty = svd.matrixU().transpose() * y;
    // Component of y orthogonal to the column space never enters A(lambda)y.
    const double ortho2 = std::max(0.0, y.squaredNorm() - uty.squaredNorm());

    bool found = false;
    double best_lambda = 0.0;
    double best_v = std::numeric_limits<double>::infinity();
    bool any_degenerate = false;
    for (double lam : grid) {
        double trace = p;
        double fit2 = ortho2;
        for (Index i = 0; i < s2.size(); ++i) {
            const double h = (s2[i] + lam > 0.0) ? s2[i] / (s2[i] + lam) : 0.0;
            trace -= h;
            fit2 += (1.0 - h) * (1.0 - h) * uty[i] * uty[i];
        }
        if (trace == 0.0) {
            any_degenerate = true;
            continue; // hat matrix equals the identity; V is 0/0 at this lambda
        }
        const double v = p * fit2 / (trace * trace);
        if (!std::isfinite(v)) continue;
        if (!found || v <= best_v) {
            best_lambda = lam;
            best_v = v;
            found = true;
        }
    }
    if (!found) {
        if (any_degenerate)
            throw DegenerateTrace("gcv_select: trace(I - A(lambda)) vanished for every usable grid point");
        throw std::invalid_argument("gcv_select: no usable grid point");
    }
    return best_lambda;
}

} // namespace xtrap::lambda
