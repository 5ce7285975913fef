#ifndef XTRAP_LAMBDA_HPP
#define XTRAP_LAMBDA_HPP

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "xtrap/types.hpp"

namespace xtrap::lambda {

// How the ridge parameter of a regularized solve is chosen.
struct Fixed {
    double lambda = 0.0;
};
struct GridSearch {
    std::vector<double> grid;
};
struct Gcv {
    std::vector<double> grid;
};

class RegularizationPolicy {
public:
    RegularizationPolicy() : rep_(Fixed{0.0}) {}

    static RegularizationPolicy fixed(double lambda);
    static RegularizationPolicy grid_search(std::vector<double> grid);
    static RegularizationPolicy gcv(std::vector<double> grid);

    bool is_fixed() const { return std::holds_alternative<Fixed>(rep_); }
    bool is_grid_search() const { return std::holds_alternative<GridSearch>(rep_); }
    bool is_gcv() const { return std::holds_alternative<Gcv>(rep_); }
    double fixed_lambda() const { return std::get<Fixed>(rep_).lambda; }
    const std::vector<double>& grid() const;

private:
    std::variant<Fixed, GridSearch, Gcv> rep_;
};

// The seven log-equispaced points spanning [1e-12, 1]:
// {1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1}.
std::vector<double> default_grid();

struct Candidate {
    double lambda;
    Vector extrapolated;
};

struct Selection {
    double lambda;
    Vector extrapolated;
    double residual_norm;
    std::size_t candidate_index;
};

// Picks the candidate with the smallest fixed-point residual ||G(t) - t||,
// breaking ties toward larger lambda. `residual_norm_of` is called at most
// once per candidate, in grid order, with the candidate's index (these
// evaluations count against the caller's G budget).
Selection grid_search_select(const std::vector<Candidate>& candidates,
                             const std::function<double(std::size_t, const Vector&)>& residual_norm_of);

// Classical ridge GCV: returns the grid member minimizing
//   V(lambda) = p ||(I - A(lambda)) y||^2 / trace(I - A(lambda))^2,
// A(lambda) = X (X^T X + lambda I)^{-1} X^T, evaluated through one SVD of X.
// Grid points with vanishing trace are skipped; ties go to larger lambda.
double gcv_select(const Matrix& x, const Vector& y, const std::vector<double>& grid);

} // namespace xtrap::lambda

#endif
