#ifndef XTRAP_SHANKS_HPP
#define XTRAP_SHANKS_HPP

#include <utility>

#include "xtrap/linalg.hpp"
#include "xtrap/types.hpp"

namespace xtrap::shanks {

using linalg::MetricSpec;

// Combination weights over k+1 consecutive iterates; entries sum to one.
struct AlphaCoeffs {
    Vector values;
};

// Combination weights over k first differences.
struct BetaCoeffs {
    Vector values;
};

// Combination weights of a coupled-sequence solve (m_j columns).
struct ThetaCoeffs {
    Vector values;
};

// Minimal-residual alpha: minimizes ||dS g||_M^2 + lambda ||g||^2 subject to
// e^T g = 1. dS is p x (k+1) built from k+2 consecutive iterates.
AlphaCoeffs solve_alpha_minres(const Matrix& dS, const MetricSpec& m, double lambda);

// Returns the unit right singular vector of dS together with sigma_min. The
// raw vector is unit 2-norm, not sum-normalized; sum-normalize before using
// it as combination weights.
std::pair<Vector, double> solve_alpha_svd(const Matrix& dS);

// Reduced Rank Extrapolation beta: (d2S^T M d2S + lambda I) b = d2S^T M rhs,
// rhs = the last first difference of the window.
BetaCoeffs solve_beta_rre(const Matrix& d2S, const Vector& rhs, const MetricSpec& m, double lambda);

// General-Y beta: Y^T d2S b = Y^T rhs (MPE for Y = shifted first differences,
// MMPE for fixed independent columns, RRE recovered at Y = d2S).
BetaCoeffs solve_beta_general_y(const Matrix& d2S, const Vector& rhs, const Matrix& y);

// Topological counterparts operating on the block-stacked matrices.
AlphaCoeffs solve_alpha_topological(const Matrix& stacked_dS, const MetricSpec& m, double lambda);
BetaCoeffs solve_beta_topological(const Matrix& stacked_d2S, const Vector& stacked_rhs, const MetricSpec& m,
                                  double lambda);

// Coupled-sequence theta: (dC^T M dC + lambda I) th = dC^T M c; with
// M = Y Y^T and lambda = 0 this matches the square solve (Y^T dC)^{-1} Y^T c.
ThetaCoeffs solve_theta_coupled(const Matrix& dC, const Vector& c, const MetricSpec& m, double lambda);

// S * alpha over a (k+1)-column slice of iterates; the caller picks the slice
// (latest slice for t, the earlier one for t-tilde).
Vector combine_alpha(const Matrix& s_slice, const AlphaCoeffs& alpha);

// anchor - dS_slice * beta.
Vector combine_beta(const Vector& s_anchor, const Matrix& dS_slice, const BetaCoeffs& beta);

} // namespace xtrap::shanks

#endif
