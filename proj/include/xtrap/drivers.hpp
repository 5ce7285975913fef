#ifndef XTRAP_DRIVERS_HPP
#define XTRAP_DRIVERS_HPP

#include <Eigen/Cholesky>
#include <cstdint>
#include <optional>
#include <string>

#include "xtrap/lambda.hpp"
#include "xtrap/linalg.hpp"
#include "xtrap/problems.hpp"
#include "xtrap/records.hpp"
#include "xtrap/shanks.hpp"
#include "xtrap/window.hpp"

namespace xtrap::drivers {

using lambda::RegularizationPolicy;
using linalg::MetricSpec;
using problems::FixedPointProblem;

enum class Method {
    SVDA,
    RNLA,
    RRRE,
    RTSA,
    AA,
    RAA,
    AtmRre,
    AtmMpe,
    AtmMmpe,
    StabilizedAA,
    PlainFixedPoint,
};

std::string to_string(Method m);
Method method_from_string(const std::string& name);

// Which quasi-Newton matrix a regularized mixing step uses: Type2 is the
// regularized AA scheme (default); Type1 enforces the regularized multisecant
// condition instead and is experimental.
enum class RaaVariant { Type2, Type1 };

struct MethodConfig {
    Method method = Method::PlainFixedPoint;
    // k for restarted methods, m for mixing methods. Unset picks the value
    // that makes each extrapolation consume seven iterates (k = 5
    // minimal-residual, k = 3 topological, m = 6).
    std::optional<Index> window;
    double mixing_beta = 1.0; // in (0, 1]
    double tau = 10.0;        // stabilization threshold, > 1
    MetricSpec metric = MetricSpec::identity();
    std::optional<RegularizationPolicy> reg; // unset picks the method's default policy
    std::size_t max_g_evals = 10000;
    double tol = 1e-7;
    std::uint64_t seed = 0; // drives the fixed MMPE matrix
    bool use_t_tilde = false;
    bool svda_sum_normalize = true;
    RaaVariant raa_variant = RaaVariant::Type2;
};

Index resolved_window(const MethodConfig& cfg);
RegularizationPolicy resolved_policy(const MethodConfig& cfg);

// Implicit representation of H = -beta I + (dS + beta dF) (dF^T dF + lambda I)^{-1} dF^T,
// applied to vectors without forming the p x p matrix. Satisfies the
// multisecant identity H dF = dS when lambda = 0.
class QuasiNewtonMatrixView {
public:
    QuasiNewtonMatrixView(Matrix dS, Matrix dF, double beta, double lambda,
                          RaaVariant variant = RaaVariant::Type2);
    Vector apply(const Vector& v) const;
    Index history_cols() const { return ds_.cols(); }

private:
    Matrix ds_, df_, combo_; // combo = dS + beta dF (or dS + beta dF~ for Type1)
    Matrix df_right_;        // matrix whose transpose multiplies v (dF, or dF~ for Type1)
    double beta_;
    Eigen::LDLT<Matrix> gram_;
};

Vector apply_H_beta(const QuasiNewtonMatrixView& view, const Vector& v);

// Explicit constructions of the same matrix for verification: the closed
// form and the two rank-one recursions (secant form and projected form).
Matrix h_beta_closed_form(const Matrix& dS, const Matrix& dF, double beta);
Matrix h_beta_recursive_secant(const Matrix& dS, const Matrix& dF, double beta);
Matrix h_beta_recursive_projected(const Matrix& dS, const Matrix& dF, double beta);

// Threshold Gram-Schmidt pass over the columns of dF: a column is kept when
// tau * ||projected residual|| >= ||column||. `orthogonalized` holds the
// surviving projected columns, aligned with `kept`.
struct StabilizedSurvivors {
    std::vector<Index> kept;
    std::vector<Vector> orthogonalized;
};
StabilizedSurvivors stabilized_filter(const Matrix& dF, double tau);

// State of a mixing run: aligned iterate and residual histories. After
// initialization the histories hold s_0..s_j and f_0..f_{j-1}.
struct AtmState {
    SequenceWindow s_history;
    SequenceWindow f_history;
    long j = 0;
    Matrix mmpe_y; // fixed orthonormal columns, sampled once per run

    AtmState(Index dim, Index m) : s_history(dim, m + 2), f_history(dim, m + 2) {}
};

struct AtmStepResult {
    Vector next;
    std::optional<double> selected_lambda;
    bool damped_fallback = false;
};

// One mixing step: consumes g = G(s_j), computes theta per cfg.method, forms
// the combined iterate s_{j+1} and advances the state. On a singular theta
// system the oldest history column is dropped and the solve retried once;
// failing that the step degrades to s_{j+1} = s_j + beta f_j.
AtmStepResult atm_step(AtmState& state, const Vector& g_value, const MethodConfig& cfg);

RunRecord run_plain(const FixedPointProblem& problem, const MethodConfig& cfg);
RunRecord run_restarted(const FixedPointProblem& problem, const MethodConfig& cfg);
RunRecord run_continuous_alpha(const FixedPointProblem& problem, const MethodConfig& cfg);
RunRecord run_continuous_beta(const FixedPointProblem& problem, const MethodConfig& cfg);
RunRecord run_atm(const FixedPointProblem& problem, const MethodConfig& cfg);
RunRecord run_stabilized_aa(const FixedPointProblem& problem, const MethodConfig& cfg);

// Dispatch on cfg.method; fills wall_ms.
RunRecord run_method(const FixedPointProblem& problem, const MethodConfig& cfg);

} // namespace xtrap::drivers

#endif
